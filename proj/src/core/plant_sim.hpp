#ifndef PLCAUTO_CORE_PLANT_SIM_HPP
#define PLCAUTO_CORE_PLANT_SIM_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/otala.hpp"
#include "core/types.hpp"

namespace plcauto {

inline constexpr int kPlantStateCount = 20;

/// One row of the canonical operating cycle: what the plant is doing, the
/// sensor image of that situation, and the class it belongs to.
struct PlantState {
    int id = 0;  // 1-based, canonical order
    std::string description;
    SensorVector sensors;
    PositionLabel label = PositionLabel::Transition;
};

/// Samples the plant spends in each state before moving on. Corner states
/// dwell longer than movements, which is what produces the repeated
/// observations a learner has to deduplicate.
struct DwellProfile {
    std::array<int, kPlantStateCount> dwell_samples{};

    static DwellProfile uniform(int dwell);
    /// Dwell 2 on the four corner states, 1 elsewhere (24 samples per pass).
    static DwellProfile standard();

    int for_state(int state_id) const {
        return dwell_samples.at(static_cast<std::size_t>(state_id - 1));
    }
};

struct NoiseModel {
    double bit_flip_prob = 0.0;  // independent per emitted bit, in [0, 1)
    int dwell_jitter = 0;        // uniform +/- jitter on dwell counts, floored at 1
};

struct SimConfig {
    int cycles = 51;
    DwellProfile dwell = DwellProfile::standard();
    NoiseModel noise;
    std::uint64_t seed = 42;
};

/// The 20 canonical states in operating order. Exactly four of them carry a
/// position label (ids 1, 9, 13, 17); the rest are transitions.
const std::vector<PlantState>& canonical_cycle();

/// Runs the plant for `config.cycles` passes over the canonical cycle, each
/// state held for its (possibly jittered) dwell, then emits one final
/// closing observation of the start state — the block at rest back on
/// position A. With bit_flip_prob > 0 every emitted bit flips independently
/// with that probability. Labels always reflect the true state. Identical
/// configs produce bit-identical traces.
LabeledTrace simulate(const SimConfig& config);

/// Lookup from the four corner-state sensor vectors to their labels.
PositionMap position_map();

/// Fixture file: `id | sensors | label | description` rows, `#` comments.
std::vector<PlantState> parse_states_file(const std::string& path);
std::string format_states_fixture(const std::vector<PlantState>& states);

}  // namespace plcauto

#endif
