#ifndef PLCAUTO_CORE_OTALA_HPP
#define PLCAUTO_CORE_OTALA_HPP

#include <optional>
#include <span>
#include <vector>

#include "core/automaton.hpp"
#include "core/types.hpp"

namespace plcauto {

/// Lookup from the known corner-position sensor vectors to their labels.
/// At most four entries, one per position.
class PositionMap {
public:
    void insert(const SensorVector& sensors, PositionLabel label);

    std::optional<PositionLabel> lookup(const SensorVector& sensors) const;
    std::optional<SensorVector> vector_for(PositionLabel label) const;

    std::size_t size() const { return entries_.size(); }
    const std::vector<std::pair<SensorVector, PositionLabel>>& entries() const {
        return entries_;
    }

private:
    std::vector<std::pair<SensorVector, PositionLabel>> entries_;
};

/// Position lookup for a single observation.
std::optional<PositionLabel> is_position_state(const SensorVector& obs,
                                               const PositionMap& pmap);

/// Passive learner over one cycle of observations: deduplicates consecutive
/// repeats, mints one state per surviving observation (labeled when the
/// observation is a known position, anonymous otherwise) and chains them
/// with transitions. Learning completes at the second occurrence of the
/// position-A vector, which closes the automaton back to its initial state;
/// remaining input is ignored. If the input runs out first, the automaton is
/// returned with closed == false.
Automaton learn_otala(std::span<const Observation> cycle, const PositionMap& pmap);

struct CycleAutomaton {
    int cycle_index = 0;
    Automaton automaton;
};

/// Runs the learner once per segmented cycle. Each run sees the trace slice
/// from the cycle's A-onset through the next A-onset inclusive, so a clean
/// cycle ends with the observation that closes it.
std::vector<CycleAutomaton> learn_per_cycle(const LabeledTrace& trace,
                                            const PositionMap& pmap);

struct ModalResult {
    Automaton best;           // most frequent automaton across cycles
    int best_cycle_index = 0; // first cycle that produced it
    int frequency = 0;
    std::vector<CycleAutomaton> per_cycle;
};

/// Per-cycle learning plus selection of the modal automaton (ties go to the
/// earliest cycle).
ModalResult learn_modal(const LabeledTrace& trace, const PositionMap& pmap);

}  // namespace plcauto

#endif
