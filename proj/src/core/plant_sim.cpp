#include "core/plant_sim.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "core/rng.hpp"

namespace plcauto {

namespace {

// Sensor layout (bit index = sensor id):
//   0..3  block presence at positions A..D
//   4     arm top limit        5  arm bottom limit     6  suction active
//   7     arm carriage at the position-A end
//   8     P2 mid-rail (B..C)   9  P3 mid-rail (C..D)  10  P4 mid-rail (D..A)
//
// Platform story behind the auxiliary bits: P2 shuttles B<->C and is
// mid-rail during states 12, 14, 15; P3 shuttles C<->D, carries the block in
// 15 and returns mid-rail at 19; P4 shuttles D<->A, heads out at 16, carries
// the block at 18 and parks under it at A from 19 onward. The arm carriage
// sits at the A end except while serving station B (6..12).
struct StateRow {
    int id;
    const char* bits;
    PositionLabel label;
    const char* description;
};

constexpr StateRow kStateTable[kPlantStateCount] = {
    {1, "10001001000", PositionLabel::A, "start: block resting on P4 at position A, arm raised over station A"},
    {2, "10000001000", PositionLabel::Transition, "arm lowering toward the block at A, suction off"},
    {3, "10000111000", PositionLabel::Transition, "arm down on the block at A, suction on"},
    {4, "10000011000", PositionLabel::Transition, "arm lifting the block off station A"},
    {5, "00001011000", PositionLabel::Transition, "block raised clear of A, suction holding"},
    {6, "00001010000", PositionLabel::Transition, "arm carrying the block across to B"},
    {7, "01001010000", PositionLabel::Transition, "arm raised above station B with the block"},
    {8, "01000010000", PositionLabel::Transition, "arm lowering the block onto P2 at B"},
    {9, "01000100000", PositionLabel::B, "block resting on P2 at position B, suction off, arm down"},
    {10, "01000000000", PositionLabel::Transition, "arm rising away from P2"},
    {11, "01001000000", PositionLabel::Transition, "arm fully raised, block on P2 at B"},
    {12, "00001000100", PositionLabel::Transition, "P2 carrying the block toward C, arm carriage returning to A"},
    {13, "00101001000", PositionLabel::C, "block on P2 at position C, arm carriage back at A"},
    {14, "00101001100", PositionLabel::Transition, "block handed over to P3 at C, P2 returning mid-rail"},
    {15, "00001001100", PositionLabel::Transition, "P3 carrying the block toward D, P2 still mid-rail"},
    {16, "00011001001", PositionLabel::Transition, "block on P3 at D, P4 outbound mid-rail, P2 back at B"},
    {17, "00011001000", PositionLabel::D, "block resting on P4 at position D"},
    {18, "00001001001", PositionLabel::Transition, "P4 carrying the block toward A"},
    {19, "10000001010", PositionLabel::Transition, "block back at A on P4, P3 returning mid-rail, arm starting down"},
    {20, "10000101000", PositionLabel::Transition, "end of pass: arm parked down at station A, suction off"},
};

std::vector<PlantState> build_canonical() {
    std::vector<PlantState> states;
    states.reserve(kPlantStateCount);
    for (const auto& row : kStateTable) {
        PlantState s;
        s.id = row.id;
        s.description = row.description;
        s.sensors = SensorVector::from_string(row.bits);
        s.label = row.label;
        states.push_back(std::move(s));
    }
    return states;
}

void validate_config(const SimConfig& config) {
    if (config.cycles < 1)
        throw Error(ErrorKind::usage, "simulation needs at least 1 cycle");
    if (!(config.noise.bit_flip_prob >= 0.0 && config.noise.bit_flip_prob < 1.0))
        throw Error(ErrorKind::usage, "bit flip probability must lie in [0, 1)");
    if (config.noise.dwell_jitter < 0)
        throw Error(ErrorKind::usage, "dwell jitter must be non-negative");
    for (int d : config.dwell.dwell_samples)
        if (d < 1) throw Error(ErrorKind::usage, "dwell counts must be >= 1");
}

SensorVector apply_bit_flips(SensorVector v, double p, Rng& rng) {
    for (int b = 0; b < kSensorCount; ++b)
        if (rng.bernoulli(p)) v.flip_bit(b);
    return v;
}

}  // namespace

DwellProfile DwellProfile::uniform(int dwell) {
    DwellProfile p;
    p.dwell_samples.fill(dwell);
    return p;
}

DwellProfile DwellProfile::standard() {
    DwellProfile p = uniform(1);
    for (int corner : {1, 9, 13, 17}) p.dwell_samples[static_cast<std::size_t>(corner - 1)] = 2;
    return p;
}

const std::vector<PlantState>& canonical_cycle() {
    static const std::vector<PlantState> states = build_canonical();
    return states;
}

LabeledTrace simulate(const SimConfig& config) {
    validate_config(config);
    const auto& states = canonical_cycle();
    Rng rng(config.seed);

    LabeledTrace trace;
    trace.sampling_period_ms = kDefaultSamplingPeriodMs;
    const double p = config.noise.bit_flip_prob;
    for (int c = 0; c < config.cycles; ++c) {
        for (const auto& state : states) {
            int dwell = config.dwell.for_state(state.id);
            if (config.noise.dwell_jitter > 0)
                dwell = std::max(
                    1, dwell + rng.uniform_int(-config.noise.dwell_jitter,
                                               config.noise.dwell_jitter));
            for (int rep = 0; rep < dwell; ++rep) {
                SensorVector v = state.sensors;
                if (p > 0.0) v = apply_bit_flips(v, p, rng);
                trace.samples.push_back(Sample{v, state.label});
            }
        }
    }
    // Closing observation: the block has come back to rest on position A.
    {
        SensorVector v = states.front().sensors;
        if (p > 0.0) v = apply_bit_flips(v, p, rng);
        trace.samples.push_back(Sample{v, states.front().label});
    }
    return trace;
}

PositionMap position_map() {
    PositionMap pmap;
    for (const auto& state : canonical_cycle())
        if (is_position(state.label)) pmap.insert(state.sensors, state.label);
    return pmap;
}

std::string format_states_fixture(const std::vector<PlantState>& states) {
    std::string out;
    out += "# conveyor plant fixture v1\n";
    out += "# columns: id | sensors s0..s10 | label | description\n";
    out += "# sensors: 0-3 block at A-D, 4 arm up, 5 arm down, 6 suction,\n";
    out += "#          7 arm carriage at A, 8 P2 mid-rail, 9 P3 mid-rail, 10 P4 mid-rail\n";
    for (const auto& s : states) {
        out += std::to_string(s.id);
        out += " | ";
        out += s.sensors.to_string();
        out += " | ";
        out += label_to_char(s.label);
        out += " | ";
        out += s.description;
        out += "\n";
    }
    return out;
}

std::vector<PlantState> parse_states_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::data, "cannot open fixture file '" + path + "'");
    std::vector<PlantState> states;
    std::string line;
    std::size_t line_no = 0;
    std::set<SensorVector> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        std::vector<std::string> fields;
        std::string field;
        std::istringstream ss(line);
        while (std::getline(ss, field, '|')) {
            // trim surrounding spaces
            const auto b = field.find_first_not_of(" \t");
            const auto e = field.find_last_not_of(" \t");
            fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
        }
        if (fields.size() != 4)
            throw Error(ErrorKind::data, "fixture line " + std::to_string(line_no) +
                                             ": expected 4 fields separated by '|'");
        PlantState s;
        try {
            s.id = std::stoi(fields[0]);
            s.sensors = SensorVector::from_string(fields[1]);
            if (fields[2].size() != 1)
                throw Error(ErrorKind::data, "bad label '" + fields[2] + "'");
            s.label = label_from_char(fields[2][0]);
        } catch (const Error& e) {
            throw Error(ErrorKind::data,
                        "fixture line " + std::to_string(line_no) + ": " + e.what());
        } catch (const std::exception&) {
            throw Error(ErrorKind::data,
                        "fixture line " + std::to_string(line_no) + ": bad state id");
        }
        s.description = fields[3];
        if (s.id != static_cast<int>(states.size()) + 1)
            throw Error(ErrorKind::data, "fixture line " + std::to_string(line_no) +
                                             ": state ids must run 1..20 in order");
        if (!seen.insert(s.sensors).second)
            throw Error(ErrorKind::data, "fixture line " + std::to_string(line_no) +
                                             ": duplicate sensor vector");
        states.push_back(std::move(s));
    }
    if (states.size() != kPlantStateCount)
        throw Error(ErrorKind::data, "fixture must define exactly 20 states, got " +
                                         std::to_string(states.size()));
    return states;
}

}  // namespace plcauto
