#include "core/otala.hpp"

#include <algorithm>

#include "core/trace.hpp"

namespace plcauto {

void PositionMap::insert(const SensorVector& sensors, PositionLabel label) {
    if (!is_position(label))
        throw Error(ErrorKind::usage, "position map entries must be positions, not Transition");
    for (const auto& [v, l] : entries_) {
        if (v == sensors)
            throw Error(ErrorKind::usage, "position map already contains this sensor vector");
        if (l == label)
            throw Error(ErrorKind::usage,
                        std::string("position map already contains label ") + label_to_char(label));
    }
    entries_.emplace_back(sensors, label);
}

std::optional<PositionLabel> PositionMap::lookup(const SensorVector& sensors) const {
    for (const auto& [v, l] : entries_)
        if (v == sensors) return l;
    return std::nullopt;
}

std::optional<SensorVector> PositionMap::vector_for(PositionLabel label) const {
    for (const auto& [v, l] : entries_)
        if (l == label) return v;
    return std::nullopt;
}

std::optional<PositionLabel> is_position_state(const SensorVector& obs,
                                               const PositionMap& pmap) {
    return pmap.lookup(obs);
}

Automaton learn_otala(std::span<const Observation> cycle, const PositionMap& pmap) {
    if (cycle.empty())
        throw Error(ErrorKind::data, "otala: cannot learn from an empty observation sequence");

    const auto deduped = dedup_consecutive(cycle);
    const auto start_vec = pmap.vector_for(PositionLabel::A);

    Automaton a;
    int seen_start = 0;
    for (const auto& obs : deduped) {
        const bool at_start = start_vec && obs.sensors == *start_vec;
        if (at_start && seen_start >= 1) {
            // Block back at position A: close the loop and stop learning.
            a.transitions.push_back({a.states.back().id, a.initial});
            a.closed = true;
            break;
        }
        if (at_start) ++seen_start;
        const StateId id = static_cast<StateId>(a.states.size());
        a.states.push_back(State{id, obs.sensors, pmap.lookup(obs.sensors)});
        if (id > 0) a.transitions.push_back({id - 1, id});
    }
    return a;
}

std::vector<CycleAutomaton> learn_per_cycle(const LabeledTrace& trace,
                                            const PositionMap& pmap) {
    const auto cycles = segment_cycles(trace);
    std::vector<CycleAutomaton> result;
    result.reserve(cycles.size());
    for (std::size_t k = 0; k < cycles.size(); ++k) {
        const Cycle& c = cycles[k];
        // Slice through the next A-onset inclusive, so the learner can
        // witness the return to the starting position.
        std::span<const Sample> slice(trace.samples.data() + c.start_index,
                                      c.end_index - c.start_index + 1);
        const auto observations = to_observations(slice, c.start_index);
        result.push_back({static_cast<int>(k), learn_otala(observations, pmap)});
    }
    return result;
}

ModalResult learn_modal(const LabeledTrace& trace, const PositionMap& pmap) {
    ModalResult result;
    result.per_cycle = learn_per_cycle(trace, pmap);
    if (result.per_cycle.empty())
        throw Error(ErrorKind::data, "otala: trace contains no complete cycle");

    std::size_t best = 0;
    int best_count = 0;
    for (std::size_t i = 0; i < result.per_cycle.size(); ++i) {
        int count = 0;
        for (const auto& other : result.per_cycle)
            if (other.automaton == result.per_cycle[i].automaton) ++count;
        if (count > best_count) {
            best_count = count;
            best = i;
        }
    }
    result.best = result.per_cycle[best].automaton;
    result.best_cycle_index = result.per_cycle[best].cycle_index;
    result.frequency = best_count;
    return result;
}

}  // namespace plcauto
