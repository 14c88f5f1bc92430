#ifndef PLCAUTO_CORE_AUTOMATON_HPP
#define PLCAUTO_CORE_AUTOMATON_HPP

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace plcauto {

using StateId = int;

/// A state of the learned machine. Its output is the sensor vector it
/// represents; corner states additionally carry a position label.
struct State {
    StateId id = 0;
    SensorVector output;
    std::optional<PositionLabel> label;

    friend bool operator==(const State&, const State&) = default;
};

struct Transition {
    StateId from = 0;
    StateId to = 0;

    friend bool operator==(const Transition&, const Transition&) = default;
};

/// Deterministic state-output automaton: every state has at most one
/// outgoing transition, so the learned machines are paths, optionally closed
/// into a cycle by a transition back to the initial state.
struct Automaton {
    std::vector<State> states;
    std::vector<Transition> transitions;
    StateId initial = 0;
    bool closed = false;

    std::set<SensorVector> input_alphabet() const;
    std::set<SensorVector> output_alphabet() const;

    /// Unique successor, if any.
    std::optional<StateId> successor(StateId id) const;

    /// Throws ErrorKind::data when structural invariants are violated
    /// (unknown endpoints, duplicate ids, out-degree > 1, bad initial,
    /// closed flag inconsistent with the transitions).
    void validate() const;

    friend bool operator==(const Automaton&, const Automaton&) = default;
};

/// Collapses consecutive equal (observation, label) pairs, mints one state
/// per surviving pair and chains them with transitions. When the initial
/// pair recurs, a closing transition to the initial state is added and the
/// rest of the input is ignored.
Automaton build_from_predictions(std::span<const SensorVector> observations,
                                 std::span<const PositionLabel> labels);

/// True iff following transitions from the initial state leads back to it
/// while visiting the four position labels in cyclic A->B->C->D order.
bool check_cycle_closure(const Automaton& a);

struct ComparisonReport {
    int state_count_a = 0, state_count_b = 0;
    int transition_count_a = 0, transition_count_b = 0;
    bool closed_a = false, closed_b = false;
    std::vector<PositionLabel> position_labels_present_a, position_labels_present_b;
    std::vector<std::pair<PositionLabel, PositionLabel>> missing_position_transitions_a;
    std::vector<std::pair<PositionLabel, PositionLabel>> missing_position_transitions_b;
};

/// Side-by-side structural comparison: state/transition counts, closure,
/// which position labels are present, and which of the adjacent position
/// transitions (A->B, B->C, C->D, D->A) each automaton fails to realize.
ComparisonReport compare(const Automaton& a, const Automaton& b);

std::string format_comparison(const ComparisonReport& report,
                              const std::string& name_a = "a",
                              const std::string& name_b = "b");

/// DOT rendering: one node per state (id, position label if any, sensor
/// bits), one edge per transition, initial state drawn as a double circle.
std::string to_dot(const Automaton& a);

/// Versioned JSON document with fields schema_version, states[],
/// transitions[], initial, closed. from_json(to_json(a)) == a.
std::string to_json(const Automaton& a);
Automaton from_json(const std::string& text);

}  // namespace plcauto

#endif
