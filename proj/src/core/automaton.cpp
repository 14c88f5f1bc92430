#include "core/automaton.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

namespace plcauto {

namespace {

constexpr int kSchemaVersion = 1;

const std::array<PositionLabel, 4> kPositionOrder = {
    PositionLabel::A, PositionLabel::B, PositionLabel::C, PositionLabel::D};

PositionLabel next_position(PositionLabel l) {
    switch (l) {
        case PositionLabel::A: return PositionLabel::B;
        case PositionLabel::B: return PositionLabel::C;
        case PositionLabel::C: return PositionLabel::D;
        case PositionLabel::D: return PositionLabel::A;
        case PositionLabel::Transition: break;
    }
    throw Error(ErrorKind::data, "transition label has no cyclic successor");
}

}  // namespace

std::set<SensorVector> Automaton::input_alphabet() const {
    std::set<SensorVector> alphabet;
    for (const auto& s : states) alphabet.insert(s.output);
    return alphabet;
}

std::set<SensorVector> Automaton::output_alphabet() const { return input_alphabet(); }

std::optional<StateId> Automaton::successor(StateId id) const {
    for (const auto& t : transitions)
        if (t.from == id) return t.to;
    return std::nullopt;
}

void Automaton::validate() const {
    if (states.empty()) throw Error(ErrorKind::data, "automaton has no states");
    std::set<StateId> ids;
    for (const auto& s : states)
        if (!ids.insert(s.id).second)
            throw Error(ErrorKind::data, "duplicate state id " + std::to_string(s.id));
    if (!ids.count(initial))
        throw Error(ErrorKind::data, "initial state " + std::to_string(initial) +
                                         " is not a declared state");
    std::set<StateId> sources;
    bool initial_targeted = false;
    for (const auto& t : transitions) {
        if (!ids.count(t.from) || !ids.count(t.to))
            throw Error(ErrorKind::data, "transition endpoint is not a declared state");
        if (!sources.insert(t.from).second)
            throw Error(ErrorKind::data, "state " + std::to_string(t.from) +
                                             " has more than one outgoing transition");
        if (t.to == initial) initial_targeted = true;
    }
    if (closed != initial_targeted)
        throw Error(ErrorKind::data,
                    "closed flag inconsistent with transitions targeting the initial state");
}

Automaton build_from_predictions(std::span<const SensorVector> observations,
                                 std::span<const PositionLabel> labels) {
    if (observations.size() != labels.size())
        throw Error(ErrorKind::data, "observations and labels differ in length");
    if (observations.empty())
        throw Error(ErrorKind::data, "cannot build an automaton from an empty sequence");

    Automaton a;
    for (std::size_t t = 0; t < observations.size(); ++t) {
        const SensorVector& v = observations[t];
        const PositionLabel l = labels[t];
        if (!a.states.empty()) {
            const State& last = a.states.back();
            if (last.output == v && last.label == l) continue;  // consecutive repeat
            const State& first = a.states[static_cast<std::size_t>(a.initial)];
            if (first.output == v && first.label == l) {
                a.transitions.push_back({last.id, a.initial});
                a.closed = true;
                break;
            }
        }
        const StateId id = static_cast<StateId>(a.states.size());
        a.states.push_back(State{id, v, l});
        if (id > 0) a.transitions.push_back({id - 1, id});
    }
    return a;
}

namespace {

// Walks from `from` along the unique outgoing edges and reports the first
// position-labeled state encountered (not counting `from` itself).
std::optional<PositionLabel> next_position_on_path(const Automaton& a, StateId from) {
    std::map<StateId, const State*> by_id;
    for (const auto& s : a.states) by_id[s.id] = &s;
    StateId cur = from;
    for (std::size_t steps = 0; steps < a.states.size(); ++steps) {
        const auto next = a.successor(cur);
        if (!next) return std::nullopt;
        cur = *next;
        const State* s = by_id.at(cur);
        if (s->label && is_position(*s->label)) return *s->label;
    }
    return std::nullopt;
}

std::vector<PositionLabel> positions_present(const Automaton& a) {
    std::vector<PositionLabel> present;
    for (PositionLabel p : kPositionOrder) {
        const bool found = std::any_of(a.states.begin(), a.states.end(),
                                       [&](const State& s) { return s.label == p; });
        if (found) present.push_back(p);
    }
    return present;
}

std::vector<std::pair<PositionLabel, PositionLabel>> missing_position_transitions(
    const Automaton& a) {
    std::vector<std::pair<PositionLabel, PositionLabel>> missing;
    for (PositionLabel from : kPositionOrder) {
        const PositionLabel to = next_position(from);
        bool realized = false;
        for (const auto& s : a.states) {
            if (s.label != from) continue;
            if (next_position_on_path(a, s.id) == to) {
                realized = true;
                break;
            }
        }
        if (!realized) missing.emplace_back(from, to);
    }
    return missing;
}

}  // namespace

bool check_cycle_closure(const Automaton& a) {
    if (a.states.empty()) return false;
    std::map<StateId, const State*> by_id;
    for (const auto& s : a.states) by_id[s.id] = &s;

    std::vector<PositionLabel> visited;
    StateId cur = a.initial;
    for (std::size_t steps = 0; steps <= a.states.size(); ++steps) {
        const State* s = by_id.at(cur);
        if (s->label && is_position(*s->label)) visited.push_back(*s->label);
        const auto next = a.successor(cur);
        if (!next) return false;
        if (*next == a.initial) {
            if (visited.size() != 4) return false;
            // must be a rotation of A,B,C,D
            for (std::size_t i = 0; i + 1 < visited.size(); ++i)
                if (next_position(visited[i]) != visited[i + 1]) return false;
            return next_position(visited.back()) == visited.front();
        }
        cur = *next;
    }
    return false;  // looped without reaching the initial state
}

ComparisonReport compare(const Automaton& a, const Automaton& b) {
    ComparisonReport r;
    r.state_count_a = static_cast<int>(a.states.size());
    r.state_count_b = static_cast<int>(b.states.size());
    r.transition_count_a = static_cast<int>(a.transitions.size());
    r.transition_count_b = static_cast<int>(b.transitions.size());
    r.closed_a = a.closed;
    r.closed_b = b.closed;
    r.position_labels_present_a = positions_present(a);
    r.position_labels_present_b = positions_present(b);
    r.missing_position_transitions_a = missing_position_transitions(a);
    r.missing_position_transitions_b = missing_position_transitions(b);
    return r;
}

namespace {

std::string label_list(const std::vector<PositionLabel>& labels) {
    if (labels.empty()) return "none";
    std::string out;
    for (PositionLabel l : labels) {
        if (!out.empty()) out += ",";
        out += label_to_char(l);
    }
    return out;
}

std::string pair_list(const std::vector<std::pair<PositionLabel, PositionLabel>>& pairs) {
    if (pairs.empty()) return "none";
    std::string out;
    for (const auto& [from, to] : pairs) {
        if (!out.empty()) out += ", ";
        out += std::string(1, label_to_char(from)) + "->" + label_to_char(to);
    }
    return out;
}

}  // namespace

std::string format_comparison(const ComparisonReport& r, const std::string& name_a,
                              const std::string& name_b) {
    std::ostringstream out;
    out << "automaton comparison (" << name_a << " vs " << name_b << ")\n";
    out << "  states:          " << name_a << "=" << r.state_count_a << "  " << name_b
        << "=" << r.state_count_b << "\n";
    out << "  transitions:     " << name_a << "=" << r.transition_count_a << "  "
        << name_b << "=" << r.transition_count_b << "\n";
    out << "  closed:          " << name_a << "=" << (r.closed_a ? "yes" : "no") << "  "
        << name_b << "=" << (r.closed_b ? "yes" : "no") << "\n";
    out << "  position labels: " << name_a << "=" << label_list(r.position_labels_present_a)
        << "  " << name_b << "=" << label_list(r.position_labels_present_b) << "\n";
    out << "  missing position transitions in " << name_a << ": "
        << pair_list(r.missing_position_transitions_a) << "\n";
    out << "  missing position transitions in " << name_b << ": "
        << pair_list(r.missing_position_transitions_b) << "\n";
    return out.str();
}

std::string to_dot(const Automaton& a) {
    std::ostringstream out;
    out << "digraph automaton {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=circle, fontsize=10];\n";
    for (const auto& s : a.states) {
        out << "  s" << s.id << " [label=\"" << s.id;
        if (s.label) out << "\\n" << label_to_char(*s.label);
        out << "\\n" << s.output.to_string() << "\"";
        if (s.id == a.initial) out << ", shape=doublecircle";
        out << "];\n";
    }
    for (const auto& t : a.transitions) out << "  s" << t.from << " -> s" << t.to << ";\n";
    out << "}\n";
    return out.str();
}

std::string to_json(const Automaton& a) {
    nlohmann::json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["initial"] = a.initial;
    doc["closed"] = a.closed;
    doc["states"] = nlohmann::json::array();
    for (const auto& s : a.states) {
        nlohmann::json js;
        js["id"] = s.id;
        js["output"] = s.output.to_string();
        if (s.label)
            js["label"] = std::string(1, label_to_char(*s.label));
        else
            js["label"] = nullptr;
        doc["states"].push_back(js);
    }
    doc["transitions"] = nlohmann::json::array();
    for (const auto& t : a.transitions)
        doc["transitions"].push_back({{"from", t.from}, {"to", t.to}});
    return doc.dump(2) + "\n";
}

Automaton from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::data, std::string("automaton JSON: ") + e.what());
    }
    try {
        if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != kSchemaVersion)
            throw Error(ErrorKind::data, "automaton JSON: unsupported or missing schema_version");
        Automaton a;
        a.initial = doc.at("initial").get<StateId>();
        a.closed = doc.at("closed").get<bool>();
        for (const auto& js : doc.at("states")) {
            State s;
            s.id = js.at("id").get<StateId>();
            s.output = SensorVector::from_string(js.at("output").get<std::string>());
            const auto& label = js.at("label");
            if (!label.is_null()) {
                const auto str = label.get<std::string>();
                if (str.size() != 1)
                    throw Error(ErrorKind::data, "automaton JSON: bad label '" + str + "'");
                s.label = label_from_char(str[0]);
            }
            a.states.push_back(std::move(s));
        }
        for (const auto& jt : doc.at("transitions"))
            a.transitions.push_back({jt.at("from").get<StateId>(), jt.at("to").get<StateId>()});
        a.validate();
        return a;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::data, std::string("automaton JSON: ") + e.what());
    }
}

}  // namespace plcauto
