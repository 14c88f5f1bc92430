#include <doctest.h>

#include <algorithm>

#include "core/automaton.hpp"
#include "core/otala.hpp"
#include "core/plant_sim.hpp"
#include "core/trace.hpp"
#include "helpers.hpp"

using namespace plcauto;
using plcauto::test::sv;

namespace {

/// Observation/label pair streams of one clean simulated cycle, including
/// the closing observation.
std::pair<std::vector<SensorVector>, std::vector<PositionLabel>> clean_cycle_pairs() {
    SimConfig config;
    config.cycles = 1;
    config.dwell = DwellProfile::uniform(1);
    const LabeledTrace trace = simulate(config);
    std::vector<SensorVector> obs;
    std::vector<PositionLabel> labels;
    for (const auto& s : trace.samples) {
        obs.push_back(s.sensors);
        labels.push_back(*s.label);
    }
    return {obs, labels};
}

Automaton random_automaton(Rng& rng) {
    const int len = rng.uniform_int(1, 30);
    std::vector<SensorVector> obs;
    std::vector<PositionLabel> labels;
    for (int i = 0; i < len; ++i) {
        obs.push_back(plcauto::test::random_vector(rng));
        labels.push_back(plcauto::test::random_label(rng));
    }
    return build_from_predictions(obs, labels);
}

}  // namespace

TEST_CASE("a clean labeled cycle builds the closed 20-state automaton") {
    const auto [obs, labels] = clean_cycle_pairs();
    const Automaton a = build_from_predictions(obs, labels);
    a.validate();
    CHECK(a.states.size() == 20);
    CHECK(a.transitions.size() == 20);
    CHECK(a.closed);
    CHECK(check_cycle_closure(a));

    int positions = 0;
    for (const auto& s : a.states) {
        REQUIRE(s.label.has_value());
        if (is_position(*s.label)) ++positions;
    }
    CHECK(positions == 4);
    CHECK(a.states[0].label == PositionLabel::A);
    CHECK(a.input_alphabet().size() == 20);
    CHECK(a.input_alphabet() == a.output_alphabet());
}

TEST_CASE("degenerate prediction streams") {
    SUBCASE("single pair") {
        const std::vector<SensorVector> obs = {sv(3)};
        const std::vector<PositionLabel> labels = {PositionLabel::B};
        const Automaton a = build_from_predictions(obs, labels);
        CHECK(a.states.size() == 1);
        CHECK(a.transitions.empty());
        CHECK(!a.closed);
    }
    SUBCASE("constant pairs collapse") {
        const std::vector<SensorVector> obs = {sv(3), sv(3), sv(3)};
        const std::vector<PositionLabel> labels(3, PositionLabel::Transition);
        CHECK(build_from_predictions(obs, labels).states.size() == 1);
    }
    SUBCASE("state identity is the (observation, label) pair") {
        const std::vector<SensorVector> obs = {sv(3), sv(3)};
        const std::vector<PositionLabel> labels = {PositionLabel::A, PositionLabel::B};
        const Automaton a = build_from_predictions(obs, labels);
        CHECK(a.states.size() == 2);  // same vector, different label
    }
    SUBCASE("length mismatch and empty input") {
        const std::vector<SensorVector> obs = {sv(3)};
        CHECK_THROWS_AS(build_from_predictions(obs, {}), Error);
        CHECK_THROWS_AS(build_from_predictions({}, {}), Error);
    }
}

TEST_CASE("cycle closure requires the full A-B-C-D loop") {
    const auto [obs, labels] = clean_cycle_pairs();
    const Automaton complete = build_from_predictions(obs, labels);
    CHECK(check_cycle_closure(complete));

    SUBCASE("removing the closing edge breaks closure") {
        Automaton open = complete;
        open.transitions.pop_back();
        open.closed = false;
        open.validate();
        CHECK(!check_cycle_closure(open));
    }
    SUBCASE("a terminal D state breaks closure and is reported missing D->A") {
        // truncate right after the D corner (canonical state 17)
        std::vector<SensorVector> cut(obs.begin(), obs.begin() + 17);
        std::vector<PositionLabel> cut_labels(labels.begin(), labels.begin() + 17);
        const Automaton truncated = build_from_predictions(cut, cut_labels);
        CHECK(!truncated.closed);
        CHECK(!check_cycle_closure(truncated));

        const ComparisonReport report = compare(truncated, complete);
        REQUIRE(report.missing_position_transitions_a.size() == 1);
        CHECK(report.missing_position_transitions_a[0] ==
              std::make_pair(PositionLabel::D, PositionLabel::A));
        CHECK(report.missing_position_transitions_b.empty());
        CHECK(report.closed_b);
        CHECK(!report.closed_a);
        CHECK(report.position_labels_present_a ==
              std::vector<PositionLabel>{PositionLabel::A, PositionLabel::B,
                                         PositionLabel::C, PositionLabel::D});
    }
}

TEST_CASE("every noiseless simulated cycle builds a closed automaton") {
    const LabeledTrace trace = simulate(SimConfig{});  // standard dwell profile
    const auto cycles = segment_cycles(trace);
    REQUIRE(cycles.size() == 51);
    for (std::size_t k = 0; k < cycles.size(); ++k) {
        std::vector<SensorVector> obs;
        std::vector<PositionLabel> labels;
        // slice through the next onset so the builder sees the recurrence
        for (std::size_t i = cycles[k].start_index; i <= cycles[k].end_index; ++i) {
            obs.push_back(trace.samples[i].sensors);
            labels.push_back(*trace.samples[i].label);
        }
        const Automaton a = build_from_predictions(obs, labels);
        CHECK(a.closed);
        CHECK(a.states.size() == 20);
        CHECK(check_cycle_closure(a));
    }
}

TEST_CASE("compare echoes its inputs symmetrically") {
    const auto [obs, labels] = clean_cycle_pairs();
    const Automaton a = build_from_predictions(obs, labels);
    const ComparisonReport self = compare(a, a);
    CHECK(self.state_count_a == self.state_count_b);
    CHECK(self.transition_count_a == self.transition_count_b);
    CHECK(self.missing_position_transitions_a.empty());
    CHECK(self.missing_position_transitions_b.empty());

    Rng rng(2025);
    for (int trial = 0; trial < 50; ++trial) {
        const Automaton x = random_automaton(rng);
        const Automaton y = random_automaton(rng);
        const ComparisonReport xy = compare(x, y);
        const ComparisonReport yx = compare(y, x);
        CHECK(xy.state_count_a == yx.state_count_b);
        CHECK(xy.transition_count_a == yx.transition_count_b);
        CHECK(xy.closed_a == yx.closed_b);
        CHECK(xy.missing_position_transitions_a == yx.missing_position_transitions_b);
        CHECK(xy.state_count_a == static_cast<int>(x.states.size()));
        CHECK(xy.state_count_b == static_cast<int>(y.states.size()));
    }
}

TEST_CASE("comparison report renders both sides") {
    const auto [obs, labels] = clean_cycle_pairs();
    const Automaton a = build_from_predictions(obs, labels);
    const std::string text = format_comparison(compare(a, a), "otala", "lstm");
    CHECK(text.find("otala=20") != std::string::npos);
    CHECK(text.find("lstm=20") != std::string::npos);
    CHECK(text.find("missing position transitions in otala: none") != std::string::npos);
}

TEST_CASE("DOT output has one node per state and one edge per transition") {
    SUBCASE("single state") {
        const std::vector<SensorVector> obs = {sv(1)};
        const std::vector<PositionLabel> labels = {PositionLabel::A};
        const std::string dot = to_dot(build_from_predictions(obs, labels));
        CHECK(dot.find("digraph") != std::string::npos);
        CHECK(dot.find("->") == std::string::npos);  // zero edges
        CHECK(dot.find("doublecircle") != std::string::npos);  // initial marked
        // exactly one node line
        std::size_t nodes = 0, pos = 0;
        while ((pos = dot.find("[label=", pos)) != std::string::npos) {
            ++nodes;
            ++pos;
        }
        CHECK(nodes == 1);
    }
    SUBCASE("random automata") {
        Rng rng(31);
        for (int trial = 0; trial < 100; ++trial) {
            const Automaton a = random_automaton(rng);
            const std::string dot = to_dot(a);
            std::size_t nodes = 0, edges = 0, pos = 0;
            while ((pos = dot.find("[label=", pos)) != std::string::npos) {
                ++nodes;
                ++pos;
            }
            pos = 0;
            while ((pos = dot.find("->", pos)) != std::string::npos) {
                ++edges;
                ++pos;
            }
            CHECK(nodes == a.states.size());
            CHECK(edges == a.transitions.size());
        }
    }
}

TEST_CASE("JSON round-trips losslessly") {
    Rng rng(808);
    for (int trial = 0; trial < 100; ++trial) {
        const Automaton a = random_automaton(rng);
        const Automaton back = from_json(to_json(a));
        CHECK(back == a);
    }
    // OTALA automata carry unlabeled states; round-trip those too
    SimConfig two_cycles;
    two_cycles.cycles = 2;
    const auto per_cycle = learn_per_cycle(simulate(two_cycles), position_map());
    for (const auto& entry : per_cycle)
        CHECK(from_json(to_json(entry.automaton)) == entry.automaton);
}

TEST_CASE("JSON parsing reports failures") {
    CHECK_THROWS_AS(from_json("not json at all"), Error);
    try {
        from_json("{\"schema_version\": 1, \"initial\": 0,");
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::data);
        CHECK(std::string(e.what()).find("automaton JSON") != std::string::npos);
    }
    // wrong schema version
    CHECK_THROWS_AS(from_json("{\"schema_version\": 99, \"initial\": 0, \"closed\": false,"
                              "\"states\": [], \"transitions\": []}"),
                    Error);
    // out-degree 2 violates determinism
    const std::string branching = R"({
      "schema_version": 1, "initial": 0, "closed": false,
      "states": [
        {"id": 0, "output": "00000000000", "label": null},
        {"id": 1, "output": "00000000001", "label": null},
        {"id": 2, "output": "00000000010", "label": null}
      ],
      "transitions": [{"from": 0, "to": 1}, {"from": 0, "to": 2}]
    })";
    CHECK_THROWS_AS(from_json(branching), Error);
    // closed flag must match the transitions
    const std::string bad_closed = R"({
      "schema_version": 1, "initial": 0, "closed": true,
      "states": [{"id": 0, "output": "00000000000", "label": null}],
      "transitions": []
    })";
    CHECK_THROWS_AS(from_json(bad_closed), Error);
}

TEST_CASE("constructed automata always keep out-degree at most one") {
    Rng rng(4096);
    for (int trial = 0; trial < 100; ++trial) {
        const Automaton a = random_automaton(rng);
        CHECK_NOTHROW(a.validate());
        const bool targets_initial =
            std::any_of(a.transitions.begin(), a.transitions.end(),
                        [&](const Transition& t) { return t.to == a.initial; });
        CHECK(a.closed == targets_initial);
    }
}
