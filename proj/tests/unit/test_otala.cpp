#include <doctest.h>

#include "core/otala.hpp"
#include "core/plant_sim.hpp"
#include "core/trace.hpp"
#include "helpers.hpp"

using namespace plcauto;
using plcauto::test::sv;

namespace {

LabeledTrace clean_trace(int cycles) {
    SimConfig config;
    config.cycles = cycles;
    config.dwell = DwellProfile::uniform(1);
    return simulate(config);
}

}  // namespace

TEST_CASE("constant input collapses to a single open state") {
    const SensorVector v = sv(5);
    const std::vector<Observation> obs = {{0, v}, {1, v}, {2, v}};
    const Automaton a = learn_otala(obs, position_map());
    CHECK(a.states.size() == 1);
    CHECK(a.transitions.empty());
    CHECK(!a.closed);
    a.validate();
}

TEST_CASE("a clean cycle learns the full 20-state loop") {
    const auto per_cycle = learn_per_cycle(clean_trace(1), position_map());
    REQUIRE(per_cycle.size() == 1);
    const Automaton& a = per_cycle[0].automaton;
    a.validate();

    CHECK(a.states.size() == 20);
    CHECK(a.transitions.size() == 20);
    CHECK(a.closed);
    CHECK(check_cycle_closure(a));
    CHECK(a.states[0].label == PositionLabel::A);

    int labeled = 0;
    for (const auto& s : a.states)
        if (s.label) ++labeled;
    CHECK(labeled == 4);

    // state outputs are the deduped observations, in order
    const auto& states = canonical_cycle();
    for (std::size_t i = 0; i < states.size(); ++i)
        CHECK(a.states[i].output == states[i].sensors);
}

TEST_CASE("duplicated samples leave the learned automaton unchanged") {
    const LabeledTrace base = clean_trace(1);
    LabeledTrace tripled;
    tripled.sampling_period_ms = base.sampling_period_ms;
    for (const auto& s : base.samples)
        for (int k = 0; k < 3; ++k) tripled.samples.push_back(s);

    const auto a = learn_per_cycle(base, position_map());
    const auto b = learn_per_cycle(tripled, position_map());
    REQUIRE(a.size() == 1);
    REQUIRE(b.size() == 1);
    CHECK(a[0].automaton == b[0].automaton);
}

TEST_CASE("dedup invariance holds for random duplication") {
    Rng rng(4242);
    const LabeledTrace base = clean_trace(3);
    const auto reference = learn_per_cycle(base, position_map());
    for (int trial = 0; trial < 100; ++trial) {
        LabeledTrace duplicated;
        duplicated.sampling_period_ms = base.sampling_period_ms;
        for (const auto& s : base.samples) {
            const int copies = rng.uniform_int(1, 4);
            for (int k = 0; k < copies; ++k) duplicated.samples.push_back(s);
        }
        const auto learned = learn_per_cycle(duplicated, position_map());
        REQUIRE(learned.size() == reference.size());
        for (std::size_t i = 0; i < learned.size(); ++i)
            CHECK(learned[i].automaton == reference[i].automaton);
    }
}

TEST_CASE("is_position_state answers from the map") {
    const PositionMap pmap = position_map();
    const auto& states = canonical_cycle();
    CHECK(is_position_state(states[0].sensors, pmap) == PositionLabel::A);
    CHECK(is_position_state(states[16].sensors, pmap) == PositionLabel::D);
    CHECK(!is_position_state(SensorVector{}, pmap).has_value());
}

TEST_CASE("a corrupted observation adds an anonymous state") {
    LabeledTrace trace = clean_trace(1);
    trace.samples[5].sensors = sv(0x7ff);  // a vector no canonical state uses
    const auto per_cycle = learn_per_cycle(trace, position_map());
    REQUIRE(per_cycle.size() == 1);
    const Automaton& a = per_cycle[0].automaton;
    CHECK(a.states.size() == 20);  // replaced, not inserted: still 20 distinct
    CHECK(!a.states[5].label.has_value());
    CHECK(a.closed);

    // inserting (rather than replacing) a bogus reading grows the automaton
    LabeledTrace longer = clean_trace(1);
    longer.samples.insert(longer.samples.begin() + 5,
                          Sample{sv(0x7ff), PositionLabel::Transition});
    const auto grown = learn_per_cycle(longer, position_map());
    REQUIRE(grown.size() == 1);
    CHECK(grown[0].automaton.states.size() == 21);
    CHECK(grown[0].automaton.closed);
}

TEST_CASE("a premature position-A reading closes the loop early") {
    LabeledTrace trace = clean_trace(1);
    trace.samples[10].sensors = canonical_cycle()[0].sensors;
    const auto per_cycle = learn_per_cycle(trace, position_map());
    REQUIRE(per_cycle.size() == 1);
    const Automaton& a = per_cycle[0].automaton;
    CHECK(a.closed);
    CHECK(a.states.size() == 10);
    CHECK(!check_cycle_closure(a));  // B was visited, C and D never were
}

TEST_CASE("truncated input leaves the automaton open") {
    const LabeledTrace trace = clean_trace(1);
    // stop right after the position-D state (canonical id 17)
    const auto obs = to_observations(
        std::span<const Sample>(trace.samples.data(), 17), 0);
    const Automaton a = learn_otala(obs, position_map());
    CHECK(a.states.size() == 17);
    CHECK(a.transitions.size() == 16);
    CHECK(!a.closed);
    CHECK(a.states.back().label == PositionLabel::D);
    CHECK(!check_cycle_closure(a));
}

TEST_CASE("state count equals the deduped prefix consumed before closure") {
    SimConfig two_cycles;
    two_cycles.cycles = 2;
    const LabeledTrace trace = simulate(two_cycles);
    const auto cycles = segment_cycles(trace);
    const auto per_cycle = learn_per_cycle(trace, position_map());
    REQUIRE(per_cycle.size() == cycles.size());
    for (std::size_t k = 0; k < cycles.size(); ++k) {
        const auto deduped = dedup_consecutive(to_observations(cycles[k].samples));
        CHECK(per_cycle[k].automaton.states.size() == deduped.size());
    }
}

TEST_CASE("out-degree stays at most one on noisy traces") {
    SimConfig config;
    config.cycles = 10;
    config.noise.bit_flip_prob = 0.05;
    config.seed = 555;
    const auto per_cycle = learn_per_cycle(simulate(config), position_map());
    REQUIRE(!per_cycle.empty());
    for (const auto& entry : per_cycle) {
        entry.automaton.validate();  // includes the out-degree check
        int labeled = 0;
        for (const auto& s : entry.automaton.states)
            if (s.label) ++labeled;
        CHECK(labeled <= 4 + 4);  // noise may re-mint corner vectors, but rarely
    }
}

TEST_CASE("modal selection picks the most frequent automaton") {
    const LabeledTrace base = clean_trace(5);
    const ModalResult clean = learn_modal(base, position_map());
    CHECK(clean.per_cycle.size() == 5);
    CHECK(clean.frequency == 5);
    CHECK(clean.best_cycle_index == 0);
    CHECK(clean.best == clean.per_cycle[0].automaton);

    // corrupt one cycle; the other four still agree
    LabeledTrace noisy = base;
    noisy.samples[21 + 5].sensors = sv(0x7ff);  // inside the second cycle
    const ModalResult modal = learn_modal(noisy, position_map());
    CHECK(modal.frequency == 4);
    CHECK(modal.best == clean.best);
}

TEST_CASE("degenerate inputs") {
    CHECK_THROWS_AS(learn_otala({}, position_map()), Error);
    LabeledTrace unlabeled;
    unlabeled.samples.push_back(Sample{sv(1), std::nullopt});
    CHECK_THROWS_AS(learn_per_cycle(unlabeled, position_map()), Error);
    const LabeledTrace one_onset = clean_trace(1);
    // a trace whose only onset is its first sample has no complete cycle
    LabeledTrace truncated;
    truncated.samples.assign(one_onset.samples.begin(), one_onset.samples.end() - 1);
    CHECK(learn_per_cycle(truncated, position_map()).empty());
    CHECK_THROWS_AS(learn_modal(truncated, position_map()), Error);
}
