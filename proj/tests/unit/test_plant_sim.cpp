#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "core/plant_sim.hpp"
#include "core/trace.hpp"
#include "helpers.hpp"

using namespace plcauto;

TEST_CASE("canonical cycle has 20 distinct states in table order") {
    const auto& states = canonical_cycle();
    REQUIRE(states.size() == kPlantStateCount);
    std::set<SensorVector> seen;
    for (std::size_t i = 0; i < states.size(); ++i) {
        CHECK(states[i].id == static_cast<int>(i) + 1);
        CHECK(seen.insert(states[i].sensors).second);  // injective encoding
        CHECK(!states[i].description.empty());
    }
    // adjacent states differ, including the wrap back to the start
    for (std::size_t i = 0; i < states.size(); ++i)
        CHECK(states[i].sensors != states[(i + 1) % states.size()].sensors);
}

TEST_CASE("canonical labels: corners carry positions, the rest transition") {
    const auto& states = canonical_cycle();
    const std::map<int, PositionLabel> corners = {{1, PositionLabel::A},
                                                  {9, PositionLabel::B},
                                                  {13, PositionLabel::C},
                                                  {17, PositionLabel::D}};
    for (const auto& s : states) {
        const auto it = corners.find(s.id);
        if (it != corners.end())
            CHECK(s.label == it->second);
        else
            CHECK(s.label == PositionLabel::Transition);
    }
    CHECK(states[12].label == PositionLabel::C);            // "block on P2 at position C"
    CHECK(states[9].label == PositionLabel::Transition);    // "arm rising away from P2"
}

TEST_CASE("single noiseless pass emits each state once plus the closing start sample") {
    SimConfig config;
    config.cycles = 1;
    config.dwell = DwellProfile::uniform(1);
    const LabeledTrace trace = simulate(config);
    const auto& states = canonical_cycle();

    REQUIRE(trace.samples.size() == 21);  // 20 states + closing observation
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(trace.samples[i].sensors == states[i].sensors);
        CHECK(trace.samples[i].label == states[i].label);
    }
    CHECK(trace.samples[20].sensors == states[0].sensors);
    CHECK(trace.samples[20].label == PositionLabel::A);
    for (std::size_t i = 0; i + 1 < trace.samples.size(); ++i)
        CHECK(trace.samples[i].sensors != trace.samples[i + 1].sensors);
}

TEST_CASE("default simulation volume matches the standard profile") {
    const LabeledTrace trace = simulate(SimConfig{});
    // 51 passes of 16*1 + 4*2 = 24 samples, plus the closing observation
    CHECK(trace.samples.size() == 51 * 24 + 1);
    CHECK(trace.sampling_period_ms == 500);

    const auto cycles = segment_cycles(trace);
    REQUIRE(cycles.size() == 51);
    for (const auto& c : cycles) {
        CHECK(c.samples.size() == 24);
        // every cycle visits all four positions
        for (PositionLabel p : {PositionLabel::A, PositionLabel::B, PositionLabel::C,
                                PositionLabel::D}) {
            bool found = false;
            for (const auto& s : c.samples) found = found || s.label == p;
            CHECK(found);
        }
    }
}

TEST_CASE("deduping one dwelled cycle recovers the canonical vectors in order") {
    const LabeledTrace trace = simulate(SimConfig{});
    const auto cycles = segment_cycles(trace);
    const auto obs = to_observations(cycles[0].samples);
    const auto deduped = dedup_consecutive(obs);
    const auto& states = canonical_cycle();
    REQUIRE(deduped.size() == states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
        CHECK(deduped[i].sensors == states[i].sensors);
}

TEST_CASE("simulation is deterministic per seed") {
    SimConfig config;
    config.noise.bit_flip_prob = 0.05;
    config.noise.dwell_jitter = 1;
    config.seed = 1234;
    CHECK(simulate(config) == simulate(config));

    SimConfig other = config;
    other.seed = 1235;
    CHECK(simulate(other) != simulate(config));
}

TEST_CASE("bit flips corrupt sensors but never labels") {
    SimConfig noisy;
    noisy.cycles = 5;
    noisy.noise.bit_flip_prob = 0.5;
    const LabeledTrace corrupted = simulate(noisy);

    SimConfig clean = noisy;
    clean.noise.bit_flip_prob = 0.0;
    const LabeledTrace reference = simulate(clean);

    REQUIRE(corrupted.samples.size() == reference.samples.size());
    std::size_t changed = 0;
    for (std::size_t i = 0; i < corrupted.samples.size(); ++i) {
        CHECK(corrupted.samples[i].label == reference.samples[i].label);
        if (corrupted.samples[i].sensors != reference.samples[i].sensors) ++changed;
    }
    CHECK(changed > 0);
}

TEST_CASE("dwell jitter stays within bounds and respects the floor") {
    SimConfig config;
    config.cycles = 20;
    config.dwell = DwellProfile::uniform(2);
    config.noise.dwell_jitter = 1;
    config.seed = 77;
    const LabeledTrace trace = simulate(config);

    // run lengths of identical consecutive vectors must lie in [1, 3]
    std::size_t run = 1;
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
        if (trace.samples[i].sensors == trace.samples[i - 1].sensors) {
            ++run;
        } else {
            CHECK(run >= 1);
            CHECK(run <= 3);
            run = 1;
        }
    }

    SimConfig floored = config;
    floored.dwell = DwellProfile::uniform(1);
    floored.noise.dwell_jitter = 5;
    // all dwells stay >= 1: the trace must still contain every state each pass
    const auto cycles = segment_cycles(simulate(floored));
    CHECK(cycles.size() == static_cast<std::size_t>(floored.cycles));
}

TEST_CASE("config validation") {
    SimConfig config;
    config.cycles = 0;
    CHECK_THROWS_AS(simulate(config), Error);
    config = SimConfig{};
    config.noise.bit_flip_prob = 1.0;
    CHECK_THROWS_AS(simulate(config), Error);
    config = SimConfig{};
    config.dwell.dwell_samples[3] = 0;
    CHECK_THROWS_AS(simulate(config), Error);
}

TEST_CASE("position map holds exactly the four corner vectors") {
    const PositionMap pmap = position_map();
    REQUIRE(pmap.size() == 4);
    const auto& states = canonical_cycle();
    CHECK(pmap.lookup(states[0].sensors) == PositionLabel::A);
    CHECK(pmap.lookup(states[8].sensors) == PositionLabel::B);
    CHECK(pmap.lookup(states[12].sensors) == PositionLabel::C);
    CHECK(pmap.lookup(states[16].sensors) == PositionLabel::D);
    CHECK(!pmap.lookup(SensorVector{}).has_value());

    std::set<PositionLabel> values;
    for (const auto& [v, l] : pmap.entries()) values.insert(l);
    CHECK(values.size() == 4);
}

TEST_CASE("fixture file matches the embedded table") {
    const std::string path = std::string(PLCAUTO_DATA_DIR) + "/conveyor_states.txt";
    const auto parsed = parse_states_file(path);
    const auto& states = canonical_cycle();
    REQUIRE(parsed.size() == states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        CHECK(parsed[i].id == states[i].id);
        CHECK(parsed[i].sensors == states[i].sensors);
        CHECK(parsed[i].label == states[i].label);
        CHECK(parsed[i].description == states[i].description);
    }

    std::ifstream in(path, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    std::ostringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == format_states_fixture(states));
}

TEST_CASE("fixture parser rejects malformed files") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path();
    auto write_tmp = [&](const std::string& name, const std::string& content) {
        const auto path = (dir / name).string();
        std::ofstream out(path);
        out << content;
        return path;
    };
    CHECK_THROWS_AS(parse_states_file("/nonexistent/fixture.txt"), Error);
    CHECK_THROWS_AS(
        parse_states_file(write_tmp("plcauto_fix1.txt", "1 | 10001001000 | A\n")), Error);
    CHECK_THROWS_AS(
        parse_states_file(write_tmp("plcauto_fix2.txt",
                                    "2 | 10001001000 | A | starts at two\n")),
        Error);
    // duplicate vectors rejected
    CHECK_THROWS_AS(parse_states_file(write_tmp(
                        "plcauto_fix3.txt",
                        "1 | 10001001000 | A | one\n2 | 10001001000 | T | two\n")),
                    Error);
}
