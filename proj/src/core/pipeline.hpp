#ifndef PLCAUTO_CORE_PIPELINE_HPP
#define PLCAUTO_CORE_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "core/automaton.hpp"
#include "core/lstm.hpp"
#include "core/types.hpp"

namespace plcauto {

struct PipelineConfig {
    TrainConfig train;
    double train_fraction = 0.8;
    /// Global cycle index both automata are built from; defaults to the
    /// first test cycle.
    std::optional<int> automaton_cycle;
};

struct PipelineResult {
    LstmModel model;  // history.test_accuracy filled in
    double test_accuracy = 0.0;
    std::size_t test_timesteps = 0;
    Automaton lstm_automaton;
    Automaton otala_automaton;
    ComparisonReport report;
    std::string report_text;
    std::size_t sample_count = 0;
    int total_cycles = 0;
    int train_cycle_count = 0;
    int test_cycle_count = 0;
    int automaton_cycle_index = 0;
};

/// Segment, split, validate, train, classify, build both automata from the
/// chosen cycle, compare. Errors carry the failing stage's name.
PipelineResult run_pipeline(const LabeledTrace& trace, const PipelineConfig& config);

/// Writes model.txt, history.csv, automaton_lstm.{json,dot},
/// automaton_otala.{json,dot} and comparison.txt under out_dir (created if
/// missing). Returns the paths written.
std::vector<std::string> write_pipeline_artifacts(const PipelineResult& result,
                                                  const std::string& out_dir);

}  // namespace plcauto

#endif
