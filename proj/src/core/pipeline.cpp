#include "core/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/otala.hpp"
#include "core/plant_sim.hpp"
#include "core/trace.hpp"

namespace plcauto {

namespace {

template <class F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string("stage '") + name + "': " + e.what());
    }
}

void validate_labeled(std::span<const Cycle> cycles, const char* which) {
    for (std::size_t k = 0; k < cycles.size(); ++k)
        for (std::size_t j = 0; j < cycles[k].samples.size(); ++j)
            if (!cycles[k].samples[j].label)
                throw Error(ErrorKind::data,
                            std::string(which) + " cycle " + std::to_string(k) +
                                " sample " + std::to_string(j) + " has no label");
}

std::string format_f4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

/// Trace slice from a cycle's onset through the next onset inclusive, so
/// automaton builders can see the observation that closes the loop.
std::span<const Sample> inclusive_slice(const LabeledTrace& trace, const Cycle& c) {
    return {trace.samples.data() + c.start_index, c.end_index - c.start_index + 1};
}

}  // namespace

PipelineResult run_pipeline(const LabeledTrace& trace, const PipelineConfig& config) {
    PipelineResult result;
    result.sample_count = trace.samples.size();

    const auto cycles = stage("segment", [&] { return segment_cycles(trace); });
    result.total_cycles = static_cast<int>(cycles.size());

    auto [train_cycles, test_cycles] = stage("split", [&] {
        return split_train_test(cycles, config.train_fraction);
    });
    result.train_cycle_count = static_cast<int>(train_cycles.size());
    result.test_cycle_count = static_cast<int>(test_cycles.size());

    stage("validate", [&] {
        validate_labeled(train_cycles, "training");
        validate_labeled(test_cycles, "test");
        return 0;
    });

    auto [params, history] = stage("train", [&] {
        return train(train_cycles, config.train);
    });

    const double test_accuracy = stage("classify", [&] {
        std::vector<PositionLabel> pooled_pred, pooled_truth;
        for (const Cycle& c : test_cycles) {
            std::vector<SensorVector> seq;
            for (const Sample& s : c.samples) {
                seq.push_back(s.sensors);
                pooled_truth.push_back(*s.label);
            }
            const auto pred = classify_sequence(seq, params);
            pooled_pred.insert(pooled_pred.end(), pred.begin(), pred.end());
        }
        result.test_timesteps = pooled_pred.size();
        return accuracy(pooled_pred, pooled_truth);
    });
    result.test_accuracy = test_accuracy;
    history.test_accuracy = test_accuracy;

    const int cycle_index = config.automaton_cycle.value_or(result.train_cycle_count);
    if (cycle_index < 0 || cycle_index >= result.total_cycles)
        throw Error(ErrorKind::usage,
                    "automaton cycle index " + std::to_string(cycle_index) +
                        " out of range (trace has " + std::to_string(result.total_cycles) +
                        " cycles)");
    result.automaton_cycle_index = cycle_index;
    const Cycle& chosen = cycles[static_cast<std::size_t>(cycle_index)];
    const auto slice = inclusive_slice(trace, chosen);

    result.lstm_automaton = stage("automata", [&] {
        std::vector<SensorVector> seq;
        for (const Sample& s : slice) seq.push_back(s.sensors);
        const auto predicted = classify_sequence(seq, params);
        return build_from_predictions(seq, predicted);
    });
    result.otala_automaton = stage("automata", [&] {
        return learn_otala(to_observations(slice, chosen.start_index), position_map());
    });

    result.report = stage("compare", [&] {
        return compare(result.otala_automaton, result.lstm_automaton);
    });

    result.model.config = config.train;
    result.model.params = std::move(params);
    result.model.history = std::move(history);

    std::ostringstream text;
    text << "pipeline summary\n";
    text << "  input: " << result.sample_count << " samples, " << result.total_cycles
         << " cycles (" << result.train_cycle_count << " train / "
         << result.test_cycle_count << " test)\n";
    text << "  lstm: hidden=" << config.train.hidden << " epochs=" << config.train.epochs
         << " seed=" << config.train.seed << "\n";
    text << "  final training loss " << format_f4(result.model.history.loss.back())
         << ", training accuracy "
         << format_f4(result.model.history.train_accuracy.back()) << "\n";
    text << "  pooled test accuracy " << format_f4(result.test_accuracy) << " over "
         << result.test_timesteps << " timesteps\n";
    text << "  automata built from cycle " << cycle_index << "\n";
    text << format_comparison(result.report, "otala", "lstm");
    result.report_text = text.str();
    return result;
}

std::vector<std::string> write_pipeline_artifacts(const PipelineResult& result,
                                                  const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw Error(ErrorKind::data,
                    "cannot create output directory '" + out_dir + "': " + ec.message());

    auto write_file = [&](const std::string& name, const std::string& content) {
        const std::string path = (fs::path(out_dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorKind::data, "cannot open '" + path + "' for writing");
        out << content;
        if (!out) throw Error(ErrorKind::data, "failed writing '" + path + "'");
        return path;
    };

    std::vector<std::string> paths;
    paths.push_back(write_file("model.txt", format_model(result.model)));
    paths.push_back(write_file("history.csv", format_history_csv(result.model.history)));
    paths.push_back(write_file("automaton_lstm.json", to_json(result.lstm_automaton)));
    paths.push_back(write_file("automaton_lstm.dot", to_dot(result.lstm_automaton)));
    paths.push_back(write_file("automaton_otala.json", to_json(result.otala_automaton)));
    paths.push_back(write_file("automaton_otala.dot", to_dot(result.otala_automaton)));
    paths.push_back(write_file("comparison.txt", result.report_text));
    return paths;
}

}  // namespace plcauto
