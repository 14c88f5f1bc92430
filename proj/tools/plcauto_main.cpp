// Command-line front end for the plcauto shared library. Everything here
// goes through the public C API in plcauto.h.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plcauto.h"

namespace {

constexpr int kExitUsage = 1;

int status_exit(plcauto_status status) {
    if (status != PLCAUTO_OK) std::cerr << "error: " << plcauto_last_error() << "\n";
    return static_cast<int>(status);
}

struct TraceDeleter {
    void operator()(plcauto_trace* t) const { plcauto_trace_free(t); }
};
struct ModelDeleter {
    void operator()(plcauto_model* m) const { plcauto_model_free(m); }
};
struct AutomatonDeleter {
    void operator()(plcauto_automaton* a) const { plcauto_automaton_free(a); }
};
using TracePtr = std::unique_ptr<plcauto_trace, TraceDeleter>;
using ModelPtr = std::unique_ptr<plcauto_model, ModelDeleter>;
using AutomatonPtr = std::unique_ptr<plcauto_automaton, AutomatonDeleter>;

std::string take_string(char* s) {
    std::string out = s ? s : "";
    plcauto_string_free(s);
    return out;
}

bool read_text_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

bool write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return static_cast<bool>(out);
}

/// Eight-level unicode sparkline of a series, downsampled to `width` points.
std::string sparkline(const std::vector<double>& values, std::size_t width) {
    static const char* kBlocks[] = {"\xe2\x96\x81", "\xe2\x96\x82", "\xe2\x96\x83",
                                    "\xe2\x96\x84", "\xe2\x96\x85", "\xe2\x96\x86",
                                    "\xe2\x96\x87", "\xe2\x96\x88"};
    if (values.empty()) return "";
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const std::size_t n = std::min(width, values.size());
    std::string out;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t idx = k * (values.size() - 1) / (n > 1 ? n - 1 : 1);
        const double v = values[idx];
        int level = hi > lo ? static_cast<int>((v - lo) / (hi - lo) * 7.0 + 0.5) : 0;
        out += kBlocks[level];
    }
    return out;
}

void print_history_plot(const plcauto_model* model) {
    const int64_t n = plcauto_model_history_size(model);
    std::vector<double> loss, acc;
    loss.reserve(static_cast<std::size_t>(n));
    acc.reserve(static_cast<std::size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
        double l = 0.0, a = 0.0;
        plcauto_model_history_entry(model, i, &l, &a);
        loss.push_back(l);
        acc.push_back(a);
    }
    if (loss.empty()) return;
    std::printf("loss     %s  [%.4f -> %.4f]\n", sparkline(loss, 60).c_str(),
                loss.front(), loss.back());
    std::printf("accuracy %s  [%.4f -> %.4f]\n", sparkline(acc, 60).c_str(), acc.front(),
                acc.back());
}

struct SimArgs {
    std::string out_path;
    plcauto_sim_config cfg{};
};

struct TrainArgs {
    std::string trace_path, model_path, history_path;
    plcauto_train_config cfg{};
    bool ascii_plot = false;
};

struct ClassifyArgs {
    std::string model_path, trace_path, out_path;
};

struct OtalaArgs {
    std::string trace_path, json_path, dot_path;
    int64_t cycle = -1;
    bool summary = false;
};

struct PipelineArgs {
    std::string trace_path, out_dir;
    plcauto_train_config cfg{};
    int64_t cycle = -1;
    bool ascii_plot = false;
};

struct CompareArgs {
    std::string path_a, path_b;
};

struct ExportDotArgs {
    std::string in_path, out_path;
};

int run_simulate(const SimArgs& args) {
    plcauto_trace* raw = nullptr;
    if (auto s = plcauto_simulate(&args.cfg, &raw)) return status_exit(s);
    TracePtr trace(raw);
    if (auto s = plcauto_trace_write(trace.get(), args.out_path.c_str()))
        return status_exit(s);
    int64_t cycles = 0;
    if (auto s = plcauto_trace_cycle_count(trace.get(), &cycles)) return status_exit(s);
    std::printf("wrote %s: %lld samples, %lld cycles, sampling period %d ms\n",
                args.out_path.c_str(),
                static_cast<long long>(plcauto_trace_sample_count(trace.get())),
                static_cast<long long>(cycles),
                plcauto_trace_sampling_period_ms(trace.get()));
    return 0;
}

int run_train(const TrainArgs& args) {
    plcauto_trace* raw_trace = nullptr;
    if (auto s = plcauto_trace_read(args.trace_path.c_str(), &raw_trace))
        return status_exit(s);
    TracePtr trace(raw_trace);
    plcauto_model* raw_model = nullptr;
    if (auto s = plcauto_train(trace.get(), &args.cfg, &raw_model))
        return status_exit(s);
    ModelPtr model(raw_model);
    if (auto s = plcauto_model_save(model.get(), args.model_path.c_str()))
        return status_exit(s);
    if (!args.history_path.empty())
        if (auto s = plcauto_model_history_csv(model.get(), args.history_path.c_str()))
            return status_exit(s);

    const int64_t n = plcauto_model_history_size(model.get());
    double final_loss = 0.0, final_acc = 0.0;
    if (n > 0) plcauto_model_history_entry(model.get(), n - 1, &final_loss, &final_acc);
    std::printf("trained %lld iterations: final loss %.4f, train accuracy %.4f, "
                "test accuracy %.4f\n",
                static_cast<long long>(n), final_loss, final_acc,
                plcauto_model_test_accuracy(model.get()));
    std::printf("wrote %s\n", args.model_path.c_str());
    if (args.ascii_plot) print_history_plot(model.get());
    return 0;
}

int run_classify(const ClassifyArgs& args) {
    plcauto_model* raw_model = nullptr;
    if (auto s = plcauto_model_load(args.model_path.c_str(), &raw_model))
        return status_exit(s);
    ModelPtr model(raw_model);
    plcauto_trace* raw_trace = nullptr;
    if (auto s = plcauto_trace_read(args.trace_path.c_str(), &raw_trace))
        return status_exit(s);
    TracePtr trace(raw_trace);
    plcauto_trace* raw_pred = nullptr;
    if (auto s = plcauto_classify(model.get(), trace.get(), &raw_pred))
        return status_exit(s);
    TracePtr predicted(raw_pred);

    if (!args.out_path.empty()) {
        if (auto s = plcauto_trace_write(predicted.get(), args.out_path.c_str()))
            return status_exit(s);
        std::printf("wrote %s: %lld predicted labels\n", args.out_path.c_str(),
                    static_cast<long long>(plcauto_trace_sample_count(predicted.get())));
    }
    double acc = 0.0;
    if (plcauto_accuracy(predicted.get(), trace.get(), &acc) == PLCAUTO_OK)
        std::printf("accuracy vs input labels: %.4f\n", acc);
    else
        std::printf("input trace is unlabeled; no accuracy to report\n");
    return 0;
}

int emit_automaton(const plcauto_automaton* automaton, const std::string& json_path,
                   const std::string& dot_path) {
    char* text = nullptr;
    if (!json_path.empty()) {
        if (auto s = plcauto_automaton_to_json(automaton, &text)) return status_exit(s);
        const std::string json = take_string(text);
        if (!write_text_file(json_path, json)) {
            std::cerr << "error: cannot write " << json_path << "\n";
            return 2;
        }
        std::printf("wrote %s\n", json_path.c_str());
    }
    if (!dot_path.empty()) {
        if (auto s = plcauto_automaton_to_dot(automaton, &text)) return status_exit(s);
        const std::string dot = take_string(text);
        if (!write_text_file(dot_path, dot)) {
            std::cerr << "error: cannot write " << dot_path << "\n";
            return 2;
        }
        std::printf("wrote %s\n", dot_path.c_str());
    }
    if (json_path.empty() && dot_path.empty()) {
        if (auto s = plcauto_automaton_to_json(automaton, &text)) return status_exit(s);
        std::cout << take_string(text);
    }
    return 0;
}

int run_otala(const OtalaArgs& args) {
    plcauto_trace* raw_trace = nullptr;
    if (auto s = plcauto_trace_read(args.trace_path.c_str(), &raw_trace))
        return status_exit(s);
    TracePtr trace(raw_trace);

    if (args.summary) {
        char* text = nullptr;
        if (auto s = plcauto_otala_summary(trace.get(), &text)) return status_exit(s);
        std::cout << take_string(text);
    }
    plcauto_automaton* raw = nullptr;
    if (auto s = plcauto_learn_otala(trace.get(), args.cycle, &raw))
        return status_exit(s);
    AutomatonPtr automaton(raw);
    std::printf("learned automaton: %d states, %d transitions, %s\n",
                plcauto_automaton_state_count(automaton.get()),
                plcauto_automaton_transition_count(automaton.get()),
                plcauto_automaton_closed(automaton.get()) ? "closed" : "not closed");
    return emit_automaton(automaton.get(), args.json_path, args.dot_path);
}

int run_pipeline_cmd(const PipelineArgs& args) {
    char* report = nullptr;
    plcauto_model* raw_model = nullptr;
    if (auto s = plcauto_pipeline_run(args.trace_path.c_str(), &args.cfg, args.cycle,
                                      args.out_dir.c_str(), &report, &raw_model))
        return status_exit(s);
    ModelPtr model(raw_model);
    std::cout << take_string(report);
    std::printf("artifacts written to %s\n", args.out_dir.c_str());
    if (args.ascii_plot) print_history_plot(model.get());
    return 0;
}

int load_automaton_file(const std::string& path, AutomatonPtr& out) {
    std::string text;
    if (!read_text_file(path, text)) {
        std::cerr << "error: cannot read " << path << "\n";
        return 2;
    }
    plcauto_automaton* raw = nullptr;
    if (auto s = plcauto_automaton_from_json(text.c_str(), &raw)) return status_exit(s);
    out.reset(raw);
    return 0;
}

int run_compare(const CompareArgs& args) {
    AutomatonPtr a, b;
    if (int rc = load_automaton_file(args.path_a, a)) return rc;
    if (int rc = load_automaton_file(args.path_b, b)) return rc;
    char* report = nullptr;
    if (auto s = plcauto_compare(a.get(), b.get(), &report)) return status_exit(s);
    std::cout << take_string(report);
    return 0;
}

int run_export_dot(const ExportDotArgs& args) {
    AutomatonPtr automaton;
    if (int rc = load_automaton_file(args.in_path, automaton)) return rc;
    char* text = nullptr;
    if (auto s = plcauto_automaton_to_dot(automaton.get(), &text)) return status_exit(s);
    const std::string dot = take_string(text);
    if (args.out_path.empty()) {
        std::cout << dot;
    } else {
        if (!write_text_file(args.out_path, dot)) {
            std::cerr << "error: cannot write " << args.out_path << "\n";
            return 2;
        }
        std::printf("wrote %s\n", args.out_path.c_str());
    }
    return 0;
}

void add_train_options(CLI::App* cmd, plcauto_train_config& cfg) {
    cmd->add_option("--hidden", cfg.hidden, "hidden units")->capture_default_str();
    cmd->add_option("--epochs", cfg.epochs, "training iterations")->capture_default_str();
    cmd->add_option("--learning-rate", cfg.learning_rate, "Adam step size")
        ->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "initialization seed")->capture_default_str();
    cmd->add_option("--train-fraction", cfg.train_fraction,
                    "leading fraction of cycles used for training")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"learn and compare automata of a conveying system from sensor traces"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a config file");
    app.allow_config_extras(false);
    app.fallthrough(true);

    SimArgs sim;
    plcauto_sim_config_default(&sim.cfg);
    auto* sim_cmd = app.add_subcommand("simulate", "generate a labeled sensor trace");
    sim_cmd->add_option("--out", sim.out_path, "output trace CSV")->required();
    sim_cmd->add_option("--cycles", sim.cfg.cycles, "conveying cycles")
        ->capture_default_str();
    sim_cmd->add_option("--seed", sim.cfg.seed, "noise seed")->capture_default_str();
    sim_cmd->add_option("--dwell", sim.cfg.dwell_override,
                        "uniform dwell override (0 = standard profile)")
        ->capture_default_str();
    sim_cmd->add_option("--bit-flip-prob", sim.cfg.bit_flip_prob,
                        "per-bit flip probability")
        ->capture_default_str();
    sim_cmd->add_option("--dwell-jitter", sim.cfg.dwell_jitter,
                        "uniform +/- dwell jitter")
        ->capture_default_str();

    TrainArgs train_args;
    plcauto_train_config_default(&train_args.cfg);
    auto* train_cmd = app.add_subcommand("train", "train the sequence classifier");
    train_cmd->add_option("--trace", train_args.trace_path, "labeled trace CSV")
        ->required();
    train_cmd->add_option("--out", train_args.model_path, "model file to write")
        ->required();
    train_cmd->add_option("--history", train_args.history_path,
                          "also write the loss/accuracy history CSV");
    train_cmd->add_flag("--ascii-plot", train_args.ascii_plot,
                        "print a terminal sparkline of the history");
    add_train_options(train_cmd, train_args.cfg);

    ClassifyArgs classify_args;
    auto* classify_cmd =
        app.add_subcommand("classify", "label a trace with a trained model");
    classify_cmd->add_option("--model", classify_args.model_path, "model file")
        ->required();
    classify_cmd->add_option("--trace", classify_args.trace_path, "trace CSV")
        ->required();
    classify_cmd->add_option("--out", classify_args.out_path,
                             "write the predicted trace CSV here");

    OtalaArgs otala_args;
    auto* otala_cmd =
        app.add_subcommand("otala", "passively learn an automaton from a trace");
    otala_cmd->add_option("--trace", otala_args.trace_path, "labeled trace CSV")
        ->required();
    otala_cmd->add_option("--cycle", otala_args.cycle,
                          "cycle to learn from (default: modal over all cycles)");
    otala_cmd->add_option("--out-json", otala_args.json_path, "write automaton JSON");
    otala_cmd->add_option("--out-dot", otala_args.dot_path, "write automaton DOT");
    otala_cmd->add_flag("--summary", otala_args.summary, "print per-cycle results");

    PipelineArgs pipeline_args;
    plcauto_train_config_default(&pipeline_args.cfg);
    auto* pipeline_cmd = app.add_subcommand(
        "pipeline", "segment, split, train, classify, build and compare automata");
    pipeline_cmd->add_option("--trace", pipeline_args.trace_path, "labeled trace CSV")
        ->required();
    pipeline_cmd->add_option("--out-dir", pipeline_args.out_dir, "artifact directory")
        ->required();
    pipeline_cmd->add_option("--cycle", pipeline_args.cycle,
                             "cycle to build automata from (default: first test cycle)");
    pipeline_cmd->add_flag("--ascii-plot", pipeline_args.ascii_plot,
                           "print a terminal sparkline of the history");
    add_train_options(pipeline_cmd, pipeline_args.cfg);

    CompareArgs compare_args;
    auto* compare_cmd = app.add_subcommand("compare", "compare two automaton JSON files");
    compare_cmd->add_option("--a", compare_args.path_a, "first automaton JSON")
        ->required();
    compare_cmd->add_option("--b", compare_args.path_b, "second automaton JSON")
        ->required();

    ExportDotArgs export_args;
    auto* export_cmd =
        app.add_subcommand("export-dot", "render an automaton JSON file as DOT");
    export_cmd->add_option("--in", export_args.in_path, "automaton JSON")->required();
    export_cmd->add_option("--out", export_args.out_path, "DOT file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (sim_cmd->parsed()) return run_simulate(sim);
    if (train_cmd->parsed()) return run_train(train_args);
    if (classify_cmd->parsed()) return run_classify(classify_args);
    if (otala_cmd->parsed()) return run_otala(otala_args);
    if (pipeline_cmd->parsed()) return run_pipeline_cmd(pipeline_args);
    if (compare_cmd->parsed()) return run_compare(compare_args);
    if (export_cmd->parsed()) return run_export_dot(export_args);
    return kExitUsage;
}
