#include "plcauto.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include "core/lstm.hpp"
#include "core/otala.hpp"
#include "core/pipeline.hpp"
#include "core/plant_sim.hpp"
#include "core/trace.hpp"
#include "core/types.hpp"

using namespace plcauto;

struct plcauto_trace {
    LabeledTrace value;
};

struct plcauto_automaton {
    Automaton value;
};

struct plcauto_model {
    LstmModel value;
};

namespace {

thread_local std::string g_last_error;

plcauto_status fail(plcauto_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

plcauto_status fail(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::usage: return fail(PLCAUTO_ERR_USAGE, e.what());
        case ErrorKind::numeric: return fail(PLCAUTO_ERR_NUMERIC, e.what());
        case ErrorKind::data: break;
    }
    return fail(PLCAUTO_ERR_DATA, e.what());
}

/// Runs `f`, translating exceptions into status codes.
template <class F>
plcauto_status guarded(F&& f) {
    try {
        f();
        return PLCAUTO_OK;
    } catch (const Error& e) {
        return fail(e);
    } catch (const std::exception& e) {
        return fail(PLCAUTO_ERR_DATA, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

SimConfig to_core(const plcauto_sim_config& cfg) {
    SimConfig core;
    core.cycles = cfg.cycles;
    core.seed = cfg.seed;
    if (cfg.dwell_override < 0)
        throw Error(ErrorKind::usage, "dwell override must be >= 0");
    core.dwell = cfg.dwell_override > 0 ? DwellProfile::uniform(cfg.dwell_override)
                                        : DwellProfile::standard();
    core.noise.bit_flip_prob = cfg.bit_flip_prob;
    core.noise.dwell_jitter = cfg.dwell_jitter;
    return core;
}

TrainConfig to_core_train(const plcauto_train_config& cfg) {
    TrainConfig core;
    core.hidden = cfg.hidden;
    core.epochs = cfg.epochs;
    core.learning_rate = cfg.learning_rate;
    core.beta1 = cfg.beta1;
    core.beta2 = cfg.beta2;
    core.epsilon = cfg.epsilon;
    core.init_scale = cfg.init_scale;
    core.seed = cfg.seed;
    return core;
}

plcauto_status require(bool ok, const char* what) {
    return ok ? PLCAUTO_OK : fail(PLCAUTO_ERR_USAGE, what);
}

}  // namespace

extern "C" {

const char* plcauto_version(void) { return "1.0.0"; }

const char* plcauto_last_error(void) { return g_last_error.c_str(); }

void plcauto_string_free(char* s) { std::free(s); }

void plcauto_sim_config_default(plcauto_sim_config* cfg) {
    if (!cfg) return;
    const SimConfig core;
    cfg->cycles = core.cycles;
    cfg->seed = core.seed;
    cfg->dwell_override = 0;
    cfg->bit_flip_prob = core.noise.bit_flip_prob;
    cfg->dwell_jitter = core.noise.dwell_jitter;
}

plcauto_status plcauto_simulate(const plcauto_sim_config* cfg, plcauto_trace** out) {
    if (auto s = require(cfg && out, "plcauto_simulate: NULL argument")) return s;
    return guarded([&] { *out = new plcauto_trace{simulate(to_core(*cfg))}; });
}

plcauto_status plcauto_trace_read(const char* path, plcauto_trace** out) {
    if (auto s = require(path && out, "plcauto_trace_read: NULL argument")) return s;
    return guarded([&] { *out = new plcauto_trace{read_trace_file(path)}; });
}

plcauto_status plcauto_trace_write(const plcauto_trace* trace, const char* path) {
    if (auto s = require(trace && path, "plcauto_trace_write: NULL argument")) return s;
    return guarded([&] { write_trace_file(trace->value, path); });
}

int64_t plcauto_trace_sample_count(const plcauto_trace* trace) {
    return trace ? static_cast<int64_t>(trace->value.samples.size()) : 0;
}

int32_t plcauto_trace_sampling_period_ms(const plcauto_trace* trace) {
    return trace ? trace->value.sampling_period_ms : 0;
}

plcauto_status plcauto_trace_cycle_count(const plcauto_trace* trace, int64_t* out) {
    if (auto s = require(trace && out, "plcauto_trace_cycle_count: NULL argument"))
        return s;
    return guarded(
        [&] { *out = static_cast<int64_t>(segment_cycles(trace->value).size()); });
}

plcauto_status plcauto_trace_sample(const plcauto_trace* trace, int64_t index,
                                    uint8_t bits_out[11], char* label_out) {
    if (auto s = require(trace != nullptr, "plcauto_trace_sample: NULL trace")) return s;
    if (index < 0 || index >= static_cast<int64_t>(trace->value.samples.size()))
        return fail(PLCAUTO_ERR_USAGE, "plcauto_trace_sample: index out of range");
    const Sample& sample = trace->value.samples[static_cast<std::size_t>(index)];
    if (bits_out)
        for (int i = 0; i < kSensorCount; ++i) bits_out[i] = sample.sensors.bit(i);
    if (label_out) *label_out = sample.label ? label_to_char(*sample.label) : '?';
    return PLCAUTO_OK;
}

void plcauto_trace_free(plcauto_trace* trace) { delete trace; }

plcauto_status plcauto_learn_otala(const plcauto_trace* trace, int64_t cycle_index,
                                   plcauto_automaton** out) {
    if (auto s = require(trace && out, "plcauto_learn_otala: NULL argument")) return s;
    return guarded([&] {
        const auto pmap = position_map();
        if (cycle_index < 0) {
            *out = new plcauto_automaton{learn_modal(trace->value, pmap).best};
            return;
        }
        const auto per_cycle = learn_per_cycle(trace->value, pmap);
        if (cycle_index >= static_cast<int64_t>(per_cycle.size()))
            throw Error(ErrorKind::usage,
                        "cycle index " + std::to_string(cycle_index) +
                            " out of range (trace has " + std::to_string(per_cycle.size()) +
                            " complete cycles)");
        *out = new plcauto_automaton{per_cycle[static_cast<std::size_t>(cycle_index)].automaton};
    });
}

plcauto_status plcauto_otala_summary(const plcauto_trace* trace, char** out_text) {
    if (auto s = require(trace && out_text, "plcauto_otala_summary: NULL argument"))
        return s;
    return guarded([&] {
        const auto modal = learn_modal(trace->value, position_map());
        std::string text;
        for (const auto& entry : modal.per_cycle) {
            const Automaton& a = entry.automaton;
            text += "cycle " + std::to_string(entry.cycle_index) + ": " +
                    std::to_string(a.states.size()) + " states, " +
                    std::to_string(a.transitions.size()) + " transitions, " +
                    (a.closed ? "closed" : "not closed");
            if (a == modal.best) text += "  [modal]";
            text += "\n";
        }
        text += "modal automaton: cycle " + std::to_string(modal.best_cycle_index) +
                ", seen in " + std::to_string(modal.frequency) + " of " +
                std::to_string(modal.per_cycle.size()) + " cycles\n";
        *out_text = dup_string(text);
    });
}

void plcauto_train_config_default(plcauto_train_config* cfg) {
    if (!cfg) return;
    const TrainConfig core;
    cfg->hidden = core.hidden;
    cfg->epochs = core.epochs;
    cfg->learning_rate = core.learning_rate;
    cfg->beta1 = core.beta1;
    cfg->beta2 = core.beta2;
    cfg->epsilon = core.epsilon;
    cfg->init_scale = core.init_scale;
    cfg->seed = core.seed;
    cfg->train_fraction = 0.8;
}

plcauto_status plcauto_train(const plcauto_trace* trace,
                             const plcauto_train_config* cfg, plcauto_model** out) {
    if (auto s = require(trace && cfg && out, "plcauto_train: NULL argument")) return s;
    return guarded([&] {
        const auto cycles = segment_cycles(trace->value);
        auto [train_cycles, test_cycles] = split_train_test(cycles, cfg->train_fraction);
        auto [params, history] = train(train_cycles, to_core_train(*cfg));

        std::vector<PositionLabel> pooled_pred, pooled_truth;
        for (const Cycle& c : test_cycles) {
            std::vector<SensorVector> seq;
            for (const Sample& s : c.samples) {
                if (!s.label)
                    throw Error(ErrorKind::data, "test cycle contains unlabeled samples");
                seq.push_back(s.sensors);
                pooled_truth.push_back(*s.label);
            }
            const auto pred = classify_sequence(seq, params);
            pooled_pred.insert(pooled_pred.end(), pred.begin(), pred.end());
        }
        history.test_accuracy = accuracy(pooled_pred, pooled_truth);

        LstmModel model;
        model.config = to_core_train(*cfg);
        model.params = std::move(params);
        model.history = std::move(history);
        *out = new plcauto_model{std::move(model)};
    });
}

plcauto_status plcauto_model_save(const plcauto_model* model, const char* path) {
    if (auto s = require(model && path, "plcauto_model_save: NULL argument")) return s;
    return guarded([&] { save_model(model->value, path); });
}

plcauto_status plcauto_model_load(const char* path, plcauto_model** out) {
    if (auto s = require(path && out, "plcauto_model_load: NULL argument")) return s;
    return guarded([&] { *out = new plcauto_model{load_model(path)}; });
}

int64_t plcauto_model_history_size(const plcauto_model* model) {
    return model ? static_cast<int64_t>(model->value.history.loss.size()) : 0;
}

plcauto_status plcauto_model_history_entry(const plcauto_model* model, int64_t index,
                                           double* loss, double* train_accuracy) {
    if (auto s = require(model != nullptr, "plcauto_model_history_entry: NULL model"))
        return s;
    if (index < 0 || index >= plcauto_model_history_size(model))
        return fail(PLCAUTO_ERR_USAGE, "plcauto_model_history_entry: index out of range");
    if (loss) *loss = model->value.history.loss[static_cast<std::size_t>(index)];
    if (train_accuracy)
        *train_accuracy = model->value.history.train_accuracy[static_cast<std::size_t>(index)];
    return PLCAUTO_OK;
}

double plcauto_model_test_accuracy(const plcauto_model* model) {
    if (!model || !model->value.history.test_accuracy)
        return std::nan("");
    return *model->value.history.test_accuracy;
}

plcauto_status plcauto_model_history_csv(const plcauto_model* model, const char* path) {
    if (auto s = require(model && path, "plcauto_model_history_csv: NULL argument"))
        return s;
    return guarded([&] {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorKind::data, std::string("cannot open '") + path + "'");
        out << format_history_csv(model->value.history);
        if (!out)
            throw Error(ErrorKind::data, std::string("failed writing '") + path + "'");
    });
}

void plcauto_model_free(plcauto_model* model) { delete model; }

plcauto_status plcauto_classify(const plcauto_model* model, const plcauto_trace* trace,
                                plcauto_trace** out) {
    if (auto s = require(model && trace && out, "plcauto_classify: NULL argument"))
        return s;
    return guarded([&] {
        std::vector<SensorVector> seq;
        seq.reserve(trace->value.samples.size());
        for (const Sample& s : trace->value.samples) seq.push_back(s.sensors);
        const auto pred = classify_sequence(seq, model->value.params);
        LabeledTrace labeled;
        labeled.sampling_period_ms = trace->value.sampling_period_ms;
        labeled.samples.reserve(seq.size());
        for (std::size_t t = 0; t < seq.size(); ++t)
            labeled.samples.push_back(Sample{seq[t], pred[t]});
        *out = new plcauto_trace{std::move(labeled)};
    });
}

plcauto_status plcauto_accuracy(const plcauto_trace* predicted,
                                const plcauto_trace* truth, double* out) {
    if (auto s = require(predicted && truth && out, "plcauto_accuracy: NULL argument"))
        return s;
    return guarded([&] {
        auto labels = [](const LabeledTrace& t) {
            std::vector<PositionLabel> out_labels;
            out_labels.reserve(t.samples.size());
            for (const Sample& s : t.samples) {
                if (!s.label)
                    throw Error(ErrorKind::data, "accuracy needs fully labeled traces");
                out_labels.push_back(*s.label);
            }
            return out_labels;
        };
        *out = accuracy(labels(predicted->value), labels(truth->value));
    });
}

int32_t plcauto_automaton_state_count(const plcauto_automaton* a) {
    return a ? static_cast<int32_t>(a->value.states.size()) : 0;
}

int32_t plcauto_automaton_transition_count(const plcauto_automaton* a) {
    return a ? static_cast<int32_t>(a->value.transitions.size()) : 0;
}

int32_t plcauto_automaton_closed(const plcauto_automaton* a) {
    return a && a->value.closed ? 1 : 0;
}

int32_t plcauto_automaton_cycle_closure(const plcauto_automaton* a) {
    return a && check_cycle_closure(a->value) ? 1 : 0;
}

plcauto_status plcauto_automaton_to_json(const plcauto_automaton* a, char** out_text) {
    if (auto s = require(a && out_text, "plcauto_automaton_to_json: NULL argument"))
        return s;
    return guarded([&] { *out_text = dup_string(to_json(a->value)); });
}

plcauto_status plcauto_automaton_from_json(const char* text, plcauto_automaton** out) {
    if (auto s = require(text && out, "plcauto_automaton_from_json: NULL argument"))
        return s;
    return guarded([&] { *out = new plcauto_automaton{from_json(text)}; });
}

plcauto_status plcauto_automaton_to_dot(const plcauto_automaton* a, char** out_text) {
    if (auto s = require(a && out_text, "plcauto_automaton_to_dot: NULL argument"))
        return s;
    return guarded([&] { *out_text = dup_string(to_dot(a->value)); });
}

plcauto_status plcauto_compare(const plcauto_automaton* a, const plcauto_automaton* b,
                               char** out_report) {
    if (auto s = require(a && b && out_report, "plcauto_compare: NULL argument")) return s;
    return guarded([&] {
        *out_report = dup_string(format_comparison(compare(a->value, b->value)));
    });
}

void plcauto_automaton_free(plcauto_automaton* a) { delete a; }

plcauto_status plcauto_pipeline_run(const char* trace_path,
                                    const plcauto_train_config* cfg,
                                    int64_t automaton_cycle, const char* out_dir,
                                    char** out_report, plcauto_model** out_model) {
    if (auto s = require(trace_path && cfg && out_dir, "plcauto_pipeline_run: NULL argument"))
        return s;
    return guarded([&] {
        const LabeledTrace trace = read_trace_file(trace_path);
        PipelineConfig config;
        config.train = to_core_train(*cfg);
        config.train_fraction = cfg->train_fraction;
        if (automaton_cycle >= 0) config.automaton_cycle = static_cast<int>(automaton_cycle);
        PipelineResult result = run_pipeline(trace, config);
        write_pipeline_artifacts(result, out_dir);
        if (out_report) *out_report = dup_string(result.report_text);
        if (out_model) *out_model = new plcauto_model{std::move(result.model)};
    });
}

}  // extern "C"
