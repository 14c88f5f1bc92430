/* plcauto — automaton learning for a PLC-controlled conveying system.
 *
 * C interface to the shared library. All functions that can fail return a
 * plcauto_status; on failure plcauto_last_error() describes what went wrong
 * (the message is thread-local and valid until the next failing call on the
 * same thread). Objects are opaque handles released with the matching
 * *_free function. Strings returned through char** are released with
 * plcauto_string_free.
 */
#ifndef PLCAUTO_H
#define PLCAUTO_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum plcauto_status {
    PLCAUTO_OK = 0,
    PLCAUTO_ERR_USAGE = 1,   /* invalid arguments or configuration */
    PLCAUTO_ERR_DATA = 2,    /* parse, validation or I/O failure */
    PLCAUTO_ERR_NUMERIC = 3, /* non-finite values during training */
} plcauto_status;

const char* plcauto_version(void);
const char* plcauto_last_error(void);
void plcauto_string_free(char* s);

typedef struct plcauto_trace plcauto_trace;
typedef struct plcauto_automaton plcauto_automaton;
typedef struct plcauto_model plcauto_model;

/* ---- plant simulation ------------------------------------------------- */

typedef struct plcauto_sim_config {
    int32_t cycles;        /* passes over the canonical 20-state cycle */
    uint64_t seed;
    int32_t dwell_override; /* 0 = standard profile, >0 = that dwell everywhere */
    double bit_flip_prob;  /* independent per emitted sensor bit, in [0,1) */
    int32_t dwell_jitter;  /* uniform +/- jitter on dwell counts, floored at 1 */
} plcauto_sim_config;

void plcauto_sim_config_default(plcauto_sim_config* cfg);
plcauto_status plcauto_simulate(const plcauto_sim_config* cfg, plcauto_trace** out);

/* ---- traces ------------------------------------------------------------ */

plcauto_status plcauto_trace_read(const char* path, plcauto_trace** out);
plcauto_status plcauto_trace_write(const plcauto_trace* trace, const char* path);
int64_t plcauto_trace_sample_count(const plcauto_trace* trace);
int32_t plcauto_trace_sampling_period_ms(const plcauto_trace* trace);
/* Number of complete cycles (label-A onset to the next onset). Fails on
 * unlabeled traces. */
plcauto_status plcauto_trace_cycle_count(const plcauto_trace* trace, int64_t* out);
/* Copies sample `index` into bits_out[11] and label_out ('A'..'D', 'T', or
 * '?' when unlabeled). Either output pointer may be NULL. */
plcauto_status plcauto_trace_sample(const plcauto_trace* trace, int64_t index,
                                    uint8_t bits_out[11], char* label_out);
void plcauto_trace_free(plcauto_trace* trace);

/* ---- passive learner --------------------------------------------------- */

/* Learns one automaton per cycle using the canonical position map.
 * cycle_index >= 0 selects that cycle; -1 selects the modal automaton over
 * all cycles. */
plcauto_status plcauto_learn_otala(const plcauto_trace* trace, int64_t cycle_index,
                                   plcauto_automaton** out);
/* One line per cycle (states, transitions, closed) plus the modal choice. */
plcauto_status plcauto_otala_summary(const plcauto_trace* trace, char** out_text);

/* ---- sequence classifier ------------------------------------------------ */

typedef struct plcauto_train_config {
    int32_t hidden;        /* hidden units (one LSTM layer) */
    int32_t epochs;        /* full-batch iterations */
    double learning_rate;
    double beta1, beta2, epsilon;
    double init_scale;     /* uniform init range */
    uint64_t seed;
    double train_fraction; /* leading fraction of cycles used for training */
} plcauto_train_config;

void plcauto_train_config_default(plcauto_train_config* cfg);

/* Segments the trace, splits train/test, trains and evaluates; the model
 * records the loss/accuracy history and the pooled test accuracy. */
plcauto_status plcauto_train(const plcauto_trace* trace,
                             const plcauto_train_config* cfg, plcauto_model** out);
plcauto_status plcauto_model_save(const plcauto_model* model, const char* path);
plcauto_status plcauto_model_load(const char* path, plcauto_model** out);
int64_t plcauto_model_history_size(const plcauto_model* model);
plcauto_status plcauto_model_history_entry(const plcauto_model* model, int64_t index,
                                           double* loss, double* train_accuracy);
/* NaN when the model has not been evaluated on a test split. */
double plcauto_model_test_accuracy(const plcauto_model* model);
plcauto_status plcauto_model_history_csv(const plcauto_model* model, const char* path);
void plcauto_model_free(plcauto_model* model);

/* Labels every sample of `trace` with the classifier (the whole trace runs
 * as one sequence) and returns a new trace carrying the predictions. */
plcauto_status plcauto_classify(const plcauto_model* model, const plcauto_trace* trace,
                                plcauto_trace** out);
/* Pooled per-timestep agreement between two equally long labeled traces. */
plcauto_status plcauto_accuracy(const plcauto_trace* predicted,
                                const plcauto_trace* truth, double* out);

/* ---- automata ----------------------------------------------------------- */

int32_t plcauto_automaton_state_count(const plcauto_automaton* a);
int32_t plcauto_automaton_transition_count(const plcauto_automaton* a);
int32_t plcauto_automaton_closed(const plcauto_automaton* a);
/* True when the automaton runs from its initial state through A, B, C, D in
 * cyclic order and back. */
int32_t plcauto_automaton_cycle_closure(const plcauto_automaton* a);
plcauto_status plcauto_automaton_to_json(const plcauto_automaton* a, char** out_text);
plcauto_status plcauto_automaton_from_json(const char* text, plcauto_automaton** out);
plcauto_status plcauto_automaton_to_dot(const plcauto_automaton* a, char** out_text);
plcauto_status plcauto_compare(const plcauto_automaton* a, const plcauto_automaton* b,
                               char** out_report);
void plcauto_automaton_free(plcauto_automaton* a);

/* ---- end-to-end pipeline ------------------------------------------------ */

/* Reads a labeled trace, trains, evaluates, builds the classifier-derived
 * and passively learned automata from `automaton_cycle` (-1 = first test
 * cycle) and writes model.txt, history.csv, both automata as JSON and DOT,
 * and comparison.txt under out_dir. Returns the textual report and,
 * optionally, the trained model. */
plcauto_status plcauto_pipeline_run(const char* trace_path,
                                    const plcauto_train_config* cfg,
                                    int64_t automaton_cycle, const char* out_dir,
                                    char** out_report, plcauto_model** out_model);

#ifdef __cplusplus
}
#endif

#endif /* PLCAUTO_H */
