#ifndef PLCAUTO_CORE_LSTM_HPP
#define PLCAUTO_CORE_LSTM_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "core/types.hpp"

namespace plcauto {

/// Input, recurrent and bias parameters of one gate.
struct GateWeights {
    Eigen::MatrixXd w_x;  // hidden x 11
    Eigen::MatrixXd w_h;  // hidden x hidden
    Eigen::VectorXd b;    // hidden
};

/// Full parameter set of the sequence classifier: four gates plus the linear
/// class readout.
struct LstmParams {
    GateWeights in_gate, forget_gate, out_gate, cell_gate;
    Eigen::MatrixXd w_out;  // 5 x hidden
    Eigen::VectorXd b_out;  // 5

    int hidden_size() const { return static_cast<int>(in_gate.b.size()); }

    static LstmParams zeros(int hidden);
};

/// Flat view over one parameter tensor; tensor_views() enumerates all 14 in
/// a fixed order, which pins initialization draws and the model file layout.
struct TensorView {
    const char* name;
    double* data;
    Eigen::Index size;
    Eigen::Index rows, cols;
};

struct ConstTensorView {
    const char* name;
    const double* data;
    Eigen::Index size;
    Eigen::Index rows, cols;
};

std::vector<TensorView> tensor_views(LstmParams& p);
std::vector<ConstTensorView> tensor_views(const LstmParams& p);

struct TrainConfig {
    int hidden = 50;
    int num_layers = 1;  // anything but 1 is rejected
    int epochs = 1000;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double init_scale = 0.08;
    double forget_bias_offset = 1.0;
    std::uint64_t seed = 42;
};

void validate_config(const TrainConfig& cfg);

struct AdamState {
    LstmParams m, v;
    long t = 0;

    static AdamState zeros(int hidden);
};

struct TrainHistory {
    std::vector<double> loss;            // one entry per iteration, pre-update
    std::vector<double> train_accuracy;  // pooled per-timestep, pre-update
    std::optional<double> test_accuracy;
};

/// Intermediate activations of one cell step, kept for backpropagation.
struct StepCache {
    Eigen::VectorXd x, h_prev, c_prev;
    Eigen::VectorXd i, f, o, g, c, tanh_c, h;
};

struct CellOutput {
    Eigen::VectorXd h, c;
    StepCache cache;
};

Eigen::VectorXd to_features(const SensorVector& v);

/// One step of the standard forget-gate LSTM (no peepholes):
///   i = sigmoid(Wi x + Ui h + bi)     f = sigmoid(Wf x + Uf h + bf)
///   o = sigmoid(Wo x + Uo h + bo)     g = tanh(Wg x + Ug h + bg)
///   c = f.c_prev + i.g                h = o.tanh(c)
CellOutput forward_cell(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
                        const Eigen::VectorXd& c_prev, const LstmParams& p);

/// Runs the cell from h0 = c0 = 0 and applies the class readout at every
/// step. Returns a T x 5 matrix of logits.
Eigen::MatrixXd forward_sequence(std::span<const SensorVector> seq, const LstmParams& p);

/// Numerically stable softmax (max subtraction); entries positive, sum 1.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

/// Mean over timesteps of -ln p_t[label_t]; probabilities are clamped at
/// 1e-12 inside the log.
double sequence_loss(const Eigen::MatrixXd& probs, std::span<const PositionLabel> labels);

/// Gradient of sequence_loss(softmax(forward_sequence(seq)), labels) with
/// respect to every parameter, via backpropagation through time.
LstmParams backward_sequence(std::span<const SensorVector> seq,
                             std::span<const PositionLabel> labels, const LstmParams& p);

/// Scalar Adam update; returns the new parameter value and advances m and v
/// in place. `t` is the already-incremented step counter.
double adam_update_coeff(double theta, double grad, double& m, double& v, long t,
                         const TrainConfig& cfg);

/// Applies one Adam step to every parameter.
void adam_step(LstmParams& p, const LstmParams& grads, AdamState& state,
               const TrainConfig& cfg);

/// Uniform [-init_scale, init_scale] initialization in tensor_views order,
/// then the forget-gate bias offset.
LstmParams init_params(const TrainConfig& cfg);

/// Full-batch training: each iteration averages the per-cycle gradients
/// (every cycle's loss is already timestep-averaged) and takes one Adam
/// step. Deterministic given the config. Throws ErrorKind::numeric if loss
/// or gradients go non-finite.
std::pair<LstmParams, TrainHistory> train(std::span<const Cycle> train_cycles,
                                          const TrainConfig& cfg);

/// Per-timestep argmax labels; ties resolve to the lowest class index in the
/// fixed order A, B, C, D, Transition.
std::vector<PositionLabel> classify_sequence(std::span<const SensorVector> seq,
                                             const LstmParams& p);

/// Fraction of timesteps whose labels agree. Throws on length mismatch or
/// empty input.
double accuracy(std::span<const PositionLabel> predicted,
                std::span<const PositionLabel> truth);

/// A trained classifier with its provenance: configuration, parameters and
/// the loss/accuracy series recorded during training.
struct LstmModel {
    TrainConfig config;
    LstmParams params;
    TrainHistory history;
};

std::string format_model(const LstmModel& model);
LstmModel parse_model(const std::string& text);
void save_model(const LstmModel& model, const std::string& path);
LstmModel load_model(const std::string& path);

/// CSV with one row per training iteration: iteration,loss,train_accuracy.
std::string format_history_csv(const TrainHistory& history);

}  // namespace plcauto

#endif
