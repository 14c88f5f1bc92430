#include "core/lstm.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/rng.hpp"

namespace plcauto {

namespace {

constexpr double kProbFloor = 1e-12;

Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) {
    return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

GateWeights zero_gate(int hidden) {
    GateWeights g;
    g.w_x = Eigen::MatrixXd::Zero(hidden, kSensorCount);
    g.w_h = Eigen::MatrixXd::Zero(hidden, hidden);
    g.b = Eigen::VectorXd::Zero(hidden);
    return g;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_f4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

LstmParams LstmParams::zeros(int hidden) {
    if (hidden < 1) throw Error(ErrorKind::usage, "hidden size must be >= 1");
    LstmParams p;
    p.in_gate = zero_gate(hidden);
    p.forget_gate = zero_gate(hidden);
    p.out_gate = zero_gate(hidden);
    p.cell_gate = zero_gate(hidden);
    p.w_out = Eigen::MatrixXd::Zero(kClassCount, hidden);
    p.b_out = Eigen::VectorXd::Zero(kClassCount);
    return p;
}

namespace {

template <class Params, class View>
std::vector<View> make_views(Params& p) {
    std::vector<View> views;
    views.reserve(14);
    static const char* kNames[] = {"w_xi", "w_hi", "b_i", "w_xf", "w_hf", "b_f",
                                   "w_xo", "w_ho", "b_o", "w_xg", "w_hg", "b_g",
                                   "w_out", "b_out"};
    int n = 0;
    for (auto* gate : {&p.in_gate, &p.forget_gate, &p.out_gate, &p.cell_gate}) {
        views.push_back({kNames[n++], gate->w_x.data(), gate->w_x.size(),
                         gate->w_x.rows(), gate->w_x.cols()});
        views.push_back({kNames[n++], gate->w_h.data(), gate->w_h.size(),
                         gate->w_h.rows(), gate->w_h.cols()});
        views.push_back({kNames[n++], gate->b.data(), gate->b.size(), gate->b.rows(), 1});
    }
    views.push_back({kNames[n++], p.w_out.data(), p.w_out.size(), p.w_out.rows(),
                     p.w_out.cols()});
    views.push_back({kNames[n++], p.b_out.data(), p.b_out.size(), p.b_out.rows(), 1});
    return views;
}

}  // namespace

std::vector<TensorView> tensor_views(LstmParams& p) {
    return make_views<LstmParams, TensorView>(p);
}

std::vector<ConstTensorView> tensor_views(const LstmParams& p) {
    return make_views<const LstmParams, ConstTensorView>(p);
}

void validate_config(const TrainConfig& cfg) {
    if (cfg.hidden < 1) throw Error(ErrorKind::usage, "hidden size must be >= 1");
    if (cfg.num_layers != 1)
        throw Error(ErrorKind::usage, "only a single LSTM layer is supported");
    if (cfg.epochs < 1) throw Error(ErrorKind::usage, "epochs must be >= 1");
    if (!(cfg.learning_rate > 0.0))
        throw Error(ErrorKind::usage, "learning rate must be positive");
    if (!(cfg.beta1 > 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 > 0.0 && cfg.beta2 < 1.0))
        throw Error(ErrorKind::usage, "beta1 and beta2 must lie strictly between 0 and 1");
    if (!(cfg.epsilon > 0.0)) throw Error(ErrorKind::usage, "epsilon must be positive");
    if (!(cfg.init_scale > 0.0))
        throw Error(ErrorKind::usage, "init scale must be positive");
}

AdamState AdamState::zeros(int hidden) {
    AdamState s;
    s.m = LstmParams::zeros(hidden);
    s.v = LstmParams::zeros(hidden);
    s.t = 0;
    return s;
}

Eigen::VectorXd to_features(const SensorVector& v) {
    Eigen::VectorXd x(kSensorCount);
    for (int i = 0; i < kSensorCount; ++i) x(i) = static_cast<double>(v.bit(i));
    return x;
}

CellOutput forward_cell(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
                        const Eigen::VectorXd& c_prev, const LstmParams& p) {
    const int hidden = p.hidden_size();
    if (x.size() != kSensorCount || h_prev.size() != hidden || c_prev.size() != hidden)
        throw Error(ErrorKind::usage, "forward_cell: dimension mismatch");

    StepCache cache;
    cache.x = x;
    cache.h_prev = h_prev;
    cache.c_prev = c_prev;
    cache.i = sigmoid(p.in_gate.w_x * x + p.in_gate.w_h * h_prev + p.in_gate.b);
    cache.f = sigmoid(p.forget_gate.w_x * x + p.forget_gate.w_h * h_prev + p.forget_gate.b);
    cache.o = sigmoid(p.out_gate.w_x * x + p.out_gate.w_h * h_prev + p.out_gate.b);
    cache.g = (p.cell_gate.w_x * x + p.cell_gate.w_h * h_prev + p.cell_gate.b)
                  .array()
                  .tanh()
                  .matrix();
    cache.c =
        (cache.f.array() * c_prev.array() + cache.i.array() * cache.g.array()).matrix();
    cache.tanh_c = cache.c.array().tanh().matrix();
    cache.h = (cache.o.array() * cache.tanh_c.array()).matrix();

    CellOutput out;
    out.h = cache.h;
    out.c = cache.c;
    out.cache = std::move(cache);
    return out;
}

namespace {

struct SequenceForward {
    Eigen::MatrixXd logits;            // T x 5
    std::vector<StepCache> steps;      // empty unless caching requested
};

SequenceForward run_forward(std::span<const SensorVector> seq, const LstmParams& p,
                            bool keep_cache) {
    if (seq.empty())
        throw Error(ErrorKind::data, "cannot run the classifier on an empty sequence");
    const int hidden = p.hidden_size();
    const auto t_len = static_cast<Eigen::Index>(seq.size());

    SequenceForward result;
    result.logits.resize(t_len, kClassCount);
    if (keep_cache) result.steps.reserve(seq.size());

    Eigen::VectorXd h = Eigen::VectorXd::Zero(hidden);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(hidden);
    for (Eigen::Index t = 0; t < t_len; ++t) {
        auto out = forward_cell(to_features(seq[static_cast<std::size_t>(t)]), h, c, p);
        h = out.h;
        c = out.c;
        result.logits.row(t) = (p.w_out * h + p.b_out).transpose();
        if (keep_cache) result.steps.push_back(std::move(out.cache));
    }
    return result;
}

int class_index(PositionLabel l) { return static_cast<int>(l); }

/// Loss, pooled correct count and parameter gradients for one sequence.
double sequence_grad(std::span<const SensorVector> seq,
                     std::span<const PositionLabel> labels, const LstmParams& p,
                     LstmParams& grad, std::size_t* correct_out) {
    if (seq.size() != labels.size())
        throw Error(ErrorKind::data, "sequence and labels differ in length");
    const auto fwd = run_forward(seq, p, true);
    const auto t_len = static_cast<Eigen::Index>(seq.size());
    const int hidden = p.hidden_size();
    const double inv_t = 1.0 / static_cast<double>(t_len);

    double loss = 0.0;
    std::size_t correct = 0;

    // dL/dlogits for the timestep-averaged cross-entropy.
    Eigen::MatrixXd dlogits(t_len, kClassCount);
    for (Eigen::Index t = 0; t < t_len; ++t) {
        const Eigen::VectorXd probs = softmax(fwd.logits.row(t).transpose());
        const int truth = class_index(labels[static_cast<std::size_t>(t)]);
        loss += -std::log(std::max(probs(truth), kProbFloor));

        int arg = 0;
        for (int c = 1; c < kClassCount; ++c)
            if (fwd.logits(t, c) > fwd.logits(t, arg)) arg = c;
        if (arg == truth) ++correct;

        Eigen::VectorXd d = probs;
        d(truth) -= 1.0;
        dlogits.row(t) = (d * inv_t).transpose();
    }
    loss *= inv_t;

    // Backward through the readout and the unrolled cells.
    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(hidden);
    Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(hidden);
    for (Eigen::Index t = t_len - 1; t >= 0; --t) {
        const StepCache& s = fwd.steps[static_cast<std::size_t>(t)];
        const Eigen::VectorXd dz = dlogits.row(t).transpose();
        grad.w_out.noalias() += dz * s.h.transpose();
        grad.b_out += dz;

        const Eigen::VectorXd dh = p.w_out.transpose() * dz + dh_next;
        const Eigen::ArrayXd dc =
            dh.array() * s.o.array() * (1.0 - s.tanh_c.array().square()) +
            dc_next.array();

        const Eigen::ArrayXd da_o =
            dh.array() * s.tanh_c.array() * s.o.array() * (1.0 - s.o.array());
        const Eigen::ArrayXd da_i = dc * s.g.array() * s.i.array() * (1.0 - s.i.array());
        const Eigen::ArrayXd da_f =
            dc * s.c_prev.array() * s.f.array() * (1.0 - s.f.array());
        const Eigen::ArrayXd da_g = dc * s.i.array() * (1.0 - s.g.array().square());

        const Eigen::VectorXd va_i = da_i.matrix(), va_f = da_f.matrix(),
                              va_o = da_o.matrix(), va_g = da_g.matrix();

        grad.in_gate.w_x.noalias() += va_i * s.x.transpose();
        grad.in_gate.w_h.noalias() += va_i * s.h_prev.transpose();
        grad.in_gate.b += va_i;
        grad.forget_gate.w_x.noalias() += va_f * s.x.transpose();
        grad.forget_gate.w_h.noalias() += va_f * s.h_prev.transpose();
        grad.forget_gate.b += va_f;
        grad.out_gate.w_x.noalias() += va_o * s.x.transpose();
        grad.out_gate.w_h.noalias() += va_o * s.h_prev.transpose();
        grad.out_gate.b += va_o;
        grad.cell_gate.w_x.noalias() += va_g * s.x.transpose();
        grad.cell_gate.w_h.noalias() += va_g * s.h_prev.transpose();
        grad.cell_gate.b += va_g;

        dh_next = p.in_gate.w_h.transpose() * va_i + p.forget_gate.w_h.transpose() * va_f +
                  p.out_gate.w_h.transpose() * va_o + p.cell_gate.w_h.transpose() * va_g;
        dc_next = (dc * s.f.array()).matrix();
    }

    if (correct_out) *correct_out = correct;
    return loss;
}

void add_scaled(LstmParams& dst, const LstmParams& src, double scale) {
    auto d = tensor_views(dst);
    auto s = tensor_views(src);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (Eigen::Index k = 0; k < d[i].size; ++k) d[i].data[k] += scale * s[i].data[k];
}

bool all_finite(const LstmParams& p) {
    for (const auto& view : tensor_views(p))
        for (Eigen::Index k = 0; k < view.size; ++k)
            if (!std::isfinite(view.data[k])) return false;
    return true;
}

}  // namespace

Eigen::MatrixXd forward_sequence(std::span<const SensorVector> seq, const LstmParams& p) {
    return run_forward(seq, p, false).logits;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    const double m = logits.maxCoeff();
    Eigen::ArrayXd e = (logits.array() - m).exp();
    return (e / e.sum()).matrix();
}

double sequence_loss(const Eigen::MatrixXd& probs, std::span<const PositionLabel> labels) {
    if (probs.rows() != static_cast<Eigen::Index>(labels.size()))
        throw Error(ErrorKind::data, "probability rows and labels differ in length");
    if (labels.empty()) throw Error(ErrorKind::data, "sequence loss needs at least one step");
    double loss = 0.0;
    for (Eigen::Index t = 0; t < probs.rows(); ++t) {
        const int truth = class_index(labels[static_cast<std::size_t>(t)]);
        loss += -std::log(std::max(probs(t, truth), kProbFloor));
    }
    return loss / static_cast<double>(probs.rows());
}

LstmParams backward_sequence(std::span<const SensorVector> seq,
                             std::span<const PositionLabel> labels, const LstmParams& p) {
    LstmParams grad = LstmParams::zeros(p.hidden_size());
    sequence_grad(seq, labels, p, grad, nullptr);
    return grad;
}

double adam_update_coeff(double theta, double grad, double& m, double& v, long t,
                         const TrainConfig& cfg) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad * grad;
    const double m_hat = m / (1.0 - std::pow(cfg.beta1, static_cast<double>(t)));
    const double v_hat = v / (1.0 - std::pow(cfg.beta2, static_cast<double>(t)));
    return theta - cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
}

void adam_step(LstmParams& p, const LstmParams& grads, AdamState& state,
               const TrainConfig& cfg) {
    ++state.t;
    auto vp = tensor_views(p);
    auto vg = tensor_views(grads);
    auto vm = tensor_views(state.m);
    auto vv = tensor_views(state.v);
    for (std::size_t i = 0; i < vp.size(); ++i) {
        if (vp[i].size != vg[i].size)
            throw Error(ErrorKind::usage, "adam_step: gradient shape mismatch");
        for (Eigen::Index k = 0; k < vp[i].size; ++k)
            vp[i].data[k] = adam_update_coeff(vp[i].data[k], vg[i].data[k], vm[i].data[k],
                                              vv[i].data[k], state.t, cfg);
    }
}

LstmParams init_params(const TrainConfig& cfg) {
    validate_config(cfg);
    LstmParams p = LstmParams::zeros(cfg.hidden);
    Rng rng(cfg.seed);
    for (auto& view : tensor_views(p))
        for (Eigen::Index k = 0; k < view.size; ++k)
            view.data[k] = rng.uniform(-cfg.init_scale, cfg.init_scale);
    p.forget_gate.b.array() += cfg.forget_bias_offset;
    return p;
}

std::pair<LstmParams, TrainHistory> train(std::span<const Cycle> train_cycles,
                                          const TrainConfig& cfg) {
    validate_config(cfg);
    if (train_cycles.empty())
        throw Error(ErrorKind::data, "training needs at least one cycle");

    // Materialize features and labels once per cycle.
    std::vector<std::vector<SensorVector>> xs;
    std::vector<std::vector<PositionLabel>> ys;
    for (std::size_t k = 0; k < train_cycles.size(); ++k) {
        std::vector<SensorVector> x;
        std::vector<PositionLabel> y;
        for (std::size_t j = 0; j < train_cycles[k].samples.size(); ++j) {
            const Sample& s = train_cycles[k].samples[j];
            if (!s.label)
                throw Error(ErrorKind::data, "training cycle " + std::to_string(k) +
                                                 " sample " + std::to_string(j) +
                                                 " has no label");
            x.push_back(s.sensors);
            y.push_back(*s.label);
        }
        if (x.empty())
            throw Error(ErrorKind::data,
                        "training cycle " + std::to_string(k) + " is empty");
        xs.push_back(std::move(x));
        ys.push_back(std::move(y));
    }

    LstmParams params = init_params(cfg);
    AdamState state = AdamState::zeros(cfg.hidden);
    TrainHistory history;
    history.loss.reserve(static_cast<std::size_t>(cfg.epochs));
    history.train_accuracy.reserve(static_cast<std::size_t>(cfg.epochs));

    const double inv_k = 1.0 / static_cast<double>(train_cycles.size());
    for (int iter = 0; iter < cfg.epochs; ++iter) {
        LstmParams grad = LstmParams::zeros(cfg.hidden);
        double loss_sum = 0.0;
        std::size_t correct = 0, total = 0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            LstmParams cycle_grad = LstmParams::zeros(cfg.hidden);
            std::size_t cycle_correct = 0;
            loss_sum += sequence_grad(xs[k], ys[k], params, cycle_grad, &cycle_correct);
            add_scaled(grad, cycle_grad, inv_k);
            correct += cycle_correct;
            total += xs[k].size();
        }
        const double loss = loss_sum * inv_k;
        if (!std::isfinite(loss) || !all_finite(grad))
            throw Error(ErrorKind::numeric, "non-finite loss or gradient at iteration " +
                                                std::to_string(iter) + " (NaN guard)");
        history.loss.push_back(loss);
        history.train_accuracy.push_back(static_cast<double>(correct) /
                                         static_cast<double>(total));
        adam_step(params, grad, state, cfg);
    }
    return {std::move(params), std::move(history)};
}

std::vector<PositionLabel> classify_sequence(std::span<const SensorVector> seq,
                                             const LstmParams& p) {
    const Eigen::MatrixXd logits = forward_sequence(seq, p);
    std::vector<PositionLabel> out;
    out.reserve(seq.size());
    for (Eigen::Index t = 0; t < logits.rows(); ++t) {
        int best = 0;
        for (int c = 1; c < kClassCount; ++c)
            if (logits(t, c) > logits(t, best)) best = c;
        out.push_back(static_cast<PositionLabel>(best));
    }
    return out;
}

double accuracy(std::span<const PositionLabel> predicted,
                std::span<const PositionLabel> truth) {
    if (predicted.size() != truth.size())
        throw Error(ErrorKind::data, "prediction and truth differ in length");
    if (predicted.empty())
        throw Error(ErrorKind::data, "accuracy over zero timesteps is undefined");
    std::size_t correct = 0;
    for (std::size_t t = 0; t < predicted.size(); ++t)
        if (predicted[t] == truth[t]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

namespace {

constexpr const char* kModelMagic = "plcauto model v1";

}  // namespace

std::string format_model(const LstmModel& model) {
    std::ostringstream out;
    out << kModelMagic << "\n";
    out << "hidden " << model.config.hidden << "\n";
    out << "num_layers " << model.config.num_layers << "\n";
    out << "epochs " << model.config.epochs << "\n";
    out << "learning_rate " << format_g17(model.config.learning_rate) << "\n";
    out << "beta1 " << format_g17(model.config.beta1) << "\n";
    out << "beta2 " << format_g17(model.config.beta2) << "\n";
    out << "epsilon " << format_g17(model.config.epsilon) << "\n";
    out << "init_scale " << format_g17(model.config.init_scale) << "\n";
    out << "forget_bias_offset " << format_g17(model.config.forget_bias_offset) << "\n";
    out << "seed " << model.config.seed << "\n";
    for (const auto& view : tensor_views(model.params)) {
        out << "tensor " << view.name << " " << view.rows << " " << view.cols << "\n";
        // row-major layout in the file; Eigen stores column-major
        for (Eigen::Index r = 0; r < view.rows; ++r) {
            for (Eigen::Index c = 0; c < view.cols; ++c) {
                if (c > 0) out << " ";
                out << format_g17(view.data[c * view.rows + r]);
            }
            out << "\n";
        }
    }
    out << "history " << model.history.loss.size() << "\n";
    for (std::size_t i = 0; i < model.history.loss.size(); ++i)
        out << format_g17(model.history.loss[i]) << " "
            << format_g17(model.history.train_accuracy[i]) << "\n";
    if (model.history.test_accuracy)
        out << "test_accuracy " << format_g17(*model.history.test_accuracy) << "\n";
    else
        out << "test_accuracy none\n";
    out << "end\n";
    return out.str();
}

namespace {

[[noreturn]] void model_fail(const std::string& what) {
    throw Error(ErrorKind::data, "model file: " + what);
}

std::string expect_key(std::istringstream& line_stream, const std::string& key) {
    std::string k, rest;
    line_stream >> k;
    if (k != key) model_fail("expected '" + key + "', found '" + k + "'");
    line_stream >> rest;
    return rest;
}

std::string next_line(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) model_fail("unexpected end of file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

double parse_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) model_fail("bad number '" + s + "'");
        return v;
    } catch (const std::exception&) {
        model_fail("bad number '" + s + "'");
    }
}

}  // namespace

LstmModel parse_model(const std::string& text) {
    std::istringstream in(text);
    if (next_line(in) != kModelMagic) model_fail("unrecognized header");

    LstmModel model;
    auto read_scalar = [&](const char* key) {
        std::istringstream ls(next_line(in));
        return expect_key(ls, key);
    };
    model.config.hidden = static_cast<int>(parse_double(read_scalar("hidden")));
    model.config.num_layers = static_cast<int>(parse_double(read_scalar("num_layers")));
    model.config.epochs = static_cast<int>(parse_double(read_scalar("epochs")));
    model.config.learning_rate = parse_double(read_scalar("learning_rate"));
    model.config.beta1 = parse_double(read_scalar("beta1"));
    model.config.beta2 = parse_double(read_scalar("beta2"));
    model.config.epsilon = parse_double(read_scalar("epsilon"));
    model.config.init_scale = parse_double(read_scalar("init_scale"));
    model.config.forget_bias_offset = parse_double(read_scalar("forget_bias_offset"));
    model.config.seed = static_cast<std::uint64_t>(std::stoull(read_scalar("seed")));
    validate_config(model.config);

    model.params = LstmParams::zeros(model.config.hidden);
    for (auto& view : tensor_views(model.params)) {
        std::istringstream header(next_line(in));
        std::string tag, name;
        Eigen::Index rows = 0, cols = 0;
        header >> tag >> name >> rows >> cols;
        if (tag != "tensor" || name != view.name)
            model_fail(std::string("expected tensor ") + view.name);
        if (rows != view.rows || cols != view.cols)
            model_fail(std::string("tensor ") + view.name + " has wrong dimensions");
        for (Eigen::Index r = 0; r < rows; ++r) {
            std::istringstream row(next_line(in));
            for (Eigen::Index c = 0; c < cols; ++c) {
                std::string tok;
                if (!(row >> tok)) model_fail(std::string("tensor ") + view.name + " row too short");
                view.data[c * rows + r] = parse_double(tok);
            }
        }
    }

    {
        std::istringstream ls(next_line(in));
        std::string key;
        std::size_t n = 0;
        ls >> key >> n;
        if (key != "history") model_fail("expected 'history'");
        for (std::size_t i = 0; i < n; ++i) {
            std::istringstream row(next_line(in));
            std::string a, b;
            if (!(row >> a >> b)) model_fail("history row too short");
            model.history.loss.push_back(parse_double(a));
            model.history.train_accuracy.push_back(parse_double(b));
        }
    }
    {
        std::istringstream ls(next_line(in));
        std::string key, value;
        ls >> key >> value;
        if (key != "test_accuracy") model_fail("expected 'test_accuracy'");
        if (value != "none") model.history.test_accuracy = parse_double(value);
    }
    if (next_line(in) != "end") model_fail("missing trailing 'end'");
    return model;
}

void save_model(const LstmModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::data, "cannot open '" + path + "' for writing");
    out << format_model(model);
    if (!out) throw Error(ErrorKind::data, "failed writing model file '" + path + "'");
}

LstmModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::data, "cannot open model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_model(buf.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

std::string format_history_csv(const TrainHistory& history) {
    std::string out = "iteration,loss,train_accuracy\n";
    for (std::size_t i = 0; i < history.loss.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_f4(history.loss[i]);
        out += ',';
        out += format_f4(history.train_accuracy[i]);
        out += '\n';
    }
    return out;
}

}  // namespace plcauto
