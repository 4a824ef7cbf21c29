#include "cfmimo/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "cfmimo/errors.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

static_assert(std::endian::native == std::endian::little,
              "checkpoint and dataset files are little-endian");

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Elu: return "elu";
    case Activation::Relu: return "relu";
    case Activation::Linear: return "linear";
  }
  return "?";
}

Activation activation_from_string(const std::string& s) {
  if (s == "elu") return Activation::Elu;
  if (s == "relu") return Activation::Relu;
  if (s == "linear") return Activation::Linear;
  throw ConfigError("unknown activation '" + s + "'");
}

std::vector<int> MlpLayout::layer_sizes() const {
  std::vector<int> sizes;
  sizes.reserve(hidden.size() + 2);
  sizes.push_back(input_dim);
  for (const auto& [w, act] : hidden) sizes.push_back(w);
  sizes.push_back(output_dim);
  return sizes;
}

Activation MlpLayout::activation(int layer) const {
  return layer < static_cast<int>(hidden.size())
             ? hidden[static_cast<std::size_t>(layer)].second
             : Activation::Linear;
}

std::size_t MlpLayout::parameter_count() const {
  const auto per = per_layer_parameters();
  return std::accumulate(per.begin(), per.end(), std::size_t{0});
}

std::vector<std::size_t> MlpLayout::per_layer_parameters() const {
  const auto sizes = layer_sizes();
  std::vector<std::size_t> out;
  out.reserve(sizes.size() - 1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const auto fan_in = static_cast<std::size_t>(sizes[l]);
    const auto fan_out = static_cast<std::size_t>(sizes[l + 1]);
    out.push_back(fan_in * fan_out + fan_out);
  }
  return out;
}

MlpLayout MlpLayout::ann1(int input_dim, int output_dim) {
  return {input_dim,
          {{256, Activation::Elu},
           {128, Activation::Relu},
           {64, Activation::Relu},
           {32, Activation::Relu},
           {16, Activation::Relu}},
          output_dim};
}

MlpLayout MlpLayout::ann2(int input_dim, int output_dim) {
  return {input_dim,
          {{512, Activation::Elu},
           {256, Activation::Relu},
           {128, Activation::Relu},
           {64, Activation::Relu},
           {32, Activation::Relu},
           {16, Activation::Relu}},
          output_dim};
}

MlpLayout MlpLayout::ann3(int input_dim, int output_dim) {
  // Same hidden stack as ann2, fed with the full beta matrix.
  return ann2(input_dim, output_dim);
}

MlpModel init_mlp(const MlpLayout& layout, std::uint64_t seed) {
  MlpModel model;
  model.layout = layout;
  model.init_seed = seed;
  Rng rng(seed);
  const auto sizes = layout.layer_sizes();
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const auto fan_in = static_cast<std::size_t>(sizes[l]);
    const auto fan_out = static_cast<std::size_t>(sizes[l + 1]);
    Matrix w(fan_out, fan_in);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (auto& v : w.data()) v = rng.uniform(-limit, limit);
    model.weights.push_back(std::move(w));
    model.biases.emplace_back(fan_out, 0.0);
  }
  return model;
}

namespace {

double activate(double v, Activation act) {
  switch (act) {
    case Activation::Elu: return v > 0.0 ? v : std::expm1(v);
    case Activation::Relu: return v > 0.0 ? v : 0.0;
    case Activation::Linear: return v;
  }
  return v;
}

// Derivative expressed through the pre-activation.
double activate_grad(double pre, Activation act) {
  switch (act) {
    case Activation::Elu: return pre > 0.0 ? 1.0 : std::exp(pre);
    case Activation::Relu: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::Linear: return 1.0;
  }
  return 1.0;
}

// Dot product with fixed partial-sum lanes: the lane-wise inner loop
// vectorizes without reassociation, and the merge order is fixed, so the
// result is identical on every run.
double dot(const double* a, const double* b, std::size_t n) {
  double lanes[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t c = 0;
  for (; c + 8 <= n; c += 8)
    for (std::size_t j = 0; j < 8; ++j) lanes[j] += a[c + j] * b[c + j];
  double tail = 0.0;
  for (; c < n; ++c) tail += a[c] * b[c];
  return ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3])) +
         ((lanes[4] + lanes[5]) + (lanes[6] + lanes[7])) + tail;
}

// Four dots against a shared left operand. Quadruples weight reuse and runs
// four independent accumulator chains; same fixed merge order as dot(), and
// each output matches dot() bit for bit.
void dot4(const double* w, const double* x0, const double* x1, const double* x2,
          const double* x3, std::size_t n, double* out) {
  double l0[8] = {0}, l1[8] = {0}, l2[8] = {0}, l3[8] = {0};
  std::size_t c = 0;
  for (; c + 8 <= n; c += 8)
    for (std::size_t j = 0; j < 8; ++j) {
      const double wv = w[c + j];
      l0[j] += wv * x0[c + j];
      l1[j] += wv * x1[c + j];
      l2[j] += wv * x2[c + j];
      l3[j] += wv * x3[c + j];
    }
  double t0 = 0.0, t1 = 0.0, t2 = 0.0, t3 = 0.0;
  for (; c < n; ++c) {
    const double wv = w[c];
    t0 += wv * x0[c];
    t1 += wv * x1[c];
    t2 += wv * x2[c];
    t3 += wv * x3[c];
  }
  auto merge = [](const double* l, double t) {
    return ((l[0] + l[1]) + (l[2] + l[3])) + ((l[4] + l[5]) + (l[6] + l[7])) + t;
  };
  out[0] = merge(l0, t0);
  out[1] = merge(l1, t1);
  out[2] = merge(l2, t2);
  out[3] = merge(l3, t3);
}

void layer_forward(const Matrix& w, const std::vector<double>& b,
                   const double* in, double* pre) {
  const std::size_t rows = w.rows();
  const std::size_t cols = w.cols();
  for (std::size_t r = 0; r < rows; ++r) pre[r] = b[r] + dot(w.row(r), in, cols);
}

// Forward `count` rows through one layer, four rows per weight pass.
// Row i is read from in.row(in_lo + i) and written to out.row(out_lo + i).
void layer_forward_block(const Matrix& w, const std::vector<double>& b,
                         const Matrix& in, std::size_t in_lo, Matrix& out,
                         std::size_t out_lo, std::size_t count, Activation act) {
  const std::size_t rows = w.rows();
  const std::size_t cols = w.cols();
  std::size_t r = 0;
  for (; r + 4 <= count; r += 4) {
    const double* x0 = in.row(in_lo + r);
    const double* x1 = in.row(in_lo + r + 1);
    const double* x2 = in.row(in_lo + r + 2);
    const double* x3 = in.row(in_lo + r + 3);
    double v[4];
    for (std::size_t k = 0; k < rows; ++k) {
      dot4(w.row(k), x0, x1, x2, x3, cols, v);
      out(out_lo + r, k) = activate(b[k] + v[0], act);
      out(out_lo + r + 1, k) = activate(b[k] + v[1], act);
      out(out_lo + r + 2, k) = activate(b[k] + v[2], act);
      out(out_lo + r + 3, k) = activate(b[k] + v[3], act);
    }
  }
  for (; r < count; ++r) {
    const double* x = in.row(in_lo + r);
    for (std::size_t k = 0; k < rows; ++k)
      out(out_lo + r, k) = activate(b[k] + dot(w.row(k), x, cols), act);
  }
}

// Scratch buffers for one forward/backward pass; reused across samples.
struct Workspace {
  std::vector<std::vector<double>> pre;   // pre-activations per layer
  std::vector<std::vector<double>> act;   // activations per layer (incl. input copy)
  std::vector<double> delta, delta_prev;

  explicit Workspace(const MlpLayout& layout) {
    const auto sizes = layout.layer_sizes();
    act.resize(sizes.size());
    pre.resize(sizes.size() - 1);
    for (std::size_t i = 0; i < sizes.size(); ++i)
      act[i].resize(static_cast<std::size_t>(sizes[i]));
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
      pre[i].resize(static_cast<std::size_t>(sizes[i + 1]));
    std::size_t widest = 0;
    for (int s : sizes) widest = std::max(widest, static_cast<std::size_t>(s));
    delta.resize(widest);
    delta_prev.resize(widest);
  }
};

void forward_into(const MlpModel& model, std::span<const double> input, Workspace& ws) {
  std::copy(input.begin(), input.end(), ws.act[0].begin());
  const int layers = model.layout.num_layers();
  for (int l = 0; l < layers; ++l) {
    const auto lu = static_cast<std::size_t>(l);
    layer_forward(model.weights[lu], model.biases[lu], ws.act[lu].data(),
                  ws.pre[lu].data());
    const Activation a = model.layout.activation(l);
    for (std::size_t i = 0; i < ws.pre[lu].size(); ++i)
      ws.act[lu + 1][i] = activate(ws.pre[lu][i], a);
  }
}

double sample_loss(std::span<const double> pred, std::span<const double> target,
                   LossMode mode) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += d * d;
  }
  double loss = acc / static_cast<double>(pred.size());
  if (mode == LossMode::TargetNormalized) {
    double t = 0.0;
    for (double u : target) t += u * u;
    loss /= std::max(t / static_cast<double>(target.size()), 1e-12);
  }
  return loss;
}

// Backprop one sample into the accumulator (+=).
void backward_into(const MlpModel& model, std::span<const double> target,
                   Workspace& ws, Gradients& acc, LossMode mode) {
  const int layers = model.layout.num_layers();
  const std::size_t out_dim = static_cast<std::size_t>(model.layout.output_dim);

  double scale = 2.0 / static_cast<double>(out_dim);
  if (mode == LossMode::TargetNormalized) {
    double t = 0.0;
    for (double u : target) t += u * u;
    scale /= std::max(t / static_cast<double>(out_dim), 1e-12);
  }

  const auto& out = ws.act[static_cast<std::size_t>(layers)];
  for (std::size_t i = 0; i < out_dim; ++i)
    ws.delta[i] = scale * (out[i] - target[i]);

  for (int l = layers - 1; l >= 0; --l) {
    const auto lu = static_cast<std::size_t>(l);
    const Activation a = model.layout.activation(l);
    const std::size_t rows = model.weights[lu].rows();
    const std::size_t cols = model.weights[lu].cols();

    if (a != Activation::Linear)
      for (std::size_t r = 0; r < rows; ++r)
        ws.delta[r] *= activate_grad(ws.pre[lu][r], a);

    const auto& in_act = ws.act[lu];
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = ws.delta[r];
      acc.biases[lu][r] += d;
      double* gw = acc.weights[lu].row(r);
      for (std::size_t c = 0; c < cols; ++c) gw[c] += d * in_act[c];
    }

    if (l > 0) {
      std::fill(ws.delta_prev.begin(), ws.delta_prev.begin() + static_cast<long>(cols), 0.0);
      for (std::size_t r = 0; r < rows; ++r) {
        const double d = ws.delta[r];
        const double* wr = model.weights[lu].row(r);
        for (std::size_t c = 0; c < cols; ++c) ws.delta_prev[c] += d * wr[c];
      }
      std::swap(ws.delta, ws.delta_prev);
    }
  }
}

}  // namespace

std::vector<double> forward(const MlpModel& model, std::span<const double> input) {
  if (static_cast<int>(input.size()) != model.layout.input_dim)
    throw ConfigError("forward: input has dimension " + std::to_string(input.size()) +
                      ", model expects " + std::to_string(model.layout.input_dim));
  Workspace ws(model.layout);
  forward_into(model, input, ws);
  return ws.act.back();
}

namespace {

// Small enough that one layer's weights plus both activation buffers stay
// L2-resident; the weight matrix is then fetched once per chunk.
constexpr std::size_t kBatchChunk = 48;
// Reduction grouping for mean_loss; fixed so the merged value never
// depends on the execution policy.
constexpr std::size_t kLossChunk = 256;

// Per-chunk ping/pong activation buffers sized for the widest layer. The
// stride is padded off powers of two to dodge cache-set aliasing between
// the rows streamed together by dot4.
struct BatchBuffers {
  Matrix ping, pong;
  explicit BatchBuffers(const MlpLayout& layout) {
    std::size_t widest = 0;
    for (int s : layout.layer_sizes()) widest = std::max(widest, static_cast<std::size_t>(s));
    ping = Matrix(kBatchChunk, widest + 8);
    pong = Matrix(kBatchChunk, widest + 8);
  }
};

// Forward rows [lo, hi) of `inputs` into the matching rows of `out`.
// Intermediate activations live in the chunk-local buffers. Per-row results
// are bit-identical to the single-sample path.
void forward_rows(const MlpModel& model, const Matrix& inputs, std::size_t lo,
                  std::size_t hi, BatchBuffers& buf, Matrix& out) {
  const int layers = model.layout.num_layers();
  const std::size_t count = hi - lo;
  const Matrix* cur = &inputs;
  std::size_t cur_lo = lo;
  for (int l = 0; l < layers; ++l) {
    const auto lu = static_cast<std::size_t>(l);
    Matrix& dst = (l == layers - 1) ? out : (l % 2 == 0 ? buf.ping : buf.pong);
    const std::size_t dst_lo = (l == layers - 1) ? lo : 0;
    layer_forward_block(model.weights[lu], model.biases[lu], *cur, cur_lo, dst, dst_lo,
                        count, model.layout.activation(l));
    cur = &dst;
    cur_lo = dst_lo;
  }
}

}  // namespace

Matrix forward_batch(const MlpModel& model, const Matrix& inputs, Exec exec) {
  if (static_cast<int>(inputs.cols()) != model.layout.input_dim)
    throw ConfigError("forward_batch: input dimension mismatch");
  const std::size_t n = inputs.rows();
  Matrix out(n, static_cast<std::size_t>(model.layout.output_dim));

  const std::size_t n_chunks = (n + kBatchChunk - 1) / kBatchChunk;
  const bool parallel = exec == Exec::Parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long long ci = 0; ci < static_cast<long long>(n_chunks); ++ci) {
    BatchBuffers buf(model.layout);
    const std::size_t lo = static_cast<std::size_t>(ci) * kBatchChunk;
    const std::size_t hi = std::min(n, lo + kBatchChunk);
    forward_rows(model, inputs, lo, hi, buf, out);
  }
  return out;
}

double loss_relative_mse(std::span<const double> pred, std::span<const double> target,
                         LossMode mode) {
  if (pred.size() != target.size())
    throw ConfigError("loss_relative_mse: prediction/target size mismatch");
  return sample_loss(pred, target, mode);
}

double mean_loss(const MlpModel& model, const Matrix& inputs, const Matrix& targets,
                 LossMode mode, Exec exec) {
  if (inputs.rows() != targets.rows())
    throw ConfigError("mean_loss: inputs/targets row mismatch");
  const std::size_t n = inputs.rows();
  if (n == 0) throw ConfigError("mean_loss: empty set");

  const Matrix pred = forward_batch(model, inputs, exec);

  // Fixed chunk structure + ordered merge: identical result for any policy.
  const std::size_t n_chunks = (n + kLossChunk - 1) / kLossChunk;
  std::vector<double> partial(n_chunks, 0.0);
  for (std::size_t ci = 0; ci < n_chunks; ++ci) {
    const std::size_t lo = ci * kLossChunk;
    const std::size_t hi = std::min(n, lo + kLossChunk);
    double acc = 0.0;
    for (std::size_t r = lo; r < hi; ++r)
      acc += sample_loss({pred.row(r), pred.cols()}, {targets.row(r), targets.cols()}, mode);
    partial[ci] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total / static_cast<double>(n);
}

Gradients zero_gradients(const MlpLayout& layout) {
  Gradients g;
  const auto sizes = layout.layer_sizes();
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    g.weights.emplace_back(static_cast<std::size_t>(sizes[l + 1]),
                           static_cast<std::size_t>(sizes[l]));
    g.biases.emplace_back(static_cast<std::size_t>(sizes[l + 1]), 0.0);
  }
  return g;
}

Gradients backward(const MlpModel& model, std::span<const double> input,
                   std::span<const double> target, LossMode mode) {
  if (static_cast<int>(input.size()) != model.layout.input_dim ||
      static_cast<int>(target.size()) != model.layout.output_dim)
    throw ConfigError("backward: dimension mismatch");
  Workspace ws(model.layout);
  Gradients g = zero_gradients(model.layout);
  forward_into(model, input, ws);
  backward_into(model, target, ws, g, mode);
  return g;
}

Gradients batch_backward(const MlpModel& model, const Matrix& inputs,
                         const Matrix& targets, std::span<const std::size_t> rows,
                         LossMode mode) {
  Workspace ws(model.layout);
  Gradients g = zero_gradients(model.layout);
  for (std::size_t r : rows) {
    forward_into(model, {inputs.row(r), inputs.cols()}, ws);
    backward_into(model, {targets.row(r), targets.cols()}, ws, g, mode);
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (auto& w : g.weights)
    for (auto& v : w.data()) v *= inv;
  for (auto& b : g.biases)
    for (auto& v : b) v *= inv;
  return g;
}

NadamState zero_nadam_state(const MlpLayout& layout) {
  NadamState st;
  const auto sizes = layout.layer_sizes();
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const auto rows = static_cast<std::size_t>(sizes[l + 1]);
    const auto cols = static_cast<std::size_t>(sizes[l]);
    st.m_weights.emplace_back(rows, cols);
    st.n_weights.emplace_back(rows, cols);
    st.m_biases.emplace_back(rows, 0.0);
    st.n_biases.emplace_back(rows, 0.0);
  }
  return st;
}

int TrainSchedule::total_epochs() const {
  int total = 0;
  for (const auto& [lr, ep] : phases) total += ep;
  return total;
}

namespace {

void nadam_update(double* theta, double* m, double* n, const double* g,
                  std::size_t len, double lr, double bc1, double bc2,
                  const TrainSchedule& s) {
  for (std::size_t i = 0; i < len; ++i) {
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
    n[i] = s.beta2 * n[i] + (1.0 - s.beta2) * g[i] * g[i];
    const double m_hat = m[i] / bc1;
    const double g_hat = g[i] / bc1;
    const double n_hat = n[i] / bc2;
    theta[i] -= lr * (s.beta1 * m_hat + (1.0 - s.beta1) * g_hat) /
                (std::sqrt(n_hat) + s.epsilon);
  }
}

}  // namespace

void nadam_step(MlpModel& model, NadamState& state, const Gradients& grads,
                double lr, long step, const TrainSchedule& sched) {
  const double bc1 = 1.0 - std::pow(sched.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(sched.beta2, static_cast<double>(step));
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    nadam_update(model.weights[l].data().data(), state.m_weights[l].data().data(),
                 state.n_weights[l].data().data(), grads.weights[l].data().data(),
                 model.weights[l].size(), lr, bc1, bc2, sched);
    nadam_update(model.biases[l].data(), state.m_biases[l].data(),
                 state.n_biases[l].data(), grads.biases[l].data(),
                 model.biases[l].size(), lr, bc1, bc2, sched);
  }
}

std::vector<EpochStats> train(MlpModel& model, const Matrix& train_inputs,
                              const Matrix& train_targets, const Matrix& val_inputs,
                              const Matrix& val_targets, const TrainSchedule& sched,
                              std::uint64_t shuffle_seed) {
  if (train_inputs.rows() == 0) throw ConfigError("train: empty training set");
  if (val_inputs.rows() == 0) throw ConfigError("train: empty validation set");
  if (static_cast<int>(train_inputs.cols()) != model.layout.input_dim)
    throw ConfigError("train: dataset input dimension " +
                      std::to_string(train_inputs.cols()) + " does not match model (" +
                      std::to_string(model.layout.input_dim) + ")");
  if (static_cast<int>(train_targets.cols()) != model.layout.output_dim)
    throw ConfigError("train: target dimension mismatch");

  const std::size_t n = train_inputs.rows();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng shuffler(shuffle_seed);

  std::vector<EpochStats> log;
  int epoch_no = 0;
  for (const auto& [lr, epochs] : sched.phases) {
    NadamState state = zero_nadam_state(model.layout);
    long step = 0;
    for (int e = 0; e < epochs; ++e) {
      ++epoch_no;
      // Fisher-Yates; the engine sequence is standard-fixed, so the order is
      // reproducible everywhere.
      for (std::size_t i = n - 1; i > 0; --i)
        std::swap(perm[i], perm[shuffler.bounded(i + 1)]);

      const std::size_t batch = static_cast<std::size_t>(sched.batch_size);
      for (std::size_t lo = 0; lo < n; lo += batch) {
        const std::size_t hi = std::min(n, lo + batch);
        const auto g = batch_backward(model, train_inputs, train_targets,
                                      {perm.data() + lo, hi - lo}, sched.loss_mode);
        nadam_step(model, state, g, lr, ++step, sched);
      }

      EpochStats stats;
      stats.epoch = epoch_no;
      stats.train_mse = mean_loss(model, train_inputs, train_targets, sched.loss_mode);
      stats.val_mse = mean_loss(model, val_inputs, val_targets, sched.loss_mode);
      log.push_back(stats);
    }
  }
  return log;
}

std::vector<double> predict_powers(const MlpModel& model, std::span<const double> input,
                                   const SystemConfig& cfg) {
  auto out = forward(model, input);
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = std::clamp(out[k], 0.0, 1.0) * cfg.p_max_of(static_cast<int>(k));
  return out;
}

namespace {

nlohmann::json layout_to_json(const MlpLayout& layout) {
  nlohmann::json hidden = nlohmann::json::array();
  for (const auto& [w, act] : layout.hidden)
    hidden.push_back({{"width", w}, {"activation", to_string(act)}});
  return {{"input", layout.input_dim}, {"hidden", hidden}, {"output", layout.output_dim}};
}

MlpLayout layout_from_json(const nlohmann::json& j) {
  MlpLayout layout;
  layout.input_dim = j.at("input").get<int>();
  layout.output_dim = j.at("output").get<int>();
  for (const auto& h : j.at("hidden"))
    layout.hidden.emplace_back(h.at("width").get<int>(),
                               activation_from_string(h.at("activation").get<std::string>()));
  return layout;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const MlpModel& model,
                     const TrainSchedule& sched, int epochs_trained) {
  nlohmann::json phases = nlohmann::json::array();
  for (const auto& [lr, ep] : sched.phases) phases.push_back({{"lr", lr}, {"epochs", ep}});
  const nlohmann::json header = {
      {"format", "cfmimo-mlp-v1"},
      {"layout", layout_to_json(model.layout)},
      {"init_seed", model.init_seed},
      {"epochs_trained", epochs_trained},
      {"schedule",
       {{"phases", phases},
        {"batch_size", sched.batch_size},
        {"beta1", sched.beta1},
        {"beta2", sched.beta2},
        {"epsilon", sched.epsilon}}},
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path.string());
  out << header.dump() << '\n';
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    const auto& w = model.weights[l].data();
    out.write(reinterpret_cast<const char*>(w.data()),
              static_cast<std::streamsize>(w.size() * sizeof(double)));
    const auto& b = model.biases[l];
    out.write(reinterpret_cast<const char*>(b.data()),
              static_cast<std::streamsize>(b.size() * sizeof(double)));
  }
  if (!out) throw DataError("short write on checkpoint: " + path.string());
}

MlpModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path.string());
  std::string header_line;
  if (!std::getline(in, header_line)) throw DataError("checkpoint missing header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad checkpoint header: ") + e.what());
  }
  if (header.value("format", "") != "cfmimo-mlp-v1")
    throw DataError("unsupported checkpoint format");

  MlpModel model;
  model.layout = layout_from_json(header.at("layout"));
  model.init_seed = header.value("init_seed", std::uint64_t{0});
  const auto sizes = model.layout.layer_sizes();
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    Matrix w(static_cast<std::size_t>(sizes[l + 1]), static_cast<std::size_t>(sizes[l]));
    in.read(reinterpret_cast<char*>(w.data().data()),
            static_cast<std::streamsize>(w.size() * sizeof(double)));
    std::vector<double> b(static_cast<std::size_t>(sizes[l + 1]));
    in.read(reinterpret_cast<char*>(b.data()),
            static_cast<std::streamsize>(b.size() * sizeof(double)));
    if (!in) throw DataError("truncated checkpoint: " + path.string());
    model.weights.push_back(std::move(w));
    model.biases.push_back(std::move(b));
  }
  return model;
}

}  // namespace cfmimo
