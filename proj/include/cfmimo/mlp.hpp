#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfmimo/exec.hpp"
#include "cfmimo/matrix.hpp"
#include "cfmimo/system_config.hpp"

namespace cfmimo {

enum class Activation { Elu, Relu, Linear };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

// Fully-connected network layout. Output activation is always linear.
struct MlpLayout {
  int input_dim = 0;
  std::vector<std::pair<int, Activation>> hidden;
  int output_dim = 0;

  /// [input, hidden..., output]
  std::vector<int> layer_sizes() const;
  /// Activation of weight layer l (hidden layers, then linear output).
  Activation activation(int layer) const;
  int num_layers() const { return static_cast<int>(hidden.size()) + 1; }

  std::size_t parameter_count() const;
  /// fan_in*fan_out + fan_out per weight layer.
  std::vector<std::size_t> per_layer_parameters() const;

  // The three layouts used for the learned policies. ann1/ann2 take the
  // user-position input (2K), ann3 the full beta matrix (K*M).
  static MlpLayout ann1(int input_dim = 10, int output_dim = 5);
  static MlpLayout ann2(int input_dim = 10, int output_dim = 5);
  static MlpLayout ann3(int input_dim = 150, int output_dim = 5);
};

struct MlpModel {
  MlpLayout layout;
  std::vector<Matrix> weights;               // out x in, per layer
  std::vector<std::vector<double>> biases;   // out, per layer
  std::uint64_t init_seed = 0;
};

/// Glorot-uniform weights, zero biases; bit-deterministic for a given seed.
MlpModel init_mlp(const MlpLayout& layout, std::uint64_t seed);

std::vector<double> forward(const MlpModel& model, std::span<const double> input);

/// Row-wise forward over an n x input_dim matrix; rows are independent so
/// the parallel path is bit-identical to the serial one.
Matrix forward_batch(const MlpModel& model, const Matrix& inputs,
                     Exec exec = Exec::Parallel);

// Loss over P_max-normalized targets: mean_k (v_k - u_k)^2. The per-sample
// alternative divides by the sample's mean squared target.
enum class LossMode { PmaxNormalized, TargetNormalized };

double loss_relative_mse(std::span<const double> pred, std::span<const double> target,
                         LossMode mode = LossMode::PmaxNormalized);

/// Mean loss over a set; fixed-chunk reduction keeps the value independent
/// of the execution policy.
double mean_loss(const MlpModel& model, const Matrix& inputs, const Matrix& targets,
                 LossMode mode = LossMode::PmaxNormalized, Exec exec = Exec::Parallel);

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
};

Gradients zero_gradients(const MlpLayout& layout);

/// Exact gradients of loss_relative_mse at one sample.
Gradients backward(const MlpModel& model, std::span<const double> input,
                   std::span<const double> target,
                   LossMode mode = LossMode::PmaxNormalized);

/// Mean gradient over the given rows, accumulated in row order.
Gradients batch_backward(const MlpModel& model, const Matrix& inputs,
                         const Matrix& targets, std::span<const std::size_t> rows,
                         LossMode mode = LossMode::PmaxNormalized);

struct NadamState {
  std::vector<Matrix> m_weights, n_weights;
  std::vector<std::vector<double>> m_biases, n_biases;
};

NadamState zero_nadam_state(const MlpLayout& layout);

struct TrainSchedule {
  std::vector<std::pair<double, int>> phases = {{0.002, 20}, {0.001, 20}};
  int batch_size = 128;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  LossMode loss_mode = LossMode::PmaxNormalized;

  int total_epochs() const;
};

/// Adam with Nesterov momentum:
///   m <- b1 m + (1-b1) g,  n <- b2 n + (1-b2) g^2
///   theta -= lr * (b1 * m/(1-b1^t) + (1-b1) * g/(1-b1^t)) / (sqrt(n/(1-b2^t)) + eps)
void nadam_step(MlpModel& model, NadamState& state, const Gradients& grads,
                double lr, long step, const TrainSchedule& sched);

struct EpochStats {
  int epoch = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
};

/// Two-phase mini-batch training; phase 2 resumes from phase-1 weights with
/// a fresh optimizer. Logs full-set train/val MSE at each epoch end. The
/// update path is strictly sequential, so runs are bit-reproducible.
std::vector<EpochStats> train(MlpModel& model, const Matrix& train_inputs,
                              const Matrix& train_targets, const Matrix& val_inputs,
                              const Matrix& val_targets, const TrainSchedule& sched,
                              std::uint64_t shuffle_seed);

/// Forward, clip to [0, 1], scale by the per-user cap: always feasible.
std::vector<double> predict_powers(const MlpModel& model, std::span<const double> input,
                                   const SystemConfig& cfg);

// Checkpoint file: one JSON header line (layout, seeds, schedule, epoch)
// followed by raw little-endian doubles per layer, weights before biases.
void save_checkpoint(const std::filesystem::path& path, const MlpModel& model,
                     const TrainSchedule& sched, int epochs_trained);
MlpModel load_checkpoint(const std::filesystem::path& path);

}  // namespace cfmimo
