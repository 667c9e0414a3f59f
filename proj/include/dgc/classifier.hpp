#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dgc/matrix.hpp"

namespace dgc {

using Labels = std::vector<std::int32_t>;
using NodeMask = std::vector<bool>;

/// Linear softmax head: p = softmax(x theta + bias).
struct SoftmaxModel {
  Matrix theta;              // d x C
  std::vector<double> bias;  // C
  bool use_bias = true;

  static SoftmaxModel zeros(std::size_t d, std::size_t num_classes, bool use_bias = true);
  std::size_t dim() const noexcept { return theta.rows(); }
  std::size_t num_classes() const noexcept { return theta.cols(); }
};

enum class Optimizer { Adam, Gd };

const char* to_string(Optimizer o);
Optimizer parse_optimizer(const std::string& s);

struct TrainConfig {
  double learning_rate = 0.2;
  int epochs = 100;
  double weight_decay = 0.0;
  Optimizer optimizer = Optimizer::Adam;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  bool use_bias = true;
};

void validate(const TrainConfig& cfg);

struct TrainReport {
  TrainConfig config;
  std::vector<double> train_loss;  // loss before each update
  std::vector<double> val_acc;     // validation accuracy after each update
  double final_val_acc = 0.0;
  double final_test_acc = 0.0;
  double preprocess_ms = 0.0;
  double train_ms = 0.0;
};

/// n x C row-stochastic matrix of class probabilities.
Matrix forward(const SoftmaxModel& m, const Matrix& x);

struct LossAndGrad {
  double loss = 0.0;
  Matrix grad_theta;
  std::vector<double> grad_bias;
};

/// Mean masked cross-entropy plus (weight_decay / 2) ||theta||_F^2.
LossAndGrad loss_and_grad(const SoftmaxModel& m, const Matrix& x, const Labels& labels,
                          const NodeMask& mask, double weight_decay);

/// Fraction of masked nodes whose arg-max class (lowest index on ties)
/// equals the label.
double evaluate(const SoftmaxModel& m, const Matrix& x, const Labels& labels, const NodeMask& mask);

struct TrainResult {
  SoftmaxModel model;
  TrainReport report;
};

/// Full-batch training from a zero initialization. Deterministic.
TrainResult train(const Matrix& x, const Labels& labels, std::size_t num_classes,
                  const NodeMask& train_mask, const NodeMask& val_mask, const NodeMask& test_mask,
                  const TrainConfig& cfg);

// Model checkpoint ("DGCM"): magic | version u32 | d u64 | C u64 |
// theta (d*C f64, row-major) | bias (C f64), little-endian.
void write_checkpoint(const std::filesystem::path& path, const SoftmaxModel& m);
SoftmaxModel read_checkpoint(const std::filesystem::path& path);

/// {"config": {...}, "traces": {"train_loss": [...], "val_acc": [...]},
///  "timings_ms": {"preprocess": .., "train": ..}, "final_val_acc": ..,
///  "final_test_acc": ..}
nlohmann::json report_to_json(const TrainReport& r);
nlohmann::json config_to_json(const TrainConfig& cfg);

}  // namespace dgc
