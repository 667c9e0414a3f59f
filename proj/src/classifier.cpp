#include "dgc/classifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "dgc/binary_io.hpp"
#include "dgc/error.hpp"

namespace dgc {

namespace {

constexpr std::uint32_t kCheckpointVersion = 1;

void check_dims(const SoftmaxModel& m, const Matrix& x) {
  if (x.cols() != m.dim()) {
    throw Error(Errc::DimensionMismatch, "feature dim " + std::to_string(x.cols()) +
                                             " != model dim " + std::to_string(m.dim()));
  }
}

void check_mask(const Matrix& x, const NodeMask& mask) {
  if (mask.size() != x.rows()) throw Error(Errc::DimensionMismatch, "mask length != node count");
  if (std::find(mask.begin(), mask.end(), true) == mask.end()) {
    throw Error(Errc::EmptyMask, "mask selects no nodes");
  }
}

// Logits of one node into out (length C).
void node_logits(const SoftmaxModel& m, const Matrix& x, std::size_t i, std::span<double> out) {
  const std::size_t c = m.num_classes();
  for (std::size_t k = 0; k < c; ++k) out[k] = m.use_bias ? m.bias[k] : 0.0;
  auto xr = x.row(i);
  for (std::size_t f = 0; f < m.dim(); ++f) {
    const double xf = xr[f];
    if (xf == 0.0) continue;
    auto tr = m.theta.row(f);
    for (std::size_t k = 0; k < c; ++k) out[k] += xf * tr[k];
  }
}

// In-place softmax; returns log-sum-exp of the input.
double softmax_inplace(std::span<double> z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return zmax + std::log(sum);
}

std::size_t argmax(std::span<const double> z) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < z.size(); ++k)
    if (z[k] > z[best]) best = k;
  return best;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

SoftmaxModel SoftmaxModel::zeros(std::size_t d, std::size_t num_classes, bool use_bias) {
  if (num_classes == 0) throw Error(Errc::InvalidArgument, "need at least one class");
  return SoftmaxModel{Matrix(d, num_classes), std::vector<double>(num_classes, 0.0), use_bias};
}

const char* to_string(Optimizer o) { return o == Optimizer::Adam ? "adam" : "gd"; }

Optimizer parse_optimizer(const std::string& s) {
  if (s == "adam") return Optimizer::Adam;
  if (s == "gd") return Optimizer::Gd;
  throw Error(Errc::InvalidArgument, "unknown optimizer '" + s + "' (expected adam|gd)");
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw Error(Errc::InvalidArgument, "learning rate must be > 0");
  if (cfg.epochs < 1) throw Error(Errc::InvalidArgument, "epochs must be >= 1");
  if (!(cfg.weight_decay >= 0.0)) throw Error(Errc::InvalidArgument, "weight decay must be >= 0");
}

Matrix forward(const SoftmaxModel& m, const Matrix& x) {
  check_dims(m, x);
  Matrix probs(x.rows(), m.num_classes());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    node_logits(m, x, i, probs.row(i));
    softmax_inplace(probs.row(i));
  }
  return probs;
}

LossAndGrad loss_and_grad(const SoftmaxModel& m, const Matrix& x, const Labels& labels,
                          const NodeMask& mask, double weight_decay) {
  check_dims(m, x);
  check_mask(x, mask);
  if (labels.size() != x.rows()) throw Error(Errc::DimensionMismatch, "labels length != nodes");
  const std::size_t c = m.num_classes();

  std::size_t count = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (!mask[i]) continue;
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c) {
      throw Error(Errc::LabelOutOfRange, "label " + std::to_string(labels[i]) + " at node " +
                                             std::to_string(i));
    }
    ++count;
  }
  const double inv_count = 1.0 / static_cast<double>(count);

  LossAndGrad out;
  out.grad_theta = Matrix(m.dim(), c);
  out.grad_bias.assign(c, 0.0);
  std::vector<double> z(c);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (!mask[i]) continue;
    const auto y = static_cast<std::size_t>(labels[i]);
    node_logits(m, x, i, z);
    const double zy = z[y];
    const double lse = softmax_inplace(z);
    out.loss += (lse - zy) * inv_count;
    z[y] -= 1.0;
    for (double& g : z) g *= inv_count;
    for (std::size_t k = 0; k < c; ++k) out.grad_bias[k] += z[k];
    auto xr = x.row(i);
    for (std::size_t f = 0; f < m.dim(); ++f) {
      const double xf = xr[f];
      if (xf == 0.0) continue;
      auto gr = out.grad_theta.row(f);
      for (std::size_t k = 0; k < c; ++k) gr[k] += xf * z[k];
    }
  }
  if (!m.use_bias) std::fill(out.grad_bias.begin(), out.grad_bias.end(), 0.0);
  if (weight_decay > 0.0) {
    double sq = 0.0;
    auto tv = m.theta.values();
    auto gv = out.grad_theta.values();
    for (std::size_t k = 0; k < tv.size(); ++k) {
      sq += tv[k] * tv[k];
      gv[k] += weight_decay * tv[k];
    }
    out.loss += 0.5 * weight_decay * sq;
  }
  return out;
}

double evaluate(const SoftmaxModel& m, const Matrix& x, const Labels& labels,
                const NodeMask& mask) {
  check_dims(m, x);
  check_mask(x, mask);
  std::vector<double> z(m.num_classes());
  std::size_t hits = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (!mask[i]) continue;
    ++count;
    // Softmax is monotone, so the arg-max of the logits is the prediction.
    node_logits(m, x, i, z);
    if (static_cast<std::int64_t>(argmax(z)) == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(count);
}

TrainResult train(const Matrix& x, const Labels& labels, std::size_t num_classes,
                  const NodeMask& train_mask, const NodeMask& val_mask, const NodeMask& test_mask,
                  const TrainConfig& cfg) {
  validate(cfg);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const int owners = (i < train_mask.size() && train_mask[i]) +
                       (i < val_mask.size() && val_mask[i]) + (i < test_mask.size() && test_mask[i]);
    if (owners > 1) throw Error(Errc::MaskOverlap, "node " + std::to_string(i) + " in two masks");
  }
  if (labels.size() != x.rows()) throw Error(Errc::DimensionMismatch, "labels length != nodes");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes) {
      throw Error(Errc::LabelOutOfRange, "label " + std::to_string(labels[i]) + " at node " +
                                             std::to_string(i));
    }
  }
  const auto start = std::chrono::steady_clock::now();

  TrainResult result;
  result.model = SoftmaxModel::zeros(x.cols(), num_classes, cfg.use_bias);
  result.report.config = cfg;
  SoftmaxModel& model = result.model;
  const bool has_val = std::find(val_mask.begin(), val_mask.end(), true) != val_mask.end();
  const bool has_test = std::find(test_mask.begin(), test_mask.end(), true) != test_mask.end();

  const std::size_t nt = model.theta.size();
  std::vector<double> m1(nt + num_classes, 0.0);
  std::vector<double> m2(nt + num_classes, 0.0);
  double b1t = 1.0;
  double b2t = 1.0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    LossAndGrad lg = loss_and_grad(model, x, labels, train_mask, cfg.weight_decay);
    result.report.train_loss.push_back(lg.loss);

    auto params = model.theta.values();
    auto grads = lg.grad_theta.values();
    auto update = [&](double& p, double g, std::size_t slot) {
      if (cfg.optimizer == Optimizer::Gd) {
        p -= cfg.learning_rate * g;
        return;
      }
      m1[slot] = cfg.adam_beta1 * m1[slot] + (1.0 - cfg.adam_beta1) * g;
      m2[slot] = cfg.adam_beta2 * m2[slot] + (1.0 - cfg.adam_beta2) * g * g;
      const double mhat = m1[slot] / (1.0 - b1t);
      const double vhat = m2[slot] / (1.0 - b2t);
      p -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    };
    b1t *= cfg.adam_beta1;
    b2t *= cfg.adam_beta2;
    for (std::size_t k = 0; k < nt; ++k) update(params[k], grads[k], k);
    if (model.use_bias)
      for (std::size_t k = 0; k < num_classes; ++k) update(model.bias[k], lg.grad_bias[k], nt + k);

    if (!all_finite(model.theta)) {
      throw Error(Errc::InvalidArgument, "training diverged at epoch " + std::to_string(epoch));
    }
    result.report.val_acc.push_back(has_val ? evaluate(model, x, labels, val_mask)
                                            : std::numeric_limits<double>::quiet_NaN());
  }
  result.report.final_val_acc = has_val ? result.report.val_acc.back()
                                        : std::numeric_limits<double>::quiet_NaN();
  result.report.final_test_acc = has_test ? evaluate(model, x, labels, test_mask)
                                          : std::numeric_limits<double>::quiet_NaN();
  result.report.train_ms = elapsed_ms(start);
  return result;
}

void write_checkpoint(const std::filesystem::path& path, const SoftmaxModel& m) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  binary::put_magic(os, "DGCM");
  binary::put<std::uint32_t>(os, kCheckpointVersion);
  binary::put<std::uint64_t>(os, m.dim());
  binary::put<std::uint64_t>(os, m.num_classes());
  for (double v : m.theta.values()) binary::put<double>(os, v);
  for (double v : m.bias) binary::put<double>(os, v);
  if (!os) throw Error(Errc::Io, "write failed for " + path.string());
}

SoftmaxModel read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::MissingFile, "cannot open " + path.string());
  binary::expect_magic(is, "DGCM");
  const auto version = binary::get<std::uint32_t>(is);
  if (version != kCheckpointVersion) {
    throw Error(Errc::SchemaViolation, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto d = binary::get<std::uint64_t>(is);
  const auto c = binary::get<std::uint64_t>(is);
  if (c == 0 || c > (1u << 20) || d > (1u << 28)) {
    throw Error(Errc::SchemaViolation, "implausible checkpoint dimensions");
  }
  SoftmaxModel m = SoftmaxModel::zeros(d, c);
  for (double& v : m.theta.values()) v = binary::get<double>(is);
  for (double& v : m.bias) v = binary::get<double>(is);
  m.use_bias = std::any_of(m.bias.begin(), m.bias.end(), [](double b) { return b != 0.0; });
  return m;
}

nlohmann::json config_to_json(const TrainConfig& cfg) {
  return {{"learning_rate", cfg.learning_rate},
          {"epochs", cfg.epochs},
          {"weight_decay", cfg.weight_decay},
          {"optimizer", to_string(cfg.optimizer)},
          {"seed", cfg.seed},
          {"adam_betas", {cfg.adam_beta1, cfg.adam_beta2}},
          {"adam_eps", cfg.adam_eps},
          {"use_bias", cfg.use_bias}};
}

nlohmann::json report_to_json(const TrainReport& r) {
  return {{"config", config_to_json(r.config)},
          {"traces", {{"train_loss", r.train_loss}, {"val_acc", r.val_acc}}},
          {"timings_ms", {{"preprocess", r.preprocess_ms}, {"train", r.train_ms}}},
          {"final_val_acc", r.final_val_acc},
          {"final_test_acc", r.final_test_acc}};
}

}  // namespace dgc
