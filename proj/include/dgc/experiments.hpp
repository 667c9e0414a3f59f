#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dgc/classifier.hpp"
#include "dgc/data.hpp"
#include "dgc/diffusion.hpp"

namespace dgc {

// ---- end-to-end pipeline -------------------------------------------------

struct Preprocessed {
  FeatureMatrix features;
  double ms = 0.0;  // normalization + propagation wall time
};

/// Normalizes the graph and propagates ds.features (or `features` when given).
Preprocessed preprocess(const LabeledDataset& ds, const DiffusionConfig& cfg);
Preprocessed preprocess(const LabeledDataset& ds, const FeatureMatrix& features,
                        const DiffusionConfig& cfg);

TrainResult train_on(const FeatureMatrix& propagated, const LabeledDataset& ds,
                     const TrainConfig& cfg);

struct PipelineResult {
  TrainResult trained;
  double val_acc = 0.0;
  double test_acc = 0.0;
  double preprocess_ms = 0.0;
  double train_ms = 0.0;
};

PipelineResult run_pipeline(const LabeledDataset& ds, const DiffusionConfig& cfg,
                            const TrainConfig& tc);

/// {1e-6, 5e-6, 1e-5, 5e-5, 1e-4, 5e-4}
std::vector<double> default_wd_grid();

struct TuneResult {
  double weight_decay = 0.0;
  double val_acc = 0.0;
};

/// Picks the grid value with the best validation accuracy (first one wins ties).
TuneResult tune_weight_decay(const FeatureMatrix& propagated, const LabeledDataset& ds,
                             TrainConfig tc, std::span<const double> grid);

// ---- sweeps --------------------------------------------------------------

enum class SweepParam { T, K, Sigma };

const char* to_string(SweepParam p);
SweepParam parse_sweep_param(const std::string& s);

struct SweepSpec {
  SweepParam parameter = SweepParam::K;
  std::vector<double> values;
};

/// "a,b,c" or "start:stop:step" (inclusive of stop up to rounding).
/// Values must be non-empty and strictly increasing.
std::vector<double> parse_values(const std::string& text);
/// n log-spaced integers between lo and hi, deduplicated.
std::vector<double> log_spaced_steps(std::uint64_t lo, std::uint64_t hi, std::size_t n);

struct SweepRow {
  std::string param;
  double value = 0.0;
  double val_acc = 0.0;
  double test_acc = 0.0;
  double preprocess_ms = 0.0;
  double train_ms = 0.0;
};

/// One train/evaluate per value. For Sgc, sweeping K also moves T. Sigma
/// sweeps add seeded Gaussian noise to the input features first.
std::vector<SweepRow> run_sweep(const LabeledDataset& ds, const SweepSpec& spec,
                                const DiffusionConfig& base, const TrainConfig& tc,
                                std::uint64_t noise_seed = 0);

std::string sweep_csv(const std::vector<SweepRow>& rows);

// ---- noise robustness ----------------------------------------------------

struct NoiseRow {
  double sigma = 0.0;
  double dgc_val_acc = 0.0;
  double dgc_test_acc = 0.0;
  double sgc_val_acc = 0.0;
  double sgc_test_acc = 0.0;
};

/// Accuracies averaged over `repeats` noise draws (seeds base_seed, +1, ...).
std::vector<NoiseRow> run_noise(const LabeledDataset& ds, std::span<const double> sigmas,
                                const DiffusionConfig& dgc_cfg, const TrainConfig& dgc_train,
                                const DiffusionConfig& sgc_cfg, const TrainConfig& sgc_train,
                                std::size_t repeats, std::uint64_t base_seed);

std::string noise_csv(const std::vector<NoiseRow>& rows);

// ---- numerical verification ------------------------------------------------

struct VerifyOptions {
  std::uint64_t seed = 2021;
  std::size_t graphs = 100;
  std::size_t max_nodes = 32;
  double edge_prob = 0.3;
  std::size_t feature_dim = 4;
  std::size_t gradient_instances = 50;
};

struct VerifyGraphRow {
  std::size_t graph = 0;
  std::size_t nodes = 0;
  double norm_l = 0.0;
  double euler_slope = 0.0;
  double rk4_slope = 0.0;
  std::size_t bound_checks = 0;
  std::size_t bound_violations = 0;
  std::size_t local_violations = 0;
  double max_bound_ratio = 0.0;  // worst actual / bound
  bool euler_monotone = true;
};

struct VerifyReport {
  std::vector<VerifyGraphRow> graphs;
  std::size_t bound_violations = 0;
  std::size_t local_violations = 0;
  double euler_slope_min = 0.0;
  double euler_slope_max = 0.0;
  double rk4_slope_min = 0.0;
  double rk4_slope_max = 0.0;
  bool euler_monotone = true;
  double equilibrium_max_rel_err = 0.0;
  double semigroup_max_err = 0.0;
  double sgc_equivalence_max_err = 0.0;
  double power_iteration_max_err = 0.0;
  double gradient_max_rel_err = 0.0;
  double seconds = 0.0;

  bool euler_slope_ok() const { return euler_slope_min >= 0.8 && euler_slope_max <= 1.2; }
  bool rk4_slope_ok() const { return rk4_slope_min >= 3.5 && rk4_slope_max <= 4.5; }
  bool passed() const;
};

/// Bound compliance, convergence orders, equilibrium, semigroup, SGC
/// equivalence, power iteration and gradient checks on seeded random graphs.
VerifyReport run_verify(const VerifyOptions& opts);

std::string verify_csv(const VerifyReport& r);

/// Largest relative error between analytic and central-difference gradients
/// over `instances` random problems (n <= 10, d <= 5, C <= 4).
double gradient_check(std::size_t instances, std::uint64_t seed);

// ---- learning-risk experiment ----------------------------------------------

struct RiskRow {
  double t_hat = 0.0;
  std::uint64_t steps = 0;
  double val_acc = 0.0;
  double test_acc = 0.0;
  double risk = 0.0;
};

struct RiskOptions {
  double max_step = 0.02;  // Euler step size cap; K = ceil(T_hat / max_step)
  double ridge = 1e-8;
  TrainConfig train;
};

/// Generates the corrupted SBM, fixes the least-squares readout W fitted on
/// the clean training features, then for each T_hat reports the mean test
/// squared loss ||y - Euler(X, T_hat) W||^2 along with softmax accuracies.
std::vector<RiskRow> run_risk(const SbmConfig& sbm, std::span<const double> t_hat_grid,
                              const RiskOptions& opts);

std::string risk_csv(const std::vector<RiskRow>& rows);

// ---- timing ----------------------------------------------------------------

struct BenchRow {
  DiffusionConfig config;
  double preprocess_ms = 0.0;
  double train_ms = 0.0;
};

/// Median preprocess and train wall times over `runs` repetitions.
std::vector<BenchRow> run_bench(const LabeledDataset& ds, std::span<const DiffusionConfig> cfgs,
                                const TrainConfig& tc, std::size_t runs = 5);

std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace dgc
