#include "dgc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "dgc/error.hpp"
#include "dgc/oracle.hpp"

namespace dgc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Matrix random_normal(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = scale * g(rng);
  return m;
}

SparseGraph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  while (true) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (coin(rng)) edges.push_back({i, j, 1.0});
    if (!edges.empty()) return build_graph(edges, n);
  }
}

// Solves (A^T A + ridge I) W = A^T B by Cholesky.
Matrix least_squares(const Matrix& a, const Matrix& b, double ridge) {
  const std::size_t d = a.cols();
  Matrix at = transpose(a);
  Matrix gram = matmul(at, a);
  for (std::size_t i = 0; i < d; ++i) gram(i, i) += ridge;
  Matrix rhs = matmul(at, b);
  Matrix chol(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    double s = gram(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= chol(j, k) * chol(j, k);
    if (!(s > 0.0)) throw Error(Errc::InvalidArgument, "least squares system is singular");
    chol(j, j) = std::sqrt(s);
    for (std::size_t i = j + 1; i < d; ++i) {
      double t = gram(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= chol(i, k) * chol(j, k);
      chol(i, j) = t / chol(j, j);
    }
  }
  for (std::size_t c = 0; c < rhs.cols(); ++c) {
    for (std::size_t i = 0; i < d; ++i) {
      double t = rhs(i, c);
      for (std::size_t k = 0; k < i; ++k) t -= chol(i, k) * rhs(k, c);
      rhs(i, c) = t / chol(i, i);
    }
    for (std::size_t i = d; i-- > 0;) {
      double t = rhs(i, c);
      for (std::size_t k = i + 1; k < d; ++k) t -= chol(k, i) * rhs(k, c);
      rhs(i, c) = t / chol(i, i);
    }
  }
  return rhs;
}

Matrix rows_of(const Matrix& x, const NodeMask& mask) {
  std::size_t count = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  Matrix out(count, x.cols());
  std::size_t r = 0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    if (mask[i]) std::copy(x.row(i).begin(), x.row(i).end(), out.row(r++).begin());
  return out;
}

Matrix one_hot(const Labels& labels, const NodeMask& mask, std::size_t classes) {
  std::size_t count = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  Matrix y(count, classes);
  std::size_t r = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (mask[i]) y(r++, static_cast<std::size_t>(labels[i])) = 1.0;
  return y;
}

}  // namespace

// ---- pipeline ----------------------------------------------------------------

Preprocessed preprocess(const LabeledDataset& ds, const DiffusionConfig& cfg) {
  return preprocess(ds, ds.features, cfg);
}

Preprocessed preprocess(const LabeledDataset& ds, const FeatureMatrix& features,
                        const DiffusionConfig& cfg) {
  validate(cfg);
  const auto t0 = Clock::now();
  const PropagationMatrix s = normalize(ds.graph, cfg.variant);
  Preprocessed out;
  out.features = propagate(features, s, cfg);
  out.ms = ms_since(t0);
  return out;
}

TrainResult train_on(const FeatureMatrix& propagated, const LabeledDataset& ds,
                     const TrainConfig& cfg) {
  return train(propagated, ds.labels, ds.num_classes, ds.train_mask, ds.val_mask, ds.test_mask,
               cfg);
}

PipelineResult run_pipeline(const LabeledDataset& ds, const DiffusionConfig& cfg,
                            const TrainConfig& tc) {
  Preprocessed pre = preprocess(ds, cfg);
  PipelineResult r;
  r.trained = train_on(pre.features, ds, tc);
  r.trained.report.preprocess_ms = pre.ms;
  r.val_acc = r.trained.report.final_val_acc;
  r.test_acc = r.trained.report.final_test_acc;
  r.preprocess_ms = pre.ms;
  r.train_ms = r.trained.report.train_ms;
  return r;
}

std::vector<double> default_wd_grid() { return {1e-6, 5e-6, 1e-5, 5e-5, 1e-4, 5e-4}; }

TuneResult tune_weight_decay(const FeatureMatrix& propagated, const LabeledDataset& ds,
                             TrainConfig tc, std::span<const double> grid) {
  if (grid.empty()) throw Error(Errc::InvalidArgument, "weight-decay grid is empty");
  TuneResult best{grid.front(), -1.0};
  for (double wd : grid) {
    tc.weight_decay = wd;
    const double acc = train_on(propagated, ds, tc).report.final_val_acc;
    if (acc > best.val_acc) best = {wd, acc};
  }
  return best;
}

// ---- sweeps ------------------------------------------------------------------

const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::T: return "T";
    case SweepParam::K: return "K";
    case SweepParam::Sigma: return "sigma";
  }
  return "?";
}

SweepParam parse_sweep_param(const std::string& s) {
  if (s == "T") return SweepParam::T;
  if (s == "K") return SweepParam::K;
  if (s == "sigma") return SweepParam::Sigma;
  throw Error(Errc::InvalidArgument, "sweep parameter must be T, K or sigma");
}

std::vector<double> parse_values(const std::string& text) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error(Errc::InvalidArgument, "cannot parse sweep value '" + s + "'");
    }
  };
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw Error(Errc::InvalidArgument, "range must be start:stop:step");
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0)) throw Error(Errc::InvalidArgument, "range step must be positive");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (stop < start) throw Error(Errc::InvalidArgument, "range stop is below start");
    for (std::size_t k = 0; k < count; ++k) {
      // Rounded to 12 significant digits so 0.1-style steps print cleanly.
      const double v = start + static_cast<double>(k) * step;
      values.push_back(std::stod(fmt("%.12g", v)));
    }
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) values.push_back(number(p));
  }
  if (values.empty()) throw Error(Errc::InvalidArgument, "no sweep values");
  for (std::size_t k = 1; k < values.size(); ++k)
    if (!(values[k] > values[k - 1])) {
      throw Error(Errc::InvalidArgument, "sweep values must be strictly increasing");
    }
  return values;
}

std::vector<double> log_spaced_steps(std::uint64_t lo, std::uint64_t hi, std::size_t n) {
  if (lo == 0 || hi < lo || n == 0) throw Error(Errc::InvalidArgument, "bad log-spaced range");
  std::vector<double> out;
  for (std::size_t k = 0; k < n; ++k) {
    const double f = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
    const double v = std::round(std::exp(std::log(double(lo)) + f * std::log(double(hi) / double(lo))));
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

std::vector<SweepRow> run_sweep(const LabeledDataset& ds, const SweepSpec& spec,
                                const DiffusionConfig& base, const TrainConfig& tc,
                                std::uint64_t noise_seed) {
  if (spec.values.empty()) throw Error(Errc::InvalidArgument, "empty sweep");
  std::vector<SweepRow> rows;
  for (double value : spec.values) {
    DiffusionConfig cfg = base;
    const FeatureMatrix* features = &ds.features;
    FeatureMatrix noisy;
    switch (spec.parameter) {
      case SweepParam::T:
        if (cfg.scheme == Scheme::Sgc) {
          throw Error(Errc::InvalidArgument, "sgc couples T to K; sweep K instead");
        }
        cfg.terminal_time = value;
        break;
      case SweepParam::K:
        if (value < 0 || value != std::floor(value)) {
          throw Error(Errc::InvalidArgument, "K values must be non-negative integers");
        }
        cfg.steps = static_cast<std::uint64_t>(value);
        if (cfg.scheme == Scheme::Sgc) cfg.terminal_time = value;
        break;
      case SweepParam::Sigma:
        noisy = add_feature_noise(ds.features, value, noise_seed);
        features = &noisy;
        break;
    }
    Preprocessed pre = preprocess(ds, *features, cfg);
    TrainResult tr = train_on(pre.features, ds, tc);
    rows.push_back({to_string(spec.parameter), value, tr.report.final_val_acc,
                    tr.report.final_test_acc, pre.ms, tr.report.train_ms});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "param,value,val_acc,test_acc,preprocess_ms,train_ms\n";
  for (const auto& r : rows) {
    out += r.param + "," + fmt("%.10g", r.value) + "," + fmt("%.6f", r.val_acc) + "," +
           fmt("%.6f", r.test_acc) + "," + fmt("%.3f", r.preprocess_ms) + "," +
           fmt("%.3f", r.train_ms) + "\n";
  }
  return out;
}

// ---- noise -------------------------------------------------------------------

std::vector<NoiseRow> run_noise(const LabeledDataset& ds, std::span<const double> sigmas,
                                const DiffusionConfig& dgc_cfg, const TrainConfig& dgc_train,
                                const DiffusionConfig& sgc_cfg, const TrainConfig& sgc_train,
                                std::size_t repeats, std::uint64_t base_seed) {
  if (repeats == 0) throw Error(Errc::InvalidArgument, "repeats must be >= 1");
  std::vector<NoiseRow> rows;
  for (double sigma : sigmas) {
    if (!(sigma >= 0.0)) throw Error(Errc::InvalidArgument, "noise sigma must be >= 0");
    NoiseRow row;
    row.sigma = sigma;
    const std::size_t reps = sigma == 0.0 ? 1 : repeats;
    for (std::size_t r = 0; r < reps; ++r) {
      const FeatureMatrix noisy = add_feature_noise(ds.features, sigma, base_seed + r);
      const auto dgc = train_on(preprocess(ds, noisy, dgc_cfg).features, ds, dgc_train);
      const auto sgc = train_on(preprocess(ds, noisy, sgc_cfg).features, ds, sgc_train);
      row.dgc_val_acc += dgc.report.final_val_acc / double(reps);
      row.dgc_test_acc += dgc.report.final_test_acc / double(reps);
      row.sgc_val_acc += sgc.report.final_val_acc / double(reps);
      row.sgc_test_acc += sgc.report.final_test_acc / double(reps);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string noise_csv(const std::vector<NoiseRow>& rows) {
  std::string out = "sigma,dgc_val_acc,dgc_test_acc,sgc_val_acc,sgc_test_acc\n";
  for (const auto& r : rows) {
    out += fmt("%.10g", r.sigma) + "," + fmt("%.6f", r.dgc_val_acc) + "," +
           fmt("%.6f", r.dgc_test_acc) + "," + fmt("%.6f", r.sgc_val_acc) + "," +
           fmt("%.6f", r.sgc_test_acc) + "\n";
  }
  return out;
}

// ---- verification --------------------------------------------------------------

bool VerifyReport::passed() const {
  return bound_violations == 0 && local_violations == 0 && euler_slope_ok() && rk4_slope_ok() &&
         euler_monotone && equilibrium_max_rel_err <= 1e-12 && semigroup_max_err <= 1e-10 &&
         sgc_equivalence_max_err <= 1e-12 && power_iteration_max_err <= 1e-6 &&
         gradient_max_rel_err <= 1e-6;
}

double gradient_check(std::size_t instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> n_dist(1, 10);
  std::uniform_int_distribution<std::size_t> d_dist(1, 5);
  std::uniform_int_distribution<std::size_t> c_dist(2, 4);
  std::uniform_real_distribution<double> wd_dist(0.0, 0.1);
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t inst = 0; inst < instances; ++inst) {
    const std::size_t n = n_dist(rng);
    const std::size_t d = d_dist(rng);
    const std::size_t c = c_dist(rng);
    const Matrix x = random_normal(n, d, rng);
    SoftmaxModel m = SoftmaxModel::zeros(d, c);
    m.theta = random_normal(d, c, rng, 0.5);
    std::normal_distribution<double> g(0.0, 0.5);
    for (double& b : m.bias) b = g(rng);
    Labels labels(n);
    std::uniform_int_distribution<int> lab(0, static_cast<int>(c) - 1);
    for (auto& l : labels) l = lab(rng);
    NodeMask mask(n);
    std::bernoulli_distribution coin(0.7);
    for (std::size_t i = 0; i < n; ++i) mask[i] = coin(rng);
    mask[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = true;
    const double wd = wd_dist(rng);

    const LossAndGrad lg = loss_and_grad(m, x, labels, mask, wd);
    auto rel = [](double a, double f) {
      return std::abs(a - f) / std::max({std::abs(a), std::abs(f), 1e-3});
    };
    for (std::size_t k = 0; k < m.theta.size(); ++k) {
      SoftmaxModel up = m;
      SoftmaxModel dn = m;
      up.theta.data()[k] += h;
      dn.theta.data()[k] -= h;
      const double fd = (loss_and_grad(up, x, labels, mask, wd).loss -
                         loss_and_grad(dn, x, labels, mask, wd).loss) / (2 * h);
      worst = std::max(worst, rel(lg.grad_theta.data()[k], fd));
    }
    for (std::size_t k = 0; k < c; ++k) {
      SoftmaxModel up = m;
      SoftmaxModel dn = m;
      up.bias[k] += h;
      dn.bias[k] -= h;
      const double fd = (loss_and_grad(up, x, labels, mask, wd).loss -
                         loss_and_grad(dn, x, labels, mask, wd).loss) / (2 * h);
      worst = std::max(worst, rel(lg.grad_bias[k], fd));
    }
  }
  return worst;
}

VerifyReport run_verify(const VerifyOptions& opts) {
  const auto t0 = Clock::now();
  VerifyReport rep;
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> n_dist(4, std::max<std::size_t>(4, opts.max_nodes));
  const double times[] = {0.5, 1.0, 2.0, 4.0};
  rep.euler_slope_min = rep.rk4_slope_min = std::numeric_limits<double>::infinity();
  rep.euler_slope_max = rep.rk4_slope_max = -std::numeric_limits<double>::infinity();

  for (std::size_t gi = 0; gi < opts.graphs; ++gi) {
    const std::size_t n = n_dist(rng);
    const SparseGraph graph = random_graph(n, opts.edge_prob, rng);
    const auto eig = oracle::eigendecompose(oracle::dense_laplacian(graph, Variant::Aug));
    const double norm_l = eig.max_eigenvalue();
    const PropagationMatrix s = normalize(graph, Variant::Aug);
    Matrix x0 = random_normal(n, opts.feature_dim, rng);
    const double nx = frobenius_norm(x0);
    for (double& v : x0.values()) v /= nx;

    VerifyGraphRow row;
    row.graph = gi;
    row.nodes = n;
    row.norm_l = norm_l;

    // Global bound over the (T, K) grid.
    for (double T : times) {
      const Matrix exact = oracle::exact_heat_kernel(eig, T, x0);
      for (std::uint64_t K = 1; K <= 64; K *= 2) {
        const double err = frobenius_distance(euler_propagate(x0, s, T, K), exact);
        const double bound = oracle::euler_error_bound(T, K, norm_l, 1.0);
        ++row.bound_checks;
        if (err > bound) ++row.bound_violations;
        if (bound > 0.0) row.max_bound_ratio = std::max(row.max_bound_ratio, err / bound);
      }
    }

    // Local truncation along the exact trajectory, T = 1.
    for (std::uint64_t K = 1; K <= 8; K *= 2) {
      const double hstep = 1.0 / static_cast<double>(K);
      const double bound = oracle::euler_local_error_bound(hstep, norm_l, 1.0);
      for (std::uint64_t k = 0; k < K; ++k) {
        const Matrix xk = oracle::exact_heat_kernel(eig, hstep * double(k), x0);
        const Matrix next_exact = oracle::exact_heat_kernel(eig, hstep, xk);
        const Matrix next_euler = euler_propagate(xk, s, hstep, 1);
        if (frobenius_distance(next_exact, next_euler) > bound) ++row.local_violations;
      }
    }

    // Euler order at T = 1: K = 2 .. 512.
    {
      const Matrix exact = oracle::exact_heat_kernel(eig, 1.0, x0);
      double prev = std::numeric_limits<double>::infinity();
      double last = 0.0;
      for (std::uint64_t K = 2; K <= 512; K *= 2) {
        const double err = frobenius_distance(euler_propagate(x0, s, 1.0, K), exact);
        if (!(err < prev)) row.euler_monotone = false;
        if (K == 512) row.euler_slope = std::log2(last / err);
        last = err;
        prev = err;
      }
    }
    // RK4 order at T = 4: finest pair (K, 2K) whose finer error stays above
    // the 1e-12 floor.
    {
      const Matrix exact = oracle::exact_heat_kernel(eig, 4.0, x0);
      double prev = frobenius_distance(rk4_propagate(x0, s, 4.0, 4), exact);
      row.rk4_slope = std::numeric_limits<double>::quiet_NaN();
      for (std::uint64_t K = 8; K <= 256; K *= 2) {
        const double err = frobenius_distance(rk4_propagate(x0, s, 4.0, K), exact);
        if (err < 1e-12) break;
        row.rk4_slope = std::log2(prev / err);
        prev = err;
      }
    }

    rep.bound_violations += row.bound_violations;
    rep.local_violations += row.local_violations;
    rep.euler_monotone = rep.euler_monotone && row.euler_monotone;
    rep.euler_slope_min = std::min(rep.euler_slope_min, row.euler_slope);
    rep.euler_slope_max = std::max(rep.euler_slope_max, row.euler_slope);
    if (std::isnan(row.rk4_slope)) {
      rep.rk4_slope_min = std::min(rep.rk4_slope_min, 0.0);
    } else {
      rep.rk4_slope_min = std::min(rep.rk4_slope_min, row.rk4_slope);
      rep.rk4_slope_max = std::max(rep.rk4_slope_max, row.rk4_slope);
    }

    // Equilibrium: v_i = sqrt(deg~_i) is a fixed point of S.
    {
      const auto deg = graph.degrees();
      Matrix v(n, 1);
      for (std::size_t i = 0; i < n; ++i) v(i, 0) = std::sqrt(deg[i] + 1.0);
      const double nv = frobenius_norm(v);
      const Matrix outs[] = {euler_propagate(v, s, 5.3, 50), rk4_propagate(v, s, 2.0, 10),
                             sgc_propagate(v, s, 5)};
      for (const auto& o : outs)
        rep.equilibrium_max_rel_err =
            std::max(rep.equilibrium_max_rel_err, frobenius_distance(o, v) / nv);
    }
    // Semigroup of the exact kernel.
    {
      const Matrix a = oracle::exact_heat_kernel(eig, 0.7, oracle::exact_heat_kernel(eig, 1.3, x0));
      const Matrix b = oracle::exact_heat_kernel(eig, 2.0, x0);
      rep.semigroup_max_err = std::max(rep.semigroup_max_err, frobenius_distance(a, b));
    }
    // Euler with step 1 is SGC.
    for (std::uint64_t k : {1u, 2u, 5u}) {
      rep.sgc_equivalence_max_err =
          std::max(rep.sgc_equivalence_max_err,
                   max_abs_diff(euler_propagate(x0, s, double(k), k), sgc_propagate(x0, s, k)));
    }
    // Power iteration against the dense spectrum.
    {
      const double est = spectral_norm(LaplacianHandle(s), 1e-12, 20000).value;
      rep.power_iteration_max_err = std::max(rep.power_iteration_max_err, std::abs(est - norm_l));
    }
    rep.graphs.push_back(row);
  }
  if (opts.graphs == 0) {
    rep.euler_slope_min = rep.euler_slope_max = rep.rk4_slope_min = rep.rk4_slope_max = 0.0;
  }
  rep.gradient_max_rel_err = gradient_check(opts.gradient_instances, opts.seed ^ 0x9e3779b97f4a7c15ULL);
  rep.seconds = ms_since(t0) / 1000.0;
  return rep;
}

std::string verify_csv(const VerifyReport& r) {
  std::string out =
      "graph,nodes,norm_l,euler_slope,rk4_slope,bound_checks,bound_violations,local_violations,"
      "max_bound_ratio\n";
  for (const auto& g : r.graphs) {
    out += std::to_string(g.graph) + "," + std::to_string(g.nodes) + "," + fmt("%.10f", g.norm_l) +
           "," + fmt("%.6f", g.euler_slope) + "," + fmt("%.6f", g.rk4_slope) + "," +
           std::to_string(g.bound_checks) + "," + std::to_string(g.bound_violations) + "," +
           std::to_string(g.local_violations) + "," + fmt("%.6e", g.max_bound_ratio) + "\n";
  }
  return out;
}

// ---- learning risk ---------------------------------------------------------------

std::vector<RiskRow> run_risk(const SbmConfig& sbm, std::span<const double> t_hat_grid,
                              const RiskOptions& opts) {
  if (!(opts.max_step > 0.0)) throw Error(Errc::InvalidArgument, "max_step must be positive");
  const SbmDataset data = generate_sbm(sbm);
  const LabeledDataset& ds = data.dataset;
  const Matrix w = least_squares(rows_of(data.clean_features, ds.train_mask),
                                 one_hot(ds.labels, ds.train_mask, ds.num_classes), opts.ridge);
  const Matrix y_test = one_hot(ds.labels, ds.test_mask, ds.num_classes);
  const double n_test = static_cast<double>(y_test.rows());
  const PropagationMatrix s = normalize(ds.graph, Variant::Aug);

  std::vector<RiskRow> rows;
  for (double t_hat : t_hat_grid) {
    if (!(t_hat >= 0.0)) throw Error(Errc::InvalidArgument, "T_hat must be >= 0");
    RiskRow row;
    row.t_hat = t_hat;
    row.steps = static_cast<std::uint64_t>(std::ceil(t_hat / opts.max_step - 1e-9));
    const FeatureMatrix x_hat = euler_propagate(ds.features, s, t_hat, row.steps);
    const Matrix pred = matmul(rows_of(x_hat, ds.test_mask), w);
    row.risk = std::pow(frobenius_distance(pred, y_test), 2) / n_test;
    const TrainResult tr = train_on(x_hat, ds, opts.train);
    row.val_acc = tr.report.final_val_acc;
    row.test_acc = tr.report.final_test_acc;
    rows.push_back(row);
  }
  return rows;
}

std::string risk_csv(const std::vector<RiskRow>& rows) {
  std::string out = "t_hat,steps,val_acc,test_acc,risk\n";
  for (const auto& r : rows) {
    out += fmt("%.10g", r.t_hat) + "," + std::to_string(r.steps) + "," + fmt("%.6f", r.val_acc) +
           "," + fmt("%.6f", r.test_acc) + "," + fmt("%.8e", r.risk) + "\n";
  }
  return out;
}

// ---- timing ------------------------------------------------------------------------

std::vector<BenchRow> run_bench(const LabeledDataset& ds, std::span<const DiffusionConfig> cfgs,
                                const TrainConfig& tc, std::size_t runs) {
  if (runs == 0) throw Error(Errc::InvalidArgument, "runs must be >= 1");
  std::vector<BenchRow> rows;
  for (const auto& cfg : cfgs) {
    std::vector<double> pre_ms;
    std::vector<double> train_ms;
    for (std::size_t r = 0; r < runs; ++r) {
      Preprocessed pre = preprocess(ds, cfg);
      pre_ms.push_back(pre.ms);
      train_ms.push_back(train_on(pre.features, ds, tc).report.train_ms);
    }
    rows.push_back({cfg, median(pre_ms), median(train_ms)});
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "scheme,laplacian,T,K,preprocess_ms,train_ms\n";
  for (const auto& r : rows) {
    out += std::string(to_string(r.config.scheme)) + "," + to_string(r.config.variant) + "," +
           fmt("%.10g", r.config.terminal_time) + "," + std::to_string(r.config.steps) + "," +
           fmt("%.3f", r.preprocess_ms) + "," + fmt("%.3f", r.train_ms) + "\n";
  }
  return out;
}

}  // namespace dgc
