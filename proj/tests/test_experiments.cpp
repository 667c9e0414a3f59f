#include <algorithm>
#include <cmath>
#include <sstream>

#include "dgc/experiments.hpp"
#include "test_support.hpp"

using namespace dgc;

namespace {

LabeledDataset small_sbm() {
  SbmConfig cfg;
  cfg.nodes_per_block = 30;
  cfg.noise_sigma = 0.8;
  return generate_sbm(cfg).dataset;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("parse_values") {
  CHECK(parse_values("2,4,8") == std::vector<double>{2, 4, 8});
  const auto r = parse_values("0:1:0.25");
  REQUIRE(r.size() == 5);
  CHECK(r.back() == doctest::Approx(1.0));
  CHECK(parse_values("0:10:0.25").size() == 41);
  CHECK(parse_values("0:5:0.1").size() == 51);
  CHECK_ERRC(parse_values("3,2"), Errc::InvalidArgument);
  CHECK_ERRC(parse_values("1:0:0.1"), Errc::InvalidArgument);
  CHECK_ERRC(parse_values("a,b"), Errc::InvalidArgument);
  CHECK_ERRC(parse_values(""), Errc::InvalidArgument);
}

TEST_CASE("log_spaced_steps") {
  const auto k = log_spaced_steps(2, 1000, 12);
  CHECK(k.front() == 2);
  CHECK(k.back() == 1000);
  for (std::size_t i = 1; i < k.size(); ++i) {
    CHECK(k[i] > k[i - 1]);
    CHECK(k[i] == std::round(k[i]));
  }
}

TEST_CASE("weight-decay tuning picks from the grid") {
  const LabeledDataset ds = small_sbm();
  const auto pre = preprocess(ds, DiffusionConfig{Scheme::Euler, Variant::Aug, 2.0, 20});
  const auto grid = default_wd_grid();
  CHECK(grid == std::vector<double>{1e-6, 5e-6, 1e-5, 5e-5, 1e-4, 5e-4});
  const TuneResult best = tune_weight_decay(pre.features, ds, TrainConfig{}, grid);
  CHECK(std::find(grid.begin(), grid.end(), best.weight_decay) != grid.end());
  // Same value everywhere: the first grid entry wins.
  const std::vector<double> flat{3e-4, 3e-4};
  CHECK(tune_weight_decay(pre.features, ds, TrainConfig{}, flat).weight_decay == 3e-4);
}

TEST_CASE("sweep rows and CSV") {
  const LabeledDataset ds = small_sbm();
  const DiffusionConfig base{Scheme::Euler, Variant::Aug, 2.0, 20};
  const auto rows = run_sweep(ds, {SweepParam::T, {0.0, 1.0, 2.0}}, base, TrainConfig{});
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].value == 1.0);
  for (const auto& r : rows) CHECK(r.param == "T");
  const std::string csv = sweep_csv(rows);
  CHECK(first_line(csv) == "param,value,val_acc,test_acc,preprocess_ms,train_ms");
  CHECK(csv.back() == '\n');
  CHECK(csv.find('\r') == std::string::npos);

  const auto sgc = run_sweep(ds, {SweepParam::K, {1, 3}}, DiffusionConfig::sgc(2), TrainConfig{});
  CHECK(sgc.size() == 2);
  const auto again = run_sweep(ds, {SweepParam::K, {1, 3}}, DiffusionConfig::sgc(2), TrainConfig{});
  CHECK(sgc[1].test_acc == again[1].test_acc);
  CHECK_ERRC(run_sweep(ds, {SweepParam::T, {1.0}}, DiffusionConfig::sgc(2), TrainConfig{}),
             Errc::InvalidArgument);
}

TEST_CASE("noise rows") {
  const LabeledDataset ds = small_sbm();
  const std::vector<double> sigmas{0.0, 0.5};
  const auto rows = run_noise(ds, sigmas, DiffusionConfig{Scheme::Euler, Variant::Aug, 3.0, 30},
                              TrainConfig{}, DiffusionConfig::sgc(2), TrainConfig{}, 2, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].sigma == 0.0);
  CHECK(first_line(noise_csv(rows)) ==
        "sigma,dgc_val_acc,dgc_test_acc,sgc_val_acc,sgc_test_acc");
}

TEST_CASE("verify on a handful of graphs") {
  VerifyOptions opts;
  opts.graphs = 6;
  opts.gradient_instances = 5;
  const VerifyReport r = run_verify(opts);
  CHECK(r.graphs.size() == 6);
  CHECK(r.bound_violations == 0);
  CHECK(r.local_violations == 0);
  CHECK(r.euler_slope_ok());
  CHECK(r.rk4_slope_ok());
  CHECK(r.passed());
  CHECK(first_line(verify_csv(r)) ==
        "graph,nodes,norm_l,euler_slope,rk4_slope,bound_checks,bound_violations,local_violations,"
        "max_bound_ratio");
}

TEST_CASE("risk without corruption prefers little smoothing") {
  SbmConfig cfg;
  cfg.t_star = 0.0;
  const std::vector<double> grid = parse_values("0:1:0.1");
  const auto rows = run_risk(cfg, grid, RiskOptions{});
  REQUIRE(rows.size() == grid.size());
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].risk < rows[best].risk) best = i;
  CHECK(rows[best].t_hat <= 0.3);
  CHECK(rows[0].steps == 0);
  CHECK(first_line(risk_csv(rows)) == "t_hat,steps,val_acc,test_acc,risk");
}

TEST_CASE("bench rows") {
  SbmConfig cfg;
  cfg.nodes_per_block = 40;
  const LabeledDataset ds = generate_sbm(cfg).dataset;
  const std::vector<DiffusionConfig> cfgs{{Scheme::Euler, Variant::Aug, 5.3, 2},
                                          {Scheme::Euler, Variant::Aug, 5.3, 100}};
  TrainConfig tc;
  tc.weight_decay = 1e-5;
  const auto rows = run_bench(ds, cfgs, tc, 3);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].config.steps == 100);
  CHECK(rows[1].preprocess_ms > rows[0].preprocess_ms);
  CHECK(first_line(bench_csv(rows)) == "scheme,laplacian,T,K,preprocess_ms,train_ms");
}
