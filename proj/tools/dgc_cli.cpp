// dgc: command-line front end for feature propagation, training and the
// experiment harness. Exit codes: 0 success, 1 verification failure,
// 2 usage or I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "dgc/classifier.hpp"
#include "dgc/data.hpp"
#include "dgc/diffusion.hpp"
#include "dgc/error.hpp"
#include "dgc/experiments.hpp"
#include "dgc/feature_cache.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct DiffusionFlags {
  std::string scheme = "euler";
  std::string laplacian = "aug";
  double T = 5.3;
  std::uint64_t K = 250;

  void add(CLI::App* app) {
    app->add_option("--scheme", scheme, "Propagation scheme: sgc | euler | rk4")
        ->capture_default_str();
    app->add_option("--laplacian", laplacian, "Normalization: aug (self-loops) | sym")
        ->capture_default_str();
    app->add_option("--T", T, "Terminal time (ignored for sgc, where T = K)")->capture_default_str();
    app->add_option("--K", K, "Propagation steps")->capture_default_str();
  }

  dgc::DiffusionConfig config() const {
    dgc::DiffusionConfig cfg;
    cfg.scheme = dgc::parse_scheme(scheme);
    cfg.variant = dgc::parse_variant(laplacian);
    cfg.steps = K;
    cfg.terminal_time = cfg.scheme == dgc::Scheme::Sgc ? static_cast<double>(K) : T;
    return cfg;
  }
};

struct TrainFlags {
  double lr = 0.2;
  int epochs = 100;
  std::optional<double> weight_decay;
  std::string wd_grid;
  std::string optimizer = "adam";
  std::uint64_t seed = 0;
  bool no_bias = false;

  void add(CLI::App* app) {
    app->add_option("--lr", lr, "Learning rate")->capture_default_str();
    app->add_option("--epochs", epochs, "Full-batch epochs")->capture_default_str();
    app->add_option("--weight-decay", weight_decay,
                    "Fixed weight decay (otherwise tuned on validation accuracy over --wd-grid)");
    app->add_option("--wd-grid", wd_grid,
                    "Weight-decay grid, comma list (default 1e-6,5e-6,1e-5,5e-5,1e-4,5e-4)");
    app->add_option("--optimizer", optimizer, "adam | gd")->capture_default_str();
    app->add_option("--seed", seed, "Seed for noise draws")->capture_default_str();
    app->add_flag("--no-bias", no_bias, "Drop the classifier bias term");
  }

  dgc::TrainConfig config() const {
    dgc::TrainConfig cfg;
    cfg.learning_rate = lr;
    cfg.epochs = epochs;
    cfg.optimizer = dgc::parse_optimizer(optimizer);
    cfg.seed = seed;
    cfg.use_bias = !no_bias;
    cfg.weight_decay = weight_decay.value_or(0.0);
    dgc::validate(cfg);
    return cfg;
  }

  std::vector<double> grid() const {
    return wd_grid.empty() ? dgc::default_wd_grid() : dgc::parse_values(wd_grid);
  }

  /// Fixed weight decay, or the best grid value on the given features.
  dgc::TrainConfig resolve(const dgc::FeatureMatrix& propagated, const dgc::LabeledDataset& ds,
                           const char* label = "") const {
    dgc::TrainConfig cfg = config();
    if (weight_decay) return cfg;
    const auto grid_values = grid();
    const auto best = dgc::tune_weight_decay(propagated, ds, cfg, grid_values);
    std::fprintf(stderr, "%stuned weight decay: %g (val acc %.4f)\n", label, best.weight_decay,
                 best.val_acc);
    cfg.weight_decay = best.weight_decay;
    return cfg;
  }
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw dgc::Error(dgc::Errc::Io, "cannot write " + out);
  os << text;
}

nlohmann::json diffusion_json(const dgc::DiffusionConfig& cfg) {
  return {{"scheme", dgc::to_string(cfg.scheme)},
          {"laplacian", dgc::to_string(cfg.variant)},
          {"T", cfg.terminal_time},
          {"K", cfg.steps}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoupled graph convolution: graph heat-equation feature propagation, "
               "softmax training and experiment harness"};
  app.require_subcommand(1);

  std::string data_dir;
  std::string out;

  // preprocess
  DiffusionFlags pre_diff;
  auto* pre = app.add_subcommand("preprocess", "Propagate bundle features and write a DGCF cache");
  pre->add_option("--data", data_dir, "Graph-bundle directory")->required();
  pre->add_option("--out", out, "Cache file to write")->required();
  pre_diff.add(pre);

  // train
  DiffusionFlags train_diff;
  TrainFlags train_flags;
  std::string cache_file;
  std::string checkpoint;
  auto* trn = app.add_subcommand("train", "Train the softmax classifier; prints the report JSON");
  trn->add_option("--data", data_dir, "Graph-bundle directory")->required();
  trn->add_option("--cache", cache_file, "Use propagated features from a DGCF cache");
  trn->add_option("--checkpoint", checkpoint, "Write the trained model (DGCM) here");
  trn->add_option("--out", out, "Report JSON path (default stdout)");
  train_diff.add(trn);
  train_flags.add(trn);

  // sweep
  DiffusionFlags sweep_diff;
  TrainFlags sweep_train;
  std::string sweep_param = "K";
  std::string sweep_values;
  bool retune = false;
  auto* swp = app.add_subcommand(
      "sweep", "Train once per parameter value.\nCSV: param,value,val_acc,test_acc,preprocess_ms,train_ms");
  swp->add_option("--data", data_dir, "Graph-bundle directory")->required();
  swp->add_option("--param", sweep_param, "T | K | sigma")->capture_default_str();
  swp->add_option("--values", sweep_values, "Comma list or start:stop:step")->required();
  swp->add_flag("--retune", retune, "Re-tune weight decay at every sweep point");
  swp->add_option("--out", out, "CSV path (default stdout)");
  sweep_diff.add(swp);
  sweep_train.add(swp);

  // noise
  DiffusionFlags noise_diff;
  TrainFlags noise_train;
  std::string sigmas = "0,0.02,0.05,0.1";
  std::uint64_t sgc_k = 2;
  std::size_t repeats = 5;
  auto* noi = app.add_subcommand(
      "noise", "Compare DGC and SGC under Gaussian feature noise.\n"
               "CSV: sigma,dgc_val_acc,dgc_test_acc,sgc_val_acc,sgc_test_acc");
  noi->add_option("--data", data_dir, "Graph-bundle directory")->required();
  noi->add_option("--sigmas", sigmas, "Noise standard deviations")->capture_default_str();
  noi->add_option("--sgc-K", sgc_k, "SGC propagation steps")->capture_default_str();
  noi->add_option("--repeats", repeats, "Noise draws averaged per sigma")->capture_default_str();
  noi->add_option("--out", out, "CSV path (default stdout)");
  noise_diff.add(noi);
  noise_train.add(noi);

  // verify
  dgc::VerifyOptions vopts;
  auto* ver = app.add_subcommand(
      "verify", "Check integrators and error bounds against the dense oracle.\n"
                "CSV: graph,nodes,norm_l,euler_slope,rk4_slope,bound_checks,bound_violations,"
                "local_violations,max_bound_ratio");
  ver->add_option("--seed", vopts.seed, "Random-graph seed")->capture_default_str();
  ver->add_option("--graphs", vopts.graphs, "Number of random graphs")->capture_default_str();
  ver->add_option("--out", out, "CSV path (default stdout)");

  // risk
  dgc::SbmConfig sbm;
  sbm.t_star = 2.0;
  std::string grid = "0:5:0.1";
  dgc::RiskOptions ropts;
  auto* rsk = app.add_subcommand(
      "risk", "Learning risk versus terminal time on a backward-diffused SBM.\n"
              "CSV: t_hat,steps,val_acc,test_acc,risk");
  auto add_sbm = [&](CLI::App* sub) {
    sub->add_option("--blocks", sbm.blocks, "Communities")->capture_default_str();
    sub->add_option("--nodes-per-block", sbm.nodes_per_block, "Nodes per community")
        ->capture_default_str();
    sub->add_option("--p-in", sbm.p_in, "Within-block edge probability")->capture_default_str();
    sub->add_option("--p-out", sbm.p_out, "Cross-block edge probability")->capture_default_str();
    sub->add_option("--feature-dim", sbm.feature_dim, "Feature dimension")->capture_default_str();
    sub->add_option("--class-sep", sbm.class_sep, "Class-mean scale")->capture_default_str();
    sub->add_option("--noise-sigma", sbm.noise_sigma, "Clean-feature noise")->capture_default_str();
    sub->add_option("--t-star", sbm.t_star, "Backward diffusion time")->capture_default_str();
    sub->add_option("--sbm-seed", sbm.seed, "Generator seed")->capture_default_str();
  };
  add_sbm(rsk);
  rsk->add_option("--grid", grid, "T_hat values")->capture_default_str();
  rsk->add_option("--max-step", ropts.max_step, "Euler step cap")->capture_default_str();
  rsk->add_option("--out", out, "CSV path (default stdout)");

  // bench
  DiffusionFlags bench_diff;
  TrainFlags bench_train;
  std::string k_list = "2,100";
  std::size_t runs = 5;
  auto* ben = app.add_subcommand(
      "bench", "Median preprocess/train wall time per K.\n"
               "CSV: scheme,laplacian,T,K,preprocess_ms,train_ms");
  ben->add_option("--data", data_dir, "Graph-bundle directory")->required();
  ben->add_option("--K-list", k_list, "Step counts to time")->capture_default_str();
  ben->add_option("--runs", runs, "Repetitions (median reported)")->capture_default_str();
  ben->add_option("--out", out, "CSV path (default stdout)");
  bench_diff.add(ben);
  bench_train.add(ben);

  // synth
  std::string features_format = "bin";
  auto* syn = app.add_subcommand("synth", "Write a planted-partition (SBM) graph bundle");
  add_sbm(syn);
  syn->add_option("--features-format", features_format, "bin | tsv")->capture_default_str();
  syn->add_option("--out", out, "Bundle directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*pre) {
      const auto ds = dgc::load_bundle(data_dir);
      const auto cfg = pre_diff.config();
      const auto result = dgc::preprocess(ds, cfg);
      dgc::write_feature_cache(out, result.features, cfg);
      std::printf("preprocess_ms=%.3f n=%zu d=%zu\n", result.ms, result.features.rows(),
                  result.features.cols());
      return kExitOk;
    }

    if (*trn) {
      const auto ds = dgc::load_bundle(data_dir);
      dgc::DiffusionConfig cfg;
      dgc::FeatureMatrix features;
      double preprocess_ms = 0.0;
      if (!cache_file.empty()) {
        auto cache = dgc::read_feature_cache(cache_file);
        if (cache.features.rows() != ds.num_nodes()) {
          throw dgc::Error(dgc::Errc::DimensionMismatch, "cache rows do not match the bundle");
        }
        cfg = cache.config;
        features = std::move(cache.features);
      } else {
        cfg = train_diff.config();
        auto result = dgc::preprocess(ds, cfg);
        features = std::move(result.features);
        preprocess_ms = result.ms;
      }
      const auto tc = train_flags.resolve(features, ds);
      auto trained = dgc::train_on(features, ds, tc);
      trained.report.preprocess_ms = preprocess_ms;
      nlohmann::json report = dgc::report_to_json(trained.report);
      report["config"]["diffusion"] = diffusion_json(cfg);
      report["config"]["data"] = data_dir;
      if (!checkpoint.empty()) dgc::write_checkpoint(checkpoint, trained.model);
      emit(report.dump(2) + "\n", out);
      return kExitOk;
    }

    if (*swp) {
      const auto ds = dgc::load_bundle(data_dir);
      const auto base = sweep_diff.config();
      dgc::SweepSpec spec{dgc::parse_sweep_param(sweep_param), dgc::parse_values(sweep_values)};
      std::vector<dgc::SweepRow> rows;
      if (retune) {
        for (double v : spec.values) {
          dgc::SweepSpec one{spec.parameter, {v}};
          dgc::DiffusionConfig cfg = base;
          if (spec.parameter == dgc::SweepParam::T) cfg.terminal_time = v;
          if (spec.parameter == dgc::SweepParam::K) {
            cfg.steps = static_cast<std::uint64_t>(v);
            if (cfg.scheme == dgc::Scheme::Sgc) cfg.terminal_time = v;
          }
          const auto pre_feats = spec.parameter == dgc::SweepParam::Sigma
                                     ? dgc::preprocess(ds, dgc::add_feature_noise(ds.features, v, sweep_train.seed), cfg)
                                     : dgc::preprocess(ds, cfg);
          const auto tc = sweep_train.resolve(pre_feats.features, ds);
          auto r = dgc::run_sweep(ds, one, base, tc, sweep_train.seed);
          rows.push_back(r.front());
        }
      } else {
        const auto tc = sweep_train.resolve(dgc::preprocess(ds, base).features, ds);
        rows = dgc::run_sweep(ds, spec, base, tc, sweep_train.seed);
      }
      emit(dgc::sweep_csv(rows), out);
      return kExitOk;
    }

    if (*noi) {
      const auto ds = dgc::load_bundle(data_dir);
      const auto dgc_cfg = noise_diff.config();
      const auto sgc_cfg = dgc::DiffusionConfig::sgc(sgc_k, dgc_cfg.variant);
      const auto dgc_tc = noise_train.resolve(dgc::preprocess(ds, dgc_cfg).features, ds, "dgc ");
      const auto sgc_tc = noise_train.resolve(dgc::preprocess(ds, sgc_cfg).features, ds, "sgc ");
      const auto sigma_values = dgc::parse_values(sigmas);
      const auto rows = dgc::run_noise(ds, sigma_values, dgc_cfg, dgc_tc, sgc_cfg, sgc_tc, repeats,
                                       noise_train.seed);
      emit(dgc::noise_csv(rows), out);
      return kExitOk;
    }

    if (*ver) {
      const auto rep = dgc::run_verify(vopts);
      emit(dgc::verify_csv(rep), out);
      std::fprintf(stderr,
                   "bound_violations=%zu local_violations=%zu euler_slope=[%.4f, %.4f] "
                   "rk4_slope=[%.4f, %.4f] euler_monotone=%d equilibrium=%.2e semigroup=%.2e "
                   "sgc_equiv=%.2e power_iter=%.2e gradient=%.2e time=%.1fs -> %s\n",
                   rep.bound_violations, rep.local_violations, rep.euler_slope_min,
                   rep.euler_slope_max, rep.rk4_slope_min, rep.rk4_slope_max,
                   int(rep.euler_monotone), rep.equilibrium_max_rel_err, rep.semigroup_max_err,
                   rep.sgc_equivalence_max_err, rep.power_iteration_max_err,
                   rep.gradient_max_rel_err, rep.seconds, rep.passed() ? "PASS" : "FAIL");
      return rep.passed() ? kExitOk : kExitCheckFailed;
    }

    if (*rsk) {
      const auto values = dgc::parse_values(grid);
      emit(dgc::risk_csv(dgc::run_risk(sbm, values, ropts)), out);
      return kExitOk;
    }

    if (*ben) {
      const auto ds = dgc::load_bundle(data_dir);
      std::vector<dgc::DiffusionConfig> cfgs;
      for (double k : dgc::parse_values(k_list)) {
        bench_diff.K = static_cast<std::uint64_t>(k);
        cfgs.push_back(bench_diff.config());
      }
      dgc::TrainConfig tc = bench_train.config();
      emit(dgc::bench_csv(dgc::run_bench(ds, cfgs, tc, runs)), out);
      return kExitOk;
    }

    if (*syn) {
      auto data = dgc::generate_sbm(sbm);
      if (features_format == "tsv") data.dataset.features_format = dgc::FeatureFormat::Tsv;
      else if (features_format != "bin") {
        throw dgc::Error(dgc::Errc::InvalidArgument, "features format must be bin or tsv");
      }
      dgc::write_bundle(data.dataset, out);
      std::printf("wrote %zu nodes, %zu edges to %s\n", data.dataset.num_nodes(),
                  data.dataset.graph.num_edges(), out.c_str());
      return kExitOk;
    }
  } catch (const dgc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
