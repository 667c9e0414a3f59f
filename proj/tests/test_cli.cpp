#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

#include "dgc/data.hpp"
#include "dgc/feature_cache.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kCli = DGC_CLI_PATH;
const fs::path kFixtures = DGC_FIXTURE_DIR;

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with `args`, capturing stdout; stderr goes to a side file.
Run run(const std::string& args, const fs::path& work) {
  const fs::path out = work / "stdout.txt";
  const std::string cmd =
      kCli.string() + " " + args + " > " + out.string() + " 2> " + (work / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream is(out);
  r.out.assign(std::istreambuf_iterator<char>(is), {});
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  return {std::istreambuf_iterator<char>(is), {}};
}

struct Workdir {
  fs::path path = fs::temp_directory_path() / "dgc_test_cli";
  Workdir() {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Workdir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("usage and IO errors exit with 2") {
  Workdir w;
  CHECK(run("", w.path).code == 2);
  CHECK(run("train", w.path).code == 2);
  CHECK(run("train --data " + (w.path / "nope").string(), w.path).code == 2);
  CHECK(!slurp(w.path / "stderr.txt").empty());
  CHECK(run("train --data " + (kFixtures / "overlap").string(), w.path).code == 2);
  CHECK(run("sweep --data " + (kFixtures / "tiny_tsv").string() + " --values 3,1", w.path).code ==
        2);
  CHECK(run("--help", w.path).code == 0);
}

TEST_CASE("synth, preprocess and train") {
  Workdir w;
  const fs::path bundle = w.path / "sbm";
  REQUIRE(run("synth --t-star 0 --nodes-per-block 40 --out " + bundle.string(), w.path).code == 0);
  const auto ds = dgc::load_bundle(bundle);
  CHECK(ds.num_nodes() == 120);

  // T = 0 caches the (normalized) input features.
  const fs::path cache0 = w.path / "t0.dgcf";
  REQUIRE(run("preprocess --data " + bundle.string() + " --T 0 --K 0 --out " + cache0.string(),
              w.path)
              .code == 0);
  CHECK(dgc::read_feature_cache(cache0).features == ds.features);

  const fs::path cache = w.path / "f.dgcf";
  REQUIRE(run("preprocess --data " + bundle.string() + " --T 3 --K 30 --out " + cache.string(),
              w.path)
              .code == 0);
  CHECK(dgc::read_feature_cache(cache).config.steps == 30);

  const std::string train = "train --data " + bundle.string() + " --cache " + cache.string();
  const Run a = run(train, w.path);
  REQUIRE(a.code == 0);
  const Run b = run(train, w.path);
  auto ja = nlohmann::json::parse(a.out);
  auto jb = nlohmann::json::parse(b.out);
  ja.erase("timings_ms");
  jb.erase("timings_ms");
  CHECK(ja == jb);
  CHECK(ja.at("config").at("diffusion").at("K") == 30);
  CHECK(ja.at("config").at("weight_decay").get<double>() > 0.0);

  const Run fixed = run(train + " --weight-decay 1e-4 --checkpoint " +
                            (w.path / "m.dgcm").string(),
                        w.path);
  REQUIRE(fixed.code == 0);
  CHECK(nlohmann::json::parse(fixed.out).at("config").at("weight_decay") == 1e-4);
  CHECK(fs::exists(w.path / "m.dgcm"));
}

TEST_CASE("experiment commands write CSV") {
  Workdir w;
  const fs::path bundle = w.path / "sbm";
  REQUIRE(run("synth --t-star 0 --nodes-per-block 30 --out " + bundle.string(), w.path).code == 0);
  const std::string data = " --data " + bundle.string() + " --weight-decay 1e-5";

  const Run sweep = run("sweep" + data + " --param K --values 1,4 --T 2", w.path);
  REQUIRE(sweep.code == 0);
  CHECK(sweep.out.rfind("param,value,val_acc,test_acc,preprocess_ms,train_ms\nK,1,", 0) == 0);

  const fs::path csv = w.path / "noise.csv";
  REQUIRE(run("noise" + data + " --sigmas 0,0.1 --repeats 1 --out " + csv.string(), w.path).code ==
          0);
  CHECK(slurp(csv).rfind("sigma,dgc_val_acc,dgc_test_acc,sgc_val_acc,sgc_test_acc\n", 0) == 0);

  const Run bench = run("bench" + data + " --runs 1", w.path);
  REQUIRE(bench.code == 0);
  CHECK(bench.out.rfind("scheme,laplacian,T,K,preprocess_ms,train_ms\neuler,aug,", 0) == 0);

  const Run risk = run("risk --grid 0:1:0.5 --nodes-per-block 20", w.path);
  REQUIRE(risk.code == 0);
  CHECK(risk.out.rfind("t_hat,steps,val_acc,test_acc,risk\n", 0) == 0);

  const Run verify = run("verify --graphs 4", w.path);
  CHECK(verify.code == 0);
  CHECK(verify.out.rfind("graph,nodes,", 0) == 0);
}
