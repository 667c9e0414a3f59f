#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <set>

#include "dgc/data.hpp"
#include "dgc/feature_cache.hpp"
#include "dgc/oracle.hpp"
#include "test_support.hpp"

using namespace dgc;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = DGC_FIXTURE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dgc_test_" + name);
  fs::remove_all(dir);
  return dir;
}

void expect_same_files(const fs::path& a, const fs::path& b) {
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    const fs::path other = b / entry.path().filename();
    REQUIRE_MESSAGE(fs::exists(other), other.string());
    CHECK_MESSAGE(slurp(entry.path()) == slurp(other), entry.path().filename().string());
  }
  CHECK(files == 5);
}

}  // namespace

TEST_CASE("load the tsv fixture") {
  const LabeledDataset ds = load_bundle(kFixtures / "tiny_tsv");
  CHECK(ds.num_nodes() == 3);
  CHECK(ds.num_classes == 2);
  CHECK(ds.graph.num_edges() == 2);
  CHECK(ds.graph.adjacency().at(2, 1) == 0.5);
  CHECK(ds.features(1, 1) == 0.25);
  CHECK(ds.labels == Labels{0, 1, 1});
  CHECK(ds.train_mask == NodeMask{true, false, false});
  CHECK(ds.test_mask == NodeMask{false, false, true});
}

TEST_CASE("load the binary fixture with row normalization") {
  const LabeledDataset ds = load_bundle(kFixtures / "tiny_bin");
  CHECK(ds.features(0, 0) == 1.0);
  CHECK(ds.features(1, 0) == 0.5);
  CHECK(ds.features(2, 1) == doctest::Approx(2.0 / 3.0));
  const LabeledDataset raw = load_bundle(kFixtures / "tiny_bin", {.honor_row_normalize = false});
  CHECK(raw.features(2, 1) == 2.0);
}

TEST_CASE("overlapping splits are rejected") {
  CHECK_ERRC(load_bundle(kFixtures / "overlap"), Errc::MaskOverlap);
}

TEST_CASE("missing bundles and files") {
  CHECK_ERRC(load_bundle(kFixtures / "does_not_exist"), Errc::MissingFile);
  const fs::path dir = scratch("partial");
  fs::create_directories(dir);
  fs::copy_file(kFixtures / "tiny_tsv" / "meta.json", dir / "meta.json");
  CHECK_ERRC(load_bundle(dir), Errc::MissingFile);
  fs::remove_all(dir);
}

TEST_CASE("malformed bundle content") {
  const fs::path dir = scratch("malformed");
  fs::copy(kFixtures / "tiny_tsv", dir);
  std::ofstream(dir / "labels.tsv") << "0\t0\n1\t5\n2\t1\n";
  CHECK_ERRC(load_bundle(dir), Errc::SchemaViolation);
  std::ofstream(dir / "labels.tsv") << "0\t0\n1\t1\n2\t1\n";
  std::ofstream(dir / "edges.tsv") << "0\t1\n1\t0\n";
  CHECK_ERRC(load_bundle(dir), Errc::DuplicateEdge);
  std::ofstream(dir / "edges.tsv") << "0\tx\n";
  CHECK_ERRC(load_bundle(dir), Errc::SchemaViolation);
  fs::remove_all(dir);
}

TEST_CASE("bundle round trip is byte-identical") {
  for (const char* name : {"tiny_tsv", "tiny_bin"}) {
    const fs::path out = scratch(std::string("rt_") + name);
    write_bundle(load_bundle(kFixtures / name, {.honor_row_normalize = false}), out);
    expect_same_files(kFixtures / name, out);
    fs::remove_all(out);
  }
}

TEST_CASE("generated bundles round trip too") {
  SbmConfig cfg;
  cfg.nodes_per_block = 20;
  SbmDataset sbm = generate_sbm(cfg);
  for (FeatureFormat fmt : {FeatureFormat::Bin, FeatureFormat::Tsv}) {
    sbm.dataset.features_format = fmt;
    const fs::path a = scratch("gen_a"), b = scratch("gen_b");
    write_bundle(sbm.dataset, a);
    const LabeledDataset loaded = load_bundle(a);
    if (fmt == FeatureFormat::Tsv) CHECK(loaded.features == sbm.dataset.features);
    CHECK(loaded.labels == sbm.dataset.labels);
    write_bundle(loaded, b);
    expect_same_files(a, b);
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

TEST_CASE("row_normalize") {
  const Matrix x(2, 2, std::vector<double>{2.0, 2.0, 0.0, 0.0});
  const Matrix y = row_normalize(x);
  CHECK(y(0, 0) == 0.5);
  CHECK(y(0, 1) == 0.5);
  CHECK(y(1, 0) == 0.0);
  CHECK(y(1, 1) == 0.0);
  const Matrix z = row_normalize(Matrix(1, 2, std::vector<double>{-1.0, 3.0}));
  CHECK(z(0, 0) == -0.25);
}

TEST_CASE("feature noise moments") {
  const Matrix x(1000, 1000, 0.5);
  CHECK(add_feature_noise(x, 0.0, 3) == x);
  const double sigma = 0.1;
  const Matrix noisy = add_feature_noise(x, sigma, 3);
  double sum = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = noisy.data()[k] - x.data()[k];
    sum += e;
    sq += e * e;
  }
  const double n = static_cast<double>(x.size());
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) <= 3 * sigma / 1000);
  CHECK(std::abs(sd - sigma) <= 0.01 * sigma);
  CHECK(add_feature_noise(x, sigma, 3) == noisy);
  CHECK_FALSE(add_feature_noise(x, sigma, 4) == noisy);
  CHECK_ERRC(add_feature_noise(x, -1.0, 3), Errc::InvalidArgument);
}

TEST_CASE("SBM generation") {
  SbmConfig cfg;
  SbmDataset clean = generate_sbm(cfg);
  CHECK(clean.dataset.features == clean.clean_features);
  CHECK(clean.dataset.num_nodes() == 180);

  cfg.t_star = 2.0;
  const SbmDataset a = generate_sbm(cfg);
  const SbmDataset b = generate_sbm(cfg);
  CHECK(a.dataset.features == b.dataset.features);
  CHECK(a.clean_features == b.clean_features);
  CHECK(a.dataset.graph.adjacency().col == b.dataset.graph.adjacency().col);
  CHECK(a.dataset.train_mask == b.dataset.train_mask);
  CHECK(a.clean_features == clean.clean_features);

  std::size_t train = 0, val = 0, test = 0;
  for (std::size_t i = 0; i < 180; ++i) {
    train += a.dataset.train_mask[i];
    val += a.dataset.val_mask[i];
    test += a.dataset.test_mask[i];
  }
  CHECK(train == 108);
  CHECK(val == 36);
  CHECK(test == 36);

  // Within-block edges should dominate at p_in = 10 p_out.
  std::size_t inside = 0, across = 0;
  for (const Edge& e : a.dataset.graph.edge_list())
    (a.dataset.labels[e.src] == a.dataset.labels[e.dst] ? inside : across)++;
  CHECK(inside > 2 * across);

  cfg.seed = 8;
  CHECK_FALSE(generate_sbm(cfg).dataset.features == a.dataset.features);
}

TEST_CASE("SBM corruption is invertible") {
  SbmConfig cfg;
  cfg.t_star = 2.0;
  const SbmDataset sbm = generate_sbm(cfg);
  const auto eig =
      oracle::eigendecompose(oracle::dense_laplacian(sbm.dataset.graph, Variant::Aug));
  const Matrix back = oracle::exact_heat_kernel(eig, cfg.t_star, sbm.dataset.features);
  CHECK(max_abs_diff(back, sbm.clean_features) <= 1e-6);
}

TEST_CASE("SBM limits") {
  SbmConfig cfg;
  cfg.t_star = 1.0;
  cfg.nodes_per_block = 700;
  CHECK_ERRC(generate_sbm(cfg), Errc::OracleLimitExceeded);
  cfg.t_star = 0.0;
  CHECK_NOTHROW(generate_sbm(cfg));
  cfg.p_out = 0.5;
  CHECK_ERRC(generate_sbm(cfg), Errc::InvalidArgument);
}

TEST_CASE("feature cache round trip") {
  const fs::path dir = scratch("cache");
  fs::create_directories(dir);
  std::mt19937_64 rng(31);
  const Matrix x = test::random_matrix(9, 4, rng);
  const DiffusionConfig cfg{Scheme::Rk4, Variant::Sym, 1.5, 12};
  write_feature_cache(dir / "f.dgcf", x, cfg);
  const FeatureCache back = read_feature_cache(dir / "f.dgcf");
  CHECK(back.features == x);
  CHECK(back.config == cfg);
  CHECK(fs::file_size(dir / "f.dgcf") == 4 + 4 + 8 + 8 + 1 + 1 + 8 + 8 + 9 * 4 * 8);

  const std::string bytes = slurp(dir / "f.dgcf");
  CHECK(bytes.substr(0, 4) == "DGCF");
  std::ofstream(dir / "short.dgcf", std::ios::binary) << bytes.substr(0, bytes.size() - 8);
  CHECK_ERRC(read_feature_cache(dir / "short.dgcf"), Errc::SchemaViolation);
  CHECK_ERRC(read_feature_cache(dir / "none.dgcf"), Errc::MissingFile);
  fs::remove_all(dir);
}
