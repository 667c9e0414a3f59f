#include <cmath>
#include <random>

#include "dgc/diffusion.hpp"
#include "dgc/oracle.hpp"
#include "test_support.hpp"

using namespace dgc;

namespace {

Matrix e0() { return Matrix(2, 1, std::vector<double>{1.0, 0.0}); }

PropagationMatrix two_aug() { return normalize(test::two_node(), Variant::Aug); }

}  // namespace

TEST_CASE("sgc_propagate on the two-node graph") {
  const PropagationMatrix s = two_aug();
  CHECK(sgc_propagate(e0(), s, 0) == e0());
  for (std::uint64_t k : {1u, 2u, 50u}) {
    const Matrix y = sgc_propagate(e0(), s, k);
    CHECK(std::abs(y(0, 0) - 0.5) <= 1e-13);
    CHECK(std::abs(y(1, 0) - 0.5) <= 1e-13);
  }
}

TEST_CASE("euler_propagate approaches the heat kernel") {
  const PropagationMatrix s = two_aug();
  CHECK(euler_propagate(e0(), s, 0.0, 7) == e0());
  const Matrix y = euler_propagate(e0(), s, std::log(2.0), 1024);
  CHECK(std::abs(y(0, 0) - 0.75) <= 1e-3);
  CHECK(std::abs(y(1, 0) - 0.25) <= 1e-3);
}

TEST_CASE("rk4_propagate at T = 1, K = 4") {
  const PropagationMatrix s = two_aug();
  CHECK(rk4_propagate(e0(), s, 0.0, 4) == e0());
  const Matrix y = rk4_propagate(e0(), s, 1.0, 4);
  const double em1 = std::exp(-1.0);
  CHECK(std::abs(y(0, 0) - (1 + em1) / 2) <= 1e-5);
  CHECK(std::abs(y(1, 0) - (1 - em1) / 2) <= 1e-5);
}

TEST_CASE("configuration validation") {
  DiffusionConfig cfg;
  cfg.steps = 0;
  CHECK_ERRC(validate(cfg), Errc::InvalidArgument);
  cfg.terminal_time = 0.0;
  CHECK_NOTHROW(validate(cfg));

  cfg = DiffusionConfig::sgc(3);
  cfg.terminal_time = 2.0;
  CHECK_ERRC(validate(cfg), Errc::InvalidArgument);

  cfg = {Scheme::Euler, Variant::Sym, 10.0, 5};
  CHECK_ERRC(validate(cfg), Errc::UnstableStepSize);
  cfg.variant = Variant::Aug;
  CHECK_NOTHROW(validate(cfg));

  cfg.terminal_time = -1.0;
  CHECK_ERRC(validate(cfg), Errc::InvalidArgument);

  CHECK(parse_scheme("rk4") == Scheme::Rk4);
  CHECK_ERRC(parse_scheme("rk45"), Errc::InvalidArgument);
}

TEST_CASE("propagate checks shapes and variants") {
  const PropagationMatrix s = two_aug();
  CHECK_ERRC(propagate(Matrix(3, 1), s, DiffusionConfig{}), Errc::DimensionMismatch);
  DiffusionConfig sym_cfg;
  sym_cfg.variant = Variant::Sym;
  sym_cfg.terminal_time = 1.0;
  CHECK_ERRC(propagate(e0(), s, sym_cfg), Errc::InvalidArgument);
  Matrix bad = e0();
  bad(0, 0) = std::nan("");
  CHECK_ERRC(propagate(bad, s, DiffusionConfig{}), Errc::InvalidArgument);
}

TEST_CASE("large aug steps blow up and are reported") {
  // dt = 3 puts the step operator's spectrum outside [-1, 1].
  std::mt19937_64 rng(4);
  const PropagationMatrix s = normalize(test::random_graph(40, 0.3, rng), Variant::Aug);
  const Matrix x = test::random_matrix(40, 2, rng);
  CHECK_ERRC(euler_propagate(x, s, 3000.0, 1000), Errc::UnstableStepSize);
}

TEST_CASE("equilibrium vector is preserved") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const SparseGraph g = test::random_graph(30, 0.2, rng);
    const PropagationMatrix s = normalize(g, Variant::Aug);
    const auto deg = g.degrees();
    Matrix v(deg.size(), 1);
    for (std::size_t i = 0; i < deg.size(); ++i) v(i, 0) = std::sqrt(deg[i] + 1.0);
    const double nv = frobenius_norm(v);
    for (const DiffusionConfig& cfg :
         {DiffusionConfig{Scheme::Euler, Variant::Aug, 5.3, 250},
          DiffusionConfig{Scheme::Rk4, Variant::Aug, 2.0, 16}, DiffusionConfig::sgc(10)}) {
      CHECK(frobenius_distance(propagate(v, s, cfg), v) <= 1e-12 * nv);
    }
  }
}

TEST_CASE("euler with dt <= 1 does not expand the Frobenius norm") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const PropagationMatrix s = normalize(test::random_graph(25, 0.3, rng), Variant::Aug);
    const Matrix x = test::random_matrix(25, 3, rng);
    for (std::uint64_t k : {5u, 10u, 40u}) {
      const Matrix y = euler_propagate(x, s, 5.0, k);
      CHECK(frobenius_norm(y) <= frobenius_norm(x) * (1 + 1e-14));
    }
  }
}

TEST_CASE("euler with T = K is SGC") {
  std::mt19937_64 rng(7);
  const PropagationMatrix s = normalize(test::random_graph(50, 0.1, rng), Variant::Aug);
  const Matrix x = test::random_matrix(50, 4, rng);
  for (std::uint64_t k : {1u, 2u, 8u}) {
    const Matrix a = euler_propagate(x, s, static_cast<double>(k), k);
    const Matrix b = sgc_propagate(x, s, k);
    CHECK(max_abs_diff(a, b) <= 1e-12);
  }
}

TEST_CASE("convergence orders against the dense oracle") {
  std::mt19937_64 rng(8);
  const SparseGraph g = test::random_graph(20, 0.3, rng);
  const PropagationMatrix s = normalize(g, Variant::Aug);
  const auto eig = oracle::eigendecompose(oracle::dense_laplacian(g, Variant::Aug));
  const Matrix x = test::random_matrix(20, 3, rng);

  const double T = 1.0;
  const Matrix exact = oracle::exact_heat_kernel(eig, T, x);
  double prev = 0.0;
  for (std::uint64_t k = 2; k <= 512; k *= 2) {
    const double err = frobenius_distance(euler_propagate(x, s, T, k), exact);
    if (k > 2) {
      CHECK(err < prev);
      if (k >= 64) {
        const double slope = std::log2(prev / err);
        CHECK(slope >= 0.8);
        CHECK(slope <= 1.2);
      }
    }
    prev = err;
  }

  const double T4 = 4.0;
  const Matrix exact4 = oracle::exact_heat_kernel(eig, T4, x);
  double prev4 = frobenius_distance(rk4_propagate(x, s, T4, 4), exact4);
  int slopes = 0;
  for (std::uint64_t k = 8; k <= 512; k *= 2) {
    const double err = frobenius_distance(rk4_propagate(x, s, T4, k), exact4);
    if (err < 1e-12) break;
    if (k >= 16) {
      const double slope = std::log2(prev4 / err);
      CHECK(slope >= 3.5);
      CHECK(slope <= 4.5);
      ++slopes;
    }
    prev4 = err;
  }
  CHECK(slopes >= 2);
}
