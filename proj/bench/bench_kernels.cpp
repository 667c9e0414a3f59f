// Serial reference vs OpenMP kernels on a synthetic citation-sized graph.
//   ./bench_kernels --benchmark_filter=Euler
#include <benchmark/benchmark.h>

#include <random>

#include "dgc/data.hpp"
#include "dgc/diffusion.hpp"
#include "dgc/kernels.hpp"

namespace {

struct Fixture {
  dgc::PropagationMatrix s;
  dgc::Matrix x;
};

// Roughly Cora-shaped: 2700 nodes, ~5k edges, 512 feature columns.
const Fixture& fixture() {
  static const Fixture f = [] {
    dgc::SbmConfig cfg;
    cfg.blocks = 7;
    cfg.nodes_per_block = 386;
    cfg.p_in = 0.0028;
    cfg.p_out = 0.0003;
    cfg.feature_dim = 512;
    cfg.seed = 11;
    auto data = dgc::generate_sbm(cfg);
    return Fixture{dgc::normalize(data.dataset.graph, dgc::Variant::Aug),
                   dgc::row_normalize(data.dataset.features)};
  }();
  return f;
}

template <void (*Kernel)(const dgc::CsrMatrix&, const dgc::Matrix&, dgc::Matrix&)>
void BM_Spmm(benchmark::State& state) {
  const auto& f = fixture();
  dgc::Matrix out(f.x.rows(), f.x.cols());
  for (auto _ : state) {
    Kernel(f.s.matrix, f.x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.s.matrix.nnz() * f.x.cols()));
}

template <void (*Kernel)(const dgc::CsrMatrix&, const dgc::Matrix&, double, dgc::Matrix&)>
void BM_EulerStep(benchmark::State& state) {
  const auto& f = fixture();
  dgc::Matrix out(f.x.rows(), f.x.cols());
  for (auto _ : state) {
    Kernel(f.s.matrix, f.x, 0.05, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <void (*Kernel)(const dgc::CsrMatrix&, const dgc::Matrix&, double, dgc::Matrix&)>
void BM_Rk4Step(benchmark::State& state) {
  const auto& f = fixture();
  dgc::Matrix out(f.x.rows(), f.x.cols());
  for (auto _ : state) {
    Kernel(f.s.matrix, f.x, 0.05, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_EulerPropagate(benchmark::State& state) {
  const auto& f = fixture();
  const auto k = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dgc::euler_propagate(f.x, f.s, 5.3, k));
}

}  // namespace

BENCHMARK(BM_Spmm<dgc::kernels::serial::spmm>)->Name("Spmm/serial");
BENCHMARK(BM_Spmm<dgc::kernels::parallel::spmm>)->Name("Spmm/omp");
BENCHMARK(BM_EulerStep<dgc::kernels::serial::euler_step>)->Name("EulerStep/serial");
BENCHMARK(BM_EulerStep<dgc::kernels::parallel::euler_step>)->Name("EulerStep/omp");
BENCHMARK(BM_Rk4Step<dgc::kernels::serial::rk4_step>)->Name("Rk4Step/serial");
BENCHMARK(BM_Rk4Step<dgc::kernels::parallel::rk4_step>)->Name("Rk4Step/omp");
BENCHMARK(BM_EulerPropagate)->Arg(2)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
