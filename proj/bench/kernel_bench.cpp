// Parallel pointwise kernels against the serial reference on n = 2 grids.
// MAFLOW_THREADS is not read here; use OMP_NUM_THREADS.

#include <random>

#include <benchmark/benchmark.h>

#include "maflow/kernels.hpp"
#include "maflow/torus_geometry.hpp"
#include "maflow/trig.hpp"

using namespace maflow;

namespace {

struct Inputs {
  MetricField g;
  HermitianField g_inv, hess, gprime, inv;
  std::vector<double> source, out;

  explicit Inputs(int N)
      : g(build_metric(TorusGrid(2, N), MetricPreset::hermitian_nonkahler(0.3))),
        g_inv(g.inverse()),
        hess(g.grid()),
        gprime(g.grid()),
        inv(g.grid()) {
    std::mt19937_64 rng(1);
    const double c = 0.2 * g.min_eigenvalue();
    for (int k = 0; k < hess.num_components(); ++k) {
      for (double& v : hess.component(k)) v = uniform(rng, -c, c);
    }
    source.resize(g.grid().size());
    for (double& v : source) v = uniform(rng, -0.1, 0.1);
    kernels::flow_rhs(g.samples(), g_inv, hess, source, gprime, out);
  }
};

Inputs& inputs(int N) {
  static Inputs i16(16), i32(32);
  return N == 16 ? i16 : i32;
}

void BM_flow_rhs_parallel(benchmark::State& st) {
  Inputs& in = inputs(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(kernels::flow_rhs(in.g.samples(), in.g_inv, in.hess, in.source, in.gprime, in.out));
  }
  st.SetItemsProcessed(st.iterations() * in.g.grid().size());
}

void BM_flow_rhs_reference(benchmark::State& st) {
  Inputs& in = inputs(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(
        kernels::reference::flow_rhs(in.g.samples(), in.g_inv, in.hess, in.source, in.gprime, in.out));
  }
  st.SetItemsProcessed(st.iterations() * in.g.grid().size());
}

void BM_invert_parallel(benchmark::State& st) {
  Inputs& in = inputs(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::invert(in.gprime, in.inv));
  st.SetItemsProcessed(st.iterations() * in.g.grid().size());
}

void BM_invert_reference(benchmark::State& st) {
  Inputs& in = inputs(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::reference::invert(in.gprime, in.inv));
  st.SetItemsProcessed(st.iterations() * in.g.grid().size());
}

void BM_contract_parallel(benchmark::State& st) {
  Inputs& in = inputs(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    kernels::contract(in.g_inv, in.hess, in.out);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * in.g.grid().size());
}

void BM_contract_reference(benchmark::State& st) {
  Inputs& in = inputs(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    kernels::reference::contract(in.g_inv, in.hess, in.out);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * in.g.grid().size());
}

}  // namespace

BENCHMARK(BM_flow_rhs_parallel)->Arg(16)->Arg(32);
BENCHMARK(BM_flow_rhs_reference)->Arg(16)->Arg(32);
BENCHMARK(BM_invert_parallel)->Arg(16)->Arg(32);
BENCHMARK(BM_invert_reference)->Arg(16)->Arg(32);
BENCHMARK(BM_contract_parallel)->Arg(16)->Arg(32);
BENCHMARK(BM_contract_reference)->Arg(16)->Arg(32);

BENCHMARK_MAIN();
