// OpenMP kernels against their serial references.
//
//   ./bench_kernels --benchmark_counters_tabular=true
//
// Thread count follows OMP_NUM_THREADS.

#include <random>

#include <benchmark/benchmark.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "toda/hierarchy.hpp"
#include "toda/spectral.hpp"

namespace {

toda::LatticeState make_state(int len, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(len)), b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = 0.5 * (1.0 + 0.2 * u(rng));
    b[i] = 0.2 * u(rng);
  }
  return toda::LatticeState(-len / 2, std::move(a), std::move(b), 0.5, 0.0);
}

int threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void BM_tl_field(benchmark::State& st) {
  const auto s = make_state(static_cast<int>(st.range(0)), 1);
  const auto c = toda::HierarchyCoeffs::homogeneous(static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(toda::tl_field(s, c));
  st.counters["threads"] = threads();
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_tl_field_serial(benchmark::State& st) {
  const auto s = make_state(static_cast<int>(st.range(0)), 1);
  const auto c = toda::HierarchyCoeffs::homogeneous(static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(toda::reference::tl_field_serial(s, c));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_scattering(benchmark::State& st) {
  const auto H = toda::build_jacobi(make_state(64, 2));
  const auto grid = toda::default_k_grid(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(toda::scattering_data(H, grid, 200));
  st.counters["threads"] = threads();
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_scattering_serial(benchmark::State& st) {
  const auto H = toda::build_jacobi(make_state(64, 2));
  const auto grid = toda::default_k_grid(static_cast<int>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(toda::reference::scattering_data_serial(H, grid, 200));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_tl_field)->ArgsProduct({{256, 4096}, {0, 2}})->UseRealTime();
BENCHMARK(BM_tl_field_serial)->ArgsProduct({{256, 4096}, {0, 2}})->UseRealTime();
BENCHMARK(BM_scattering)->Arg(256)->Arg(2048)->UseRealTime();
BENCHMARK(BM_scattering_serial)->Arg(256)->Arg(2048)->UseRealTime();

BENCHMARK_MAIN();
