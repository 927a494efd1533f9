// Serial reference kernels vs their OpenMP forms.
//
//   ./conecert_bench --benchmark_filter=BlockSearch
//
// The thread count of the parallel runs is the benchmark argument.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "conecert/exposedness.hpp"
#include "conecert/faces.hpp"
#include "conecert/kernels.hpp"
#include "conecert/posmaps.hpp"
#include "conecert/random.hpp"

namespace {

using namespace conecert;

// Positive map: every restart runs to convergence, nothing exits early.
MapRep bench_map(int n, int m) {
  Rng rng = make_rng(7);
  return choi_from_ad(random_complex_normal(n, m, rng), false);
}

SearchParams bench_search(ExecPolicy policy) {
  SearchParams p;
  p.restarts = 64;
  p.iterations = 200;
  p.seed = 3;
  p.policy = policy;
  return p;
}

void BM_BlockSearchSerial(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const MapRep map = bench_map(d, d);
  const auto p = bench_search(ExecPolicy::Serial);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::block_minimum_serial(map.choi(), d, d, p));
  }
}
BENCHMARK(BM_BlockSearchSerial)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_BlockSearchParallel(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  const MapRep map = bench_map(d, d);
  const auto p = bench_search(ExecPolicy::Parallel);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::block_minimum_parallel(map.choi(), d, d, p));
  }
}
BENCHMARK(BM_BlockSearchParallel)
    ->ArgsProduct({{2, 3, 4}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond);

MapRep rank1_map(int d) {
  Rng rng = make_rng(11);
  return choi_from_ad(random_rank_matrix(d, d, 1, rng), false);
}

struct PerturbationFixture {
  MapRep phi;
  NullSpaceResult ns;
  std::vector<ComplexMatrix> dirs;
  ComplexMatrix base;

  explicit PerturbationFixture(int d)
      : phi(rank1_map(d)),
        ns(double_prime_nullspace(phi)),
        dirs(off_ray_directions(ns, phi.choi(), 64, 5)),
        base(phi.choi() / phi.choi().norm()) {}
};

void BM_PerturbationSerial(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const PerturbationFixture f(d);
  const std::vector<double> eps{0.01, 0.1, 1.0, 10.0};
  const auto p = bench_search(ExecPolicy::Serial);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::perturbation_search_serial(f.base, f.dirs, eps, d, d, p));
  }
}
BENCHMARK(BM_PerturbationSerial)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_PerturbationParallel(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  const PerturbationFixture f(d);
  const std::vector<double> eps{0.01, 0.1, 1.0, 10.0};
  const auto p = bench_search(ExecPolicy::Parallel);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::perturbation_search_parallel(f.base, f.dirs, eps, d, d, p));
  }
}
BENCHMARK(BM_PerturbationParallel)
    ->ArgsProduct({{2, 4}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond);

void BM_AssembleRows(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const bool parallel = state.range(1) != 0;
  const MapRep phi = bench_map(d, d);
  PairStrategy strategy;
  strategy.random_count = 32;
  const auto pairs = zero_pairs(phi, strategy);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_constraints(
        pairs, d, d, parallel ? ExecPolicy::Parallel : ExecPolicy::Serial));
  }
}
BENCHMARK(BM_AssembleRows)->ArgsProduct({{2, 3, 4}, {0, 1}});

void BM_CertifyExposed(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int rank = static_cast<int>(state.range(1));
  Rng rng = make_rng(13);
  const ComplexMatrix a = random_rank_matrix(d, d, rank, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(certify_exposed(a, false));
  }
}
BENCHMARK(BM_CertifyExposed)
    ->ArgsProduct({{2, 3, 4}, {1, 2}})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
