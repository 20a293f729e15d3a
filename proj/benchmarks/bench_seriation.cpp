#include <benchmark/benchmark.h>

#include <random>

#include "czek/seriation.hpp"
#include "oracles.hpp"

namespace {

czek::DistanceMatrix random_matrix(std::size_t n) {
  std::mt19937_64 gen(n);
  return oracle::matrix(oracle::random_weights(n, gen, false), n);
}

void BM_Exact(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(czek::solve_exact(m).objective);
}
BENCHMARK(BM_Exact)->DenseRange(8, 16, 2)->Unit(benchmark::kMillisecond);

void BM_TwoOpt(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = random_matrix(n);
  for (auto _ : state)
    benchmark::DoNotOptimize(czek::solve_two_opt(m, czek::Permutation::identity(n)).objective);
}
BENCHMARK(BM_TwoOpt)->RangeMultiplier(2)->Range(16, 256)->Unit(benchmark::kMillisecond);

void BM_Anneal(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(czek::solve_anneal(m, 1).objective);
}
BENCHMARK(BM_Anneal)->Arg(13)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
