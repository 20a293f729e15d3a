#include <benchmark/benchmark.h>

#include <filesystem>

#include "czek/experiments.hpp"

namespace {

const czek::ObservationTable& skulls() {
  static const auto t = czek::load_table(std::string(CZEK_FIXTURE_DIR) + "/skulls13.csv",
                                         std::string(CZEK_FIXTURE_DIR) + "/skulls13.meta");
  return t;
}

void BM_Matrix(benchmark::State& state, const char* distance) {
  czek::SetupSpec s;
  s.distance = distance;
  const auto reg = czek::default_registry();
  const auto table = czek::prepare_table(skulls(), s);
  for (auto _ : state)
    benchmark::DoNotOptimize(czek::setup_matrix(table, s, reg, {}).size());
}
BENCHMARK_CAPTURE(BM_Matrix, dd, "dd");
BENCHMARK_CAPTURE(BM_Matrix, stolyhwo, "stolyhwo");

void BM_Setup(benchmark::State& state) {
  czek::SetupSpec s;
  s.variable_set = "paper27";
  const auto reg = czek::default_registry();
  for (auto _ : state) benchmark::DoNotOptimize(czek::run_setup(skulls(), s, reg, {}).report.ok);
}
BENCHMARK(BM_Setup)->Unit(benchmark::kMillisecond);

}  // namespace
