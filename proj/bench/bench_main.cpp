#include <benchmark/benchmark.h>

#include "ecodrive/gbtpa.hpp"
#include "ecodrive/harness/grid.hpp"

using namespace ecodrive;

namespace {

gbtpa::StateGraph approach_graph() {
  gbtpa::PlanProblem p;
  p.t0 = 17.0;
  return gbtpa::build_graph(p, gbtpa::GridResolution{});
}

void BM_Plan(benchmark::State& state) {
  const auto g = approach_graph();
  for (auto _ : state) benchmark::DoNotOptimize(gbtpa::plan(g, kph(30.0)));
}

void BM_PlanSerial(benchmark::State& state) {
  const auto g = approach_graph();
  for (auto _ : state) benchmark::DoNotOptimize(gbtpa::plan_serial(g, kph(30.0)));
}

harness::AppConfig grid_config() {
  harness::AppConfig c;
  c.grid.methods = {harness::Method::IDM, harness::Method::Graph};
  c.grid.seeds = 1;
  return c;
}

void BM_GridEval(benchmark::State& state) {
  const auto c = grid_config();
  for (auto _ : state) benchmark::DoNotOptimize(harness::grid_eval(c, c.grid, nullptr));
}

void BM_GridEvalSerial(benchmark::State& state) {
  const auto c = grid_config();
  for (auto _ : state) benchmark::DoNotOptimize(harness::grid_eval_serial(c, c.grid, nullptr));
}

}  // namespace

BENCHMARK(BM_Plan)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PlanSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridEval)->Unit(benchmark::kSecond)->Iterations(1);
BENCHMARK(BM_GridEvalSerial)->Unit(benchmark::kSecond)->Iterations(1);

BENCHMARK_MAIN();
