#include <benchmark/benchmark.h>

#include <random>

#include "rdlab/analytic.hpp"
#include "rdlab/attacks.hpp"
#include "rdlab/experiment.hpp"
#include "rdlab/misra_gries.hpp"

using namespace rdlab;

static void BM_PracWorstCase(benchmark::State& state) {
  const TimingParams t = make_timing(true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prac_worst(static_cast<std::uint32_t>(state.range(0)), 4, 4, t));
  }
}
BENCHMARK(BM_PracWorstCase)->Arg(1)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_MisraGriesObserve(benchmark::State& state) {
  MisraGriesTable mg(static_cast<std::size_t>(state.range(0)));
  std::mt19937_64 rng(1);
  std::geometric_distribution<int> skew(0.01);
  for (auto _ : state) benchmark::DoNotOptimize(mg.observe(static_cast<std::uint64_t>(skew(rng))));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MisraGriesObserve)->Arg(64)->Arg(4096);

static void BM_HammerBench(benchmark::State& state) {
  MitigationConfig c;
  c.mechanism = static_cast<Mechanism>(state.range(0));
  c.nrh = 64;
  const MitigationConfig cfg = resolve_mitigation(c).config;
  for (auto _ : state) {
    RandomTrafficSpec s;
    s.activations = 20000;
    benchmark::DoNotOptimize(run_random_traffic(cfg, s));
  }
  state.SetItemsProcessed(state.iterations() * 20000);
  state.SetLabel(std::string(to_string(cfg.mechanism)));
}
BENCHMARK(BM_HammerBench)
    ->Arg(static_cast<int>(Mechanism::PRAC))
    ->Arg(static_cast<int>(Mechanism::Chronus))
    ->Arg(static_cast<int>(Mechanism::Graphene))
    ->Unit(benchmark::kMillisecond);

static void BM_SystemRun(benchmark::State& state) {
  SystemConfig sys;
  sys.instructions = 100000;
  MitigationConfig c;
  c.mechanism = Mechanism::Chronus;
  c.nrh = 128;
  sys.mitigation = resolve_mitigation(c).config;
  const auto loads = build_workloads(WorkloadSpec{}, sys);
  for (auto _ : state) benchmark::DoNotOptimize(run_system(sys, loads.front().traces));
}
BENCHMARK(BM_SystemRun)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
