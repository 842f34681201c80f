#include "qeffect/order_maps.hpp"
#include "qeffect/reconstruction.hpp"
#include "qeffect/trials.hpp"

#include <benchmark/benchmark.h>

using namespace qeffect;

namespace {

Execution mode(const benchmark::State& st) { return st.range(0) == 0 ? Execution::Serial : Execution::Parallel; }

void BM_MkOrderCheck(benchmark::State& st) {
  const Eigen::Index dim = st.range(1);
  RandomSource rng(11);
  const EffectMapSpec spec = EffectMapSpec::mk(random_mk_parameter(dim, rng));
  CheckOptions opts;
  opts.execution = mode(st);
  for (auto _ : st) {
    MapReport r = check_order_preservation(spec, dim, 200, RandomSource(3), opts);
    benchmark::DoNotOptimize(r.max_residual);
  }
  st.SetLabel(st.range(0) == 0 ? "serial" : "parallel");
}

void BM_Classify(benchmark::State& st) {
  const Eigen::Index dim = st.range(1);
  RandomSource rng(5);
  const EffectMapSpec spec = EffectMapSpec::unitary(haar_unitary(dim, rng));
  const State d = random_state(dim, rng);
  const State dp = *suggest_matching_state(spec, d);
  Theorem1Config cfg;
  cfg.execution = mode(st);
  for (auto _ : st) {
    ClassificationReport r = classify_theorem1(spec, d, dp, dim, RandomSource(9), cfg);
    benchmark::DoNotOptimize(r.stages.size());
  }
  st.SetLabel(st.range(0) == 0 ? "serial" : "parallel");
}

}  // namespace

BENCHMARK(BM_MkOrderCheck)->ArgsProduct({{0, 1}, {3, 6}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Classify)->ArgsProduct({{0, 1}, {4, 8}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
