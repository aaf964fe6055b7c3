#include <benchmark/benchmark.h>

#include "sortition/adversary.hpp"
#include "sortition/panels.hpp"
#include "sortition/rounding.hpp"
#include "sortition/solver.hpp"

namespace {

using sortition::Instance;
using sortition::LbKind;

Instance e2() { return sortition::make_lb_instance(LbKind::kExample2, {8, 4, 0, 0}).instance; }

Instance instance_b() {
  const auto lb = sortition::make_lb_instance(LbKind::kThm43, {72, 6, 12, 6});
  return sortition::apply_misreport(lb.instance, lb.misreport).instance;
}

sortition::SolveConfig config(const std::string& spec,
                              sortition::Backend backend = sortition::Backend::kColgen) {
  sortition::SolveConfig cfg;
  cfg.objective = sortition::EqualityObjective::parse(spec);
  cfg.backend = backend;
  return cfg;
}

const std::vector<std::string> kSpecs{"maximin", "minimax", "leximin", "nash", "goldilocks:1"};

void BM_SolveE2(benchmark::State& state) {
  const Instance inst = e2();
  const auto cfg = config(kSpecs[state.range(0)], static_cast<sortition::Backend>(state.range(1)));
  state.SetLabel(kSpecs[state.range(0)]);
  for (auto _ : state) benchmark::DoNotOptimize(sortition::solve(inst, cfg));
}
BENCHMARK(BM_SolveE2)->ArgsProduct({{0, 1, 2, 3, 4}, {0, 1}});

void BM_SolveInstanceB(benchmark::State& state) {
  const Instance inst = instance_b();
  const auto cfg = config(kSpecs[state.range(0)]);
  state.SetLabel(kSpecs[state.range(0)]);
  for (auto _ : state) benchmark::DoNotOptimize(sortition::solve(inst, cfg));
}
BENCHMARK(BM_SolveInstanceB)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_CompositionOracle(benchmark::State& state) {
  const Instance inst = instance_b();
  std::vector<double> w(inst.num_groups());
  for (size_t g = 0; g < w.size(); ++g) w[g] = 1.0 / (1.0 + g);
  for (auto _ : state) benchmark::DoNotOptimize(sortition::composition_oracle(inst, w));
}
BENCHMARK(BM_CompositionOracle);

void BM_Pipage(benchmark::State& state) {
  const Instance inst = e2();
  const auto r = sortition::solve(inst, config("goldilocks:1"));
  const int m = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sortition::pipage_round(r.distribution, m, seed++));
}
BENCHMARK(BM_Pipage)->Arg(100)->Arg(1000)->Arg(10000);

void BM_ExhaustiveManipulation(benchmark::State& state) {
  const Instance inst = sortition::make_lb_instance(LbKind::kExample1, {6, 3, 2, 0}).instance;
  sortition::ExhaustiveOptions opt;
  opt.strict = false;
  const auto cfg = config("maximin");
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sortition::manip_metric_exhaustive(inst, cfg, 1, sortition::ManipMetric::kComp, opt));
  }
}
BENCHMARK(BM_ExhaustiveManipulation)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
