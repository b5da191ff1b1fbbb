#include <benchmark/benchmark.h>

#include "mmtree/forest.hpp"
#include "mmtree/splitting.hpp"
#include "mmtree/synthetic.hpp"
#include "mmtree/tree.hpp"

using namespace mmtree;

namespace {

SyntheticData sine(std::size_t n) {
  GeneratorSpec spec;
  spec.generator = "sine";
  spec.n = n;
  spec.p = 3;
  spec.sigma = 0.1;
  return gen_synthetic(spec, 1);
}

void BM_RiskProfile(benchmark::State& state) {
  const auto g = sine(static_cast<std::size_t>(state.range(0)));
  const auto node = NodeView::root(g.data);
  for (auto _ : state) benchmark::DoNotOptimize(risk_profile(node, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RiskProfile)->Range(1 << 10, 1 << 16);

void BM_MinimaxSearch(benchmark::State& state) {
  const auto g = sine(static_cast<std::size_t>(state.range(0)));
  const auto node = NodeView::root(g.data);
  for (auto _ : state) benchmark::DoNotOptimize(minimax_search(node, 0));
}
BENCHMARK(BM_MinimaxSearch)->Range(1 << 10, 1 << 16);

void BM_ScanMax(benchmark::State& state) {
  const auto g = sine(static_cast<std::size_t>(state.range(0)));
  const auto node = NodeView::root(g.data);
  for (auto _ : state) benchmark::DoNotOptimize(scan_feature(node, 0, ScanMode::max));
}
BENCHMARK(BM_ScanMax)->Range(1 << 10, 1 << 16);

void BM_GrowTree(benchmark::State& state) {
  GeneratorSpec spec;
  spec.generator = "additive-tv";
  spec.n = 10000;
  spec.d = 3;
  spec.sigma = 0.1;
  const auto g = gen_synthetic(spec, 2);
  GrowConfig cfg;
  cfg.criterion = state.range(0) ? SplitCriterion::minimax : SplitCriterion::variance;
  cfg.max_depth = 10;
  for (auto _ : state) benchmark::DoNotOptimize(grow(g.data, cfg));
}
BENCHMARK(BM_GrowTree)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Forest(benchmark::State& state) {
  GeneratorSpec spec;
  spec.generator = "asbp";
  spec.n = 4096;
  spec.d = 2;
  const auto g = gen_synthetic(spec, 3);
  ForestConfig cfg;
  cfg.n_trees = 20;
  cfg.tree.max_depth = 10;
  cfg.threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(train_forest(g.data, cfg));
}
BENCHMARK(BM_Forest)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
