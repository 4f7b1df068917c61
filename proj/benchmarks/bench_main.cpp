#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "citeweave/citance.hpp"
#include "citeweave/graph.hpp"
#include "citeweave/masking.hpp"
#include "citeweave/stats.hpp"

using namespace citeweave;

namespace {

graph::CitationGraph random_graph(int n, double p, unsigned seed) {
  std::mt19937 rng(seed);
  std::bernoulli_distribution coin(p);
  std::set<graph::NodeId> nodes;
  for (int i = 1; i <= n; ++i) nodes.insert(i);
  graph::CitationGraph g(nodes);
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      if (coin(rng)) g.add_concurrence(a, b, 0);
  return g;
}

std::string related_work(int sentences) {
  std::string s;
  for (int i = 0; i < sentences; ++i) {
    const int a = 1 + i % 40, b = 1 + (i * 7) % 40;
    s += "Prior studies [" + std::to_string(a) + ", " + std::to_string(b) + "] examined graphs, e.g. in Fig. 2. ";
    s += "Others (Smith et al., 2019; Lee and Park 2020a) disagree. ";
    if (i % 5 == 4) s += "\n\n";
  }
  return s;
}

}  // namespace

static void BM_GraphMetrics(benchmark::State& state) {
  const auto g = random_graph(static_cast<int>(state.range(0)), 0.15, 1);
  for (auto _ : state) benchmark::DoNotOptimize(graph::compute_metrics(g));
}
BENCHMARK(BM_GraphMetrics)->Arg(10)->Arg(50)->Arg(200);

static void BM_Transitivity(benchmark::State& state) {
  const auto g = random_graph(static_cast<int>(state.range(0)), 0.15, 2);
  for (auto _ : state) benchmark::DoNotOptimize(graph::transitivity(g));
}
BENCHMARK(BM_Transitivity)->Arg(50)->Arg(200);

static void BM_ExactDistribution(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stats::exact_u_distribution(n, n));
}
BENCHMARK(BM_ExactDistribution)->Arg(5)->Arg(10)->Arg(12);

static void BM_MannWhitneyExact(benchmark::State& state) {
  std::vector<double> a(10), b(10);
  std::iota(a.begin(), a.end(), 0.5);
  std::iota(b.begin(), b.end(), 3.25);
  for (auto _ : state) benchmark::DoNotOptimize(stats::mann_whitney({"a", a}, {"b", b}));
}
BENCHMARK(BM_MannWhitneyExact);

static void BM_Segmentation(benchmark::State& state) {
  const std::string text = related_work(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(citance::parse_section(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_Segmentation)->Arg(20)->Arg(200);

static void BM_Masking(benchmark::State& state) {
  const std::string text = related_work(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(corpus::mask_citations(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_Masking)->Arg(20)->Arg(200);
BENCHMARK_MAIN();
