#include "snowball/metrics.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace snowball;

namespace {

SimpleDigraph random_graph(std::size_t n, double mean_degree) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::uint32_t> node(0, static_cast<std::uint32_t>(n - 1));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    const auto m = static_cast<std::size_t>(mean_degree * static_cast<double>(n));
    for (std::size_t i = 0; i < m; ++i) edges.emplace_back(node(rng), node(rng));
    return SimpleDigraph(n, edges);
}

void BM_ClusteringLocal(benchmark::State& state) {
    const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 10);
    for (auto _ : state) benchmark::DoNotOptimize(clustering_local(g).mean);
}

void BM_ClusteringGlobal(benchmark::State& state) {
    const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 10);
    for (auto _ : state) benchmark::DoNotOptimize(clustering_global(g));
}

void BM_ShortestPath(benchmark::State& state) {
    const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 10);
    for (auto _ : state) benchmark::DoNotOptimize(avg_shortest_path(g).average);
}

} // namespace

BENCHMARK(BM_ClusteringLocal)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClusteringGlobal)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShortestPath)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
