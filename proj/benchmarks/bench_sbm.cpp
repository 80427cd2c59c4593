#include "snowball/sbm.hpp"

#include <benchmark/benchmark.h>

using namespace snowball;

namespace {

void BM_GenerateSbm(benchmark::State& state) {
    sbm::BlockModelConfig cfg{std::vector<std::uint32_t>(8, static_cast<std::uint32_t>(state.range(0))), 10.0,
                              4.0, 1};
    const auto matrix = sbm::derive_block_matrix(cfg);
    std::uint64_t seed = 0;
    std::size_t edges = 0;
    for (auto _ : state) {
        const auto g = sbm::generate(matrix, cfg.block_sizes, ++seed);
        edges = g.edges.size();
        benchmark::DoNotOptimize(g.edges.data());
    }
    state.counters["edges"] = static_cast<double>(edges);
}

} // namespace

BENCHMARK(BM_GenerateSbm)->Arg(200)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
