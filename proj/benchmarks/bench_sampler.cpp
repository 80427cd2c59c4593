#include "snowball/oracle.hpp"
#include "snowball/sampler.hpp"
#include "snowball/sbm.hpp"

#include <benchmark/benchmark.h>

using namespace snowball;

namespace {

struct Instance {
    std::shared_ptr<IndexedBackend> backend;
    std::vector<NodeId> seeds;
};

Instance sbm_instance(std::uint32_t block_size) {
    sbm::BlockModelConfig cfg{std::vector<std::uint32_t>(8, block_size), 10.0, 4.0, 1};
    const auto g = sbm::generate(sbm::derive_block_matrix(cfg), cfg.block_sizes, 1);
    sbm::SeedConfig sc{std::vector<std::uint32_t>(8, 1), sbm::SeedSelection::UniformRandom, 1};
    Instance inst{IndexedBackend::from_undirected(g.n, g.edges, "bench"), {}};
    for (auto v : sbm::select_seeds(g.labels, sc, g.degrees())) inst.seeds.push_back(node_at(v));
    return inst;
}

void run_to_exhaustion(benchmark::State& state, Strategy strategy) {
    const auto inst = sbm_instance(static_cast<std::uint32_t>(state.range(0)));
    std::size_t steps = 0;
    for (auto _ : state) {
        GraphOracle oracle(inst.backend);
        TightSampler s(oracle, inst.seeds, EdgeWeighting::unit(), {7});
        steps = s.run(strategy, Budget{}).steps.size();
        benchmark::DoNotOptimize(s.boundary());
    }
    state.counters["steps"] = static_cast<double>(steps);
    state.SetItemsProcessed(static_cast<std::int64_t>(steps) * state.iterations());
}

void BM_Mas(benchmark::State& state) { run_to_exhaustion(state, Strategy::MAS); }
void BM_RsDw(benchmark::State& state) { run_to_exhaustion(state, Strategy::RS_DW); }
void BM_RsSw(benchmark::State& state) { run_to_exhaustion(state, Strategy::RS_SW); }

} // namespace

BENCHMARK(BM_Mas)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RsDw)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RsSw)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
