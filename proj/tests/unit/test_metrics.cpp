#include "brute_force.hpp"

#include "snowball/error.hpp"
#include "snowball/metrics.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

using namespace snowball;
namespace bf = snowball::testing;

namespace {

SimpleDigraph graph(std::size_t n, std::initializer_list<std::pair<std::uint32_t, std::uint32_t>> e) {
    const std::vector<std::pair<std::uint32_t, std::uint32_t>> edges(e);
    return SimpleDigraph(n, edges);
}

SimpleDigraph bidirected_complete(std::size_t n) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t u = 0; u < n; ++u) {
        for (std::uint32_t v = 0; v < n; ++v) {
            if (u != v) edges.emplace_back(u, v);
        }
    }
    return SimpleDigraph(n, edges);
}

SampledNetwork chain_network(std::size_t n) {
    SampledNetwork net;
    for (std::uint32_t i = 0; i < n; ++i) net.insiders.push_back(node_at(i));
    for (std::uint32_t i = 0; i + 1 < n; ++i) net.edges.push_back({node_at(i + 1), node_at(i), 1.0, 1});
    return net;
}

SampleTrace trace_of(std::vector<std::uint32_t> seeds, std::vector<std::uint32_t> steps) {
    SampleTrace t;
    for (auto s : seeds) t.seeds.push_back(node_at(s));
    for (std::size_t i = 0; i < steps.size(); ++i) {
        TraceStep s;
        s.timestep = i + 1;
        s.node = node_at(steps[i]);
        s.boundary = static_cast<double>(i);
        t.steps.push_back(s);
    }
    return t;
}

} // namespace

TEST(SimpleDigraph, CollapsesMultiEdgesAndSelfLoops) {
    const auto g = graph(3, {{0, 1}, {0, 1}, {1, 1}, {1, 0}});
    EXPECT_EQ(g.edge_count(), 2u);
    EXPECT_TRUE(g.has_edge(0, 1));
    EXPECT_TRUE(g.has_edge(1, 0));
    EXPECT_FALSE(g.has_edge(1, 1));
}

TEST(ClusteringLocal, Examples) {
    EXPECT_DOUBLE_EQ(clustering_local(graph(3, {{0, 1}, {1, 0}, {1, 2}, {2, 1}, {0, 2}, {2, 0}})).mean, 1.0);
    const auto one_way = clustering_local(graph(3, {{0, 1}, {1, 2}, {0, 2}}));
    for (double c : one_way.per_node) EXPECT_DOUBLE_EQ(c, 0.5);
    EXPECT_DOUBLE_EQ(clustering_local(graph(4, {{1, 0}, {2, 0}, {3, 0}})).mean, 0.0);
    EXPECT_DOUBLE_EQ(clustering_local(bidirected_complete(4)).mean, 1.0);
    EXPECT_THROW(clustering_local(SimpleDigraph(0)), DataError);
}

TEST(ClusteringGlobal, Examples) {
    EXPECT_DOUBLE_EQ(clustering_global(bidirected_complete(5)), 1.0);
    EXPECT_DOUBLE_EQ(clustering_global(graph(4, {{0, 1}, {1, 2}, {2, 3}})), 0.0);
    // triangle with a pendant: 1 triangle, 5 connected triplets
    EXPECT_DOUBLE_EQ(clustering_global(graph(4, {{0, 1}, {1, 2}, {2, 0}, {2, 3}})), 3.0 / 5.0);
    EXPECT_DOUBLE_EQ(clustering_global(graph(2, {{0, 1}})), 0.0);
}

TEST(ShortestPath, Examples) {
    const auto path = avg_shortest_path(graph(3, {{0, 1}, {1, 2}}));
    EXPECT_DOUBLE_EQ(path.average, 4.0 / 3.0);
    EXPECT_EQ(path.reachable_pairs, 3u);
    EXPECT_DOUBLE_EQ(path.reachable_fraction, 0.5);
    EXPECT_DOUBLE_EQ(avg_shortest_path(bidirected_complete(4)).average, 1.0);
    EXPECT_THROW(avg_shortest_path(SimpleDigraph(3)), DataError);
}

TEST(AvgDegree, EdgesPerNode) {
    EXPECT_DOUBLE_EQ(avg_degree(graph(4, {{0, 1}, {1, 2}})), 0.5);
    EXPECT_DOUBLE_EQ(avg_degree(bidirected_complete(5)), 4.0);
}

TEST(Metrics, MatchBruteForceOnRandomGraphs) {
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 5 + rng() % 60;
        const double p = 0.02 + 0.2 * static_cast<double>(rng() % 100) / 100.0;
        const auto edges = bf::random_digraph(n, p, rng);
        const SimpleDigraph g(n, edges);
        const auto a = bf::adjacency(n, edges);

        const auto local = clustering_local(g);
        const auto expected = bf::local_cc_brute(a);
        for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(local.per_node[i], expected[i]) << rep << ' ' << i;
        EXPECT_EQ(clustering_global(g), bf::global_cc_brute(a)) << rep;

        const auto fw = bf::floyd_warshall(a);
        if (fw.reachable > 0) {
            const auto bfs = avg_shortest_path(g);
            EXPECT_EQ(bfs.reachable_pairs, fw.reachable);
            EXPECT_EQ(bfs.average, fw.average) << rep;
        }
        EXPECT_EQ(avg_degree(g), static_cast<double>(edges.size()) / static_cast<double>(n));
    }
}

TEST(SampledNetwork, TruncationKeepsInducedPrefix) {
    const auto net = chain_network(5);
    const auto t = truncate(net, 3);
    EXPECT_EQ(t.insiders.size(), 3u);
    EXPECT_EQ(t.edges.size(), 2u);
    EXPECT_EQ(truncate(net, 10).insiders.size(), 5u);
}

TEST(SampledNetwork, MinCommonSnapshot) {
    const std::vector<SampledNetwork> nets{chain_network(100), chain_network(80), chain_network(120)};
    const auto out = min_common_snapshot(nets);
    for (const auto& n : out) EXPECT_EQ(n.insiders.size(), 80u);
    EXPECT_THROW(min_common_snapshot(std::span<const SampledNetwork>{}), ConfigError);
}

TEST(SampledNetwork, FromDiscoveredGraph) {
    DiscoveredGraph g;
    g.add_node(node_at(0), Role::Insider);
    g.add_node(node_at(1), Role::Insider);
    g.add_node(node_at(2), Role::Outsider);
    const std::vector<Event> one{Event::plain()};
    g.add_events(node_at(1), node_at(0), one, 2.5);
    g.add_events(node_at(2), node_at(0), one, 1.0);
    const std::vector<NodeId> order{node_at(1), node_at(0)};
    const auto net = sampled_network(g, order);
    ASSERT_EQ(net.edges.size(), 1u);
    const auto report = evaluate(net);
    EXPECT_EQ(report.n, 2u);
    EXPECT_EQ(report.m, 1u);
    EXPECT_DOUBLE_EQ(report.total_weight, 2.5);
    EXPECT_DOUBLE_EQ(report.avg_weighted_degree, 1.25);
    EXPECT_DOUBLE_EQ(report.avg_shortest_path, 1.0);
    const auto j = nlohmann::json::parse(metrics_json(report));
    EXPECT_EQ(j["n"], 2);
    EXPECT_DOUBLE_EQ(j["avg_degree"].get<double>(), 0.5);
}

TEST(Evaluate, UnreachableGraphHasNullPathLength) {
    SampledNetwork net;
    net.insiders = {node_at(0), node_at(1)};
    const auto report = evaluate(net);
    EXPECT_TRUE(std::isnan(report.avg_shortest_path));
    EXPECT_TRUE(nlohmann::json::parse(metrics_json(report))["avg_shortest_path"].is_null());
}

TEST(CommunityEvolution, CumulativeCountsPerCommunity) {
    const std::vector<std::uint32_t> blocks{0, 0, 1, 1, 2};
    const auto labels = labels_from_blocks(blocks);
    const auto trace = trace_of({0}, {2, 1, 3, 4});
    const auto s = community_evolution(trace, labels);
    ASSERT_EQ(s.counts.size(), 5u);
    EXPECT_EQ(s.communities, (std::vector<std::int64_t>{0, 1, 2}));
    EXPECT_EQ(s.counts[0], (std::vector<std::size_t>{1, 0, 0}));
    EXPECT_EQ(s.counts[4], (std::vector<std::size_t>{2, 2, 1}));
    for (std::size_t t = 0; t < s.counts.size(); ++t) {
        std::size_t sum = 0;
        for (std::size_t c = 0; c < 3; ++c) {
            sum += s.counts[t][c];
            if (t > 0) EXPECT_GE(s.counts[t][c], s.counts[t - 1][c]);
        }
        EXPECT_EQ(sum, 1 + t);
    }
    std::ostringstream out;
    write_evolution_csv(out, s);
    EXPECT_EQ(out.str().substr(0, 52), "timestep,community,count,boundary\n0,0,1,0\n0,1,0,0\n0,");
}

TEST(CommunityEvolution, UnlabelledNodesAreUnknown) {
    IdTable ids;
    ids.intern("a");
    std::istringstream in("node,community\na,3\nb,4\n");
    const auto labels = read_labels_csv(in, ids);
    EXPECT_EQ(ids.size(), 2u);
    EXPECT_EQ(labels.of(node_at(0)), 3);
    EXPECT_EQ(labels.of(node_at(7)), kUnknownCommunity);
    const auto s = community_evolution(trace_of({0}, {7}), labels);
    std::ostringstream out;
    write_evolution_csv(out, s);
    EXPECT_NE(out.str().find("unknown"), std::string::npos);

    std::istringstream dup("node,community\na,1\na,2\n");
    EXPECT_THROW(read_labels_csv(dup, ids), DataError);
}

TEST(Inflection, ConstantGrowthHasNone) {
    std::vector<double> b(200);
    for (std::size_t t = 0; t < b.size(); ++t) b[t] = 3.0 * static_cast<double>(t);
    EXPECT_TRUE(inflection_candidates(b, 20, 3.0).empty());
    EXPECT_THROW(inflection_candidates(b, 1, 3.0), ConfigError);
}

TEST(Inflection, LargeJumpIsFlagged) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> b{0.0};
    for (std::size_t t = 1; t < 200; ++t) b.push_back(b.back() + noise(rng) + (t == 120 ? 10.0 : 0.0));
    const auto hits = inflection_candidates(b, 30, 5.0);
    ASSERT_FALSE(hits.empty());
    EXPECT_NE(std::find(hits.begin(), hits.end(), 120u), hits.end());
    EXPECT_LE(hits.size(), 2u);
}

TEST(WindowPurity, SlidingMajorityShare) {
    const std::vector<std::uint32_t> blocks{0, 0, 0, 1, 1, 1};
    const auto labels = labels_from_blocks(blocks);
    const auto trace = trace_of({0}, {1, 2, 3, 4, 5});
    const auto p = window_purity(trace, labels, 2);
    EXPECT_EQ(p, (std::vector<double>{1.0, 0.5, 1.0, 1.0}));
    EXPECT_TRUE(window_purity(trace, labels, 6).empty());
}
