#pragma once

#include "snowball/graph.hpp"
#include "snowball/ids.hpp"
#include "snowball/sampler.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace snowball {

// --- sampled networks -------------------------------------------------------

struct EdgeRecord {
    NodeId source;
    NodeId target;
    double weight = 1.0;
    std::size_t events = 1;
};

/// Insiders in inclusion order and the edges among them.
struct SampledNetwork {
    std::vector<NodeId> insiders;
    std::vector<EdgeRecord> edges;
};

SampledNetwork sampled_network(const DiscoveredGraph& g, std::span<const NodeId> inclusion_order);

/// The subgraph induced by the first `insiders` nodes of the inclusion order.
SampledNetwork truncate(const SampledNetwork& net, std::size_t insiders);

/// Truncates every network to the smallest insider count among them.
/// Throws ConfigError on an empty list.
std::vector<SampledNetwork> min_common_snapshot(std::span<const SampledNetwork> nets);

/// Directed simple graph on 0..n-1: multi-edges collapsed, no self-loops.
class SimpleDigraph {
public:
    explicit SimpleDigraph(std::size_t n = 0);
    SimpleDigraph(std::size_t n, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);
    /// Node i is the i-th insider of the inclusion order.
    static SimpleDigraph from(const SampledNetwork& net);

    std::size_t size() const noexcept { return out_.size(); }
    std::size_t edge_count() const noexcept { return edges_; }
    std::span<const std::uint32_t> out(std::uint32_t v) const noexcept { return out_[v]; }
    std::span<const std::uint32_t> in(std::uint32_t v) const noexcept { return in_[v]; }
    bool has_edge(std::uint32_t u, std::uint32_t v) const noexcept;

private:
    std::vector<std::vector<std::uint32_t>> out_;
    std::vector<std::vector<std::uint32_t>> in_;
    std::size_t edges_ = 0;
};

// --- structural metrics -----------------------------------------------------

struct LocalClustering {
    std::vector<double> per_node;
    double mean = 0;
};

/// CC_i = |{(j, k) in E : j, k in N(i)}| / (deg(i) (deg(i) - 1)), with N(i) the
/// union of in- and out-neighbors and deg(i) = |N(i)|. Nodes with deg < 2
/// score 0. Throws DataError on an empty graph.
LocalClustering clustering_local(const SimpleDigraph& g);

/// 3 * triangles / connected triplets on the undirected projection.
/// Returns 0 (and logs a warning) when there are no triplets.
double clustering_global(const SimpleDigraph& g);

struct PathStats {
    double average = 0;            ///< over ordered reachable pairs u != v
    double reachable_fraction = 0; ///< reachable pairs / (n (n - 1))
    std::uint64_t reachable_pairs = 0;
};

/// BFS from every node. Throws DataError when no pair is reachable.
PathStats avg_shortest_path(const SimpleDigraph& g);

/// |E| / n on the directed simple graph.
double avg_degree(const SimpleDigraph& g);

struct MetricsReport {
    double cc_local = 0;
    double cc_global = 0;
    double avg_shortest_path = std::numeric_limits<double>::quiet_NaN();
    double reachable_fraction = 0;
    double avg_degree = 0;
    double avg_weighted_degree = 0; ///< total multi-edge weight / n
    double total_weight = 0;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t n_events = 0;
};

MetricsReport evaluate(const SampledNetwork& net);

/// JSON object with cc_local, cc_global, avg_shortest_path, reachable_fraction,
/// avg_degree, n, m (plus weighted totals).
std::string metrics_json(const MetricsReport& report);

// --- community evolution ----------------------------------------------------

inline constexpr std::int64_t kUnknownCommunity = -1;

struct CommunityLabels {
    std::unordered_map<std::uint32_t, std::int64_t> community; ///< by internal node index
    std::string source = "external-file";

    std::int64_t of(NodeId v) const;
};

/// CSV `node,community` (header `node,block` also accepted); nodes the id table
/// does not know are interned.
CommunityLabels read_labels_csv(std::istream& in, IdTable& ids);
CommunityLabels labels_from_blocks(std::span<const std::uint32_t> blocks);

struct EvolutionSeries {
    std::vector<std::int64_t> communities;        ///< column order
    std::vector<std::vector<std::size_t>> counts; ///< [timestep][column], timestep 0 = seeds
    std::vector<double> boundary;                 ///< per timestep
};

EvolutionSeries community_evolution(const SampleTrace& trace, const CommunityLabels& labels);

/// CSV `timestep,community,count,boundary`.
void write_evolution_csv(std::ostream& out, const EvolutionSeries& series);

/// Timesteps where the boundary's forward difference exceeds the mean of the
/// trailing `window` differences by more than z_threshold standard deviations.
std::vector<std::size_t> inflection_candidates(const EvolutionSeries& series, std::size_t window,
                                               double z_threshold);
std::vector<std::size_t> inflection_candidates(std::span<const double> boundary,
                                               std::size_t window, double z_threshold);

/// Majority-community share of the selections in (t - window, t] for each
/// t >= window; entry t - window holds timestep t.
std::vector<double> window_purity(const SampleTrace& trace, const CommunityLabels& labels,
                                  std::size_t window);

} // namespace snowball
