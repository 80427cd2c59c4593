#include "snowball/metrics.hpp"

#include "snowball/error.hpp"
#include "snowball/text.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <spdlog/spdlog.h>

namespace snowball {

SampledNetwork sampled_network(const DiscoveredGraph& g, std::span<const NodeId> inclusion_order) {
    SampledNetwork net;
    net.insiders.assign(inclusion_order.begin(), inclusion_order.end());
    for (const auto& e : g.edges()) {
        if (g.role(e.source) == Role::Insider && g.role(e.target) == Role::Insider) {
            net.edges.push_back({e.source, e.target, e.weight, e.events.size()});
        }
    }
    return net;
}

SampledNetwork truncate(const SampledNetwork& net, std::size_t insiders) {
    SampledNetwork out;
    const auto k = std::min(insiders, net.insiders.size());
    out.insiders.assign(net.insiders.begin(), net.insiders.begin() + static_cast<std::ptrdiff_t>(k));
    std::unordered_map<std::uint32_t, bool> keep;
    for (NodeId v : out.insiders) keep[index_of(v)] = true;
    for (const auto& e : net.edges) {
        if (keep.contains(index_of(e.source)) && keep.contains(index_of(e.target))) {
            out.edges.push_back(e);
        }
    }
    return out;
}

std::vector<SampledNetwork> min_common_snapshot(std::span<const SampledNetwork> nets) {
    if (nets.empty()) throw ConfigError("min_common_snapshot: no samples to compare");
    std::size_t k = nets.front().insiders.size();
    for (const auto& n : nets) k = std::min(k, n.insiders.size());
    std::vector<SampledNetwork> out;
    out.reserve(nets.size());
    for (const auto& n : nets) out.push_back(truncate(n, k));
    return out;
}

// ---------------------------------------------------------------------------

SimpleDigraph::SimpleDigraph(std::size_t n) : out_(n), in_(n) {}

SimpleDigraph::SimpleDigraph(std::size_t n,
                             std::span<const std::pair<std::uint32_t, std::uint32_t>> edges)
    : out_(n), in_(n) {
    for (auto [u, v] : edges) {
        if (u >= n || v >= n) throw DataError("SimpleDigraph: edge endpoint out of range");
        if (u != v) out_[u].push_back(v);
    }
    for (std::uint32_t u = 0; u < n; ++u) {
        auto& adj = out_[u];
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
        edges_ += adj.size();
        for (auto v : adj) in_[v].push_back(u);
    }
}

SimpleDigraph SimpleDigraph::from(const SampledNetwork& net) {
    std::unordered_map<std::uint32_t, std::uint32_t> local;
    for (std::uint32_t i = 0; i < net.insiders.size(); ++i) local[index_of(net.insiders[i])] = i;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    edges.reserve(net.edges.size());
    for (const auto& e : net.edges) {
        auto s = local.find(index_of(e.source));
        auto t = local.find(index_of(e.target));
        if (s != local.end() && t != local.end()) edges.emplace_back(s->second, t->second);
    }
    return SimpleDigraph(net.insiders.size(), edges);
}

bool SimpleDigraph::has_edge(std::uint32_t u, std::uint32_t v) const noexcept {
    const auto& adj = out_[u];
    return std::binary_search(adj.begin(), adj.end(), v);
}

LocalClustering clustering_local(const SimpleDigraph& g) {
    const std::size_t n = g.size();
    if (n == 0) throw DataError("clustering_local: empty graph");
    LocalClustering result;
    result.per_node.assign(n, 0.0);
    std::vector<std::uint32_t> mark(n, 0);
    std::vector<std::uint32_t> hood;
    for (std::uint32_t i = 0; i < n; ++i) {
        hood.clear();
        const std::uint32_t stamp = i + 1;
        for (auto v : g.out(i)) {
            if (mark[v] != stamp) { mark[v] = stamp; hood.push_back(v); }
        }
        for (auto v : g.in(i)) {
            if (mark[v] != stamp) { mark[v] = stamp; hood.push_back(v); }
        }
        const std::size_t deg = hood.size();
        if (deg < 2) continue;
        std::uint64_t links = 0;
        for (auto j : hood) {
            for (auto k : g.out(j)) {
                if (k != i && mark[k] == stamp) ++links;
            }
        }
        result.per_node[i] =
            static_cast<double>(links) / (static_cast<double>(deg) * static_cast<double>(deg - 1));
    }
    double sum = 0;
    for (double c : result.per_node) sum += c;
    result.mean = sum / static_cast<double>(n);
    return result;
}

double clustering_global(const SimpleDigraph& g) {
    const std::size_t n = g.size();
    std::vector<std::vector<std::uint32_t>> und(n);
    for (std::uint32_t u = 0; u < n; ++u) {
        for (auto v : g.out(u)) {
            und[u].push_back(v);
            und[v].push_back(u);
        }
    }
    for (auto& adj : und) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    std::vector<std::uint32_t> mark(n, 0);
    std::uint64_t closed = 0, triplets = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
        const auto d = und[v].size();
        triplets += d * (d - (d > 0 ? 1 : 0)) / 2;
        const std::uint32_t stamp = v + 1;
        for (auto a : und[v]) mark[a] = stamp;
        // closed triplets centred at v: neighbor pairs that are adjacent
        std::uint64_t pairs = 0;
        for (auto a : und[v]) {
            for (auto b : und[a]) {
                if (b != v && mark[b] == stamp) ++pairs;
            }
        }
        closed += pairs / 2;
    }
    if (triplets == 0) {
        spdlog::warn("clustering_global: graph has no connected triplets; reporting 0");
        return 0.0;
    }
    return static_cast<double>(closed) / static_cast<double>(triplets);
}

PathStats avg_shortest_path(const SimpleDigraph& g) {
    const std::size_t n = g.size();
    std::vector<std::int64_t> dist(n, -1);
    std::vector<std::uint32_t> queue;
    queue.reserve(n);
    std::uint64_t total = 0, pairs = 0;
    for (std::uint32_t s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        queue.clear();
        dist[s] = 0;
        queue.push_back(s);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const auto u = queue[head];
            for (auto v : g.out(u)) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    total += static_cast<std::uint64_t>(dist[v]);
                    ++pairs;
                    queue.push_back(v);
                }
            }
        }
    }
    if (pairs == 0) throw DataError("avg_shortest_path: no reachable pairs");
    PathStats stats;
    stats.reachable_pairs = pairs;
    stats.average = static_cast<double>(total) / static_cast<double>(pairs);
    stats.reachable_fraction =
        static_cast<double>(pairs) / (static_cast<double>(n) * static_cast<double>(n - 1));
    return stats;
}

double avg_degree(const SimpleDigraph& g) {
    if (g.size() == 0) throw DataError("avg_degree: empty graph");
    return static_cast<double>(g.edge_count()) / static_cast<double>(g.size());
}

MetricsReport evaluate(const SampledNetwork& net) {
    const auto g = SimpleDigraph::from(net);
    MetricsReport r;
    r.n = g.size();
    r.m = g.edge_count();
    r.cc_local = clustering_local(g).mean;
    r.cc_global = clustering_global(g);
    try {
        const auto paths = avg_shortest_path(g);
        r.avg_shortest_path = paths.average;
        r.reachable_fraction = paths.reachable_fraction;
    } catch (const DataError&) {
        spdlog::warn("evaluate: no reachable pairs; avg_shortest_path left undefined");
    }
    r.avg_degree = avg_degree(g);
    for (const auto& e : net.edges) {
        r.total_weight += e.weight;
        r.n_events += e.events;
    }
    r.avg_weighted_degree = r.total_weight / static_cast<double>(r.n);
    return r;
}

std::string metrics_json(const MetricsReport& r) {
    nlohmann::ordered_json j;
    j["cc_local"] = r.cc_local;
    j["cc_global"] = r.cc_global;
    if (std::isnan(r.avg_shortest_path)) {
        j["avg_shortest_path"] = nullptr;
    } else {
        j["avg_shortest_path"] = r.avg_shortest_path;
    }
    j["reachable_fraction"] = r.reachable_fraction;
    j["avg_degree"] = r.avg_degree;
    j["n"] = r.n;
    j["m"] = r.m;
    j["avg_weighted_degree"] = r.avg_weighted_degree;
    j["total_weight"] = r.total_weight;
    j["n_events"] = r.n_events;
    return j.dump(2);
}

// ---------------------------------------------------------------------------

std::int64_t CommunityLabels::of(NodeId v) const {
    auto it = community.find(index_of(v));
    return it == community.end() ? kUnknownCommunity : it->second;
}

CommunityLabels read_labels_csv(std::istream& in, IdTable& ids) {
    CommunityLabels labels;
    std::string line;
    if (!std::getline(in, line)) throw DataError("labels: empty file");
    const auto header = text::trim(line);
    if (header != "node,community" && header != "node,block") {
        throw DataError("labels: expected header 'node,community'");
    }
    if (header == "node,block") labels.source = "sbm-blocks";
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto fields = text::split_fields(line, ',');
        const auto c = fields.size() == 2 ? text::parse_int(fields[1]) : std::nullopt;
        if (!c) throw DataError("labels line " + std::to_string(line_no) + ": bad row");
        const NodeId v = ids.intern(text::trim(fields[0]));
        if (!labels.community.emplace(index_of(v), *c).second) {
            throw DataError("labels: node '" + fields[0] + "' labeled twice");
        }
    }
    return labels;
}

CommunityLabels labels_from_blocks(std::span<const std::uint32_t> blocks) {
    CommunityLabels labels;
    labels.source = "sbm-blocks";
    for (std::uint32_t v = 0; v < blocks.size(); ++v) labels.community[v] = blocks[v];
    return labels;
}

EvolutionSeries community_evolution(const SampleTrace& trace, const CommunityLabels& labels) {
    EvolutionSeries series;
    const auto order = trace.inclusion_order();
    for (NodeId v : order) series.communities.push_back(labels.of(v));
    std::sort(series.communities.begin(), series.communities.end());
    series.communities.erase(std::unique(series.communities.begin(), series.communities.end()),
                             series.communities.end());
    auto column = [&](std::int64_t c) {
        return static_cast<std::size_t>(
            std::lower_bound(series.communities.begin(), series.communities.end(), c) -
            series.communities.begin());
    };
    std::vector<std::size_t> current(series.communities.size(), 0);
    for (NodeId s : trace.seeds) ++current[column(labels.of(s))];
    series.counts.push_back(current);
    series.boundary.push_back(trace.initial_boundary);
    for (const auto& step : trace.steps) {
        ++current[column(labels.of(step.node))];
        series.counts.push_back(current);
        series.boundary.push_back(step.boundary);
    }
    return series;
}

void write_evolution_csv(std::ostream& out, const EvolutionSeries& series) {
    out << "timestep,community,count,boundary\n";
    for (std::size_t t = 0; t < series.counts.size(); ++t) {
        for (std::size_t c = 0; c < series.communities.size(); ++c) {
            out << t << ',';
            if (series.communities[c] == kUnknownCommunity) {
                out << "unknown";
            } else {
                out << series.communities[c];
            }
            out << ',' << series.counts[t][c] << ',' << text::format_double(series.boundary[t])
                << '\n';
        }
    }
}

std::vector<std::size_t> inflection_candidates(std::span<const double> boundary,
                                               std::size_t window, double z_threshold) {
    if (window < 2) throw ConfigError("inflection_candidates: window must be >= 2");
    std::vector<std::size_t> out;
    if (boundary.size() < window + 2) return out;
    std::vector<double> diff(boundary.size(), 0.0); // diff[t] = b[t] - b[t-1]
    for (std::size_t t = 1; t < boundary.size(); ++t) diff[t] = boundary[t] - boundary[t - 1];
    for (std::size_t t = window + 1; t < boundary.size(); ++t) {
        double mean = 0;
        for (std::size_t k = t - window; k < t; ++k) mean += diff[k];
        mean /= static_cast<double>(window);
        double var = 0;
        for (std::size_t k = t - window; k < t; ++k) var += (diff[k] - mean) * (diff[k] - mean);
        const double sd = std::sqrt(var / static_cast<double>(window - 1));
        const double excess = diff[t] - mean;
        if (excess > 0 && excess > z_threshold * sd) out.push_back(t);
    }
    return out;
}

std::vector<std::size_t> inflection_candidates(const EvolutionSeries& series, std::size_t window,
                                               double z_threshold) {
    return inflection_candidates(std::span<const double>(series.boundary), window, z_threshold);
}

std::vector<double> window_purity(const SampleTrace& trace, const CommunityLabels& labels,
                                  std::size_t window) {
    std::vector<double> out;
    if (window == 0 || trace.steps.size() < window) return out;
    std::unordered_map<std::int64_t, std::size_t> counts;
    std::size_t best = 0;
    auto label_at = [&](std::size_t i) { return labels.of(trace.steps[i].node); };
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        ++counts[label_at(i)];
        if (i >= window) --counts[label_at(i - window)];
        if (i + 1 >= window) {
            best = 0;
            for (const auto& [c, n] : counts) best = std::max(best, n);
            out.push_back(static_cast<double>(best) / static_cast<double>(window));
        }
    }
    return out;
}

} // namespace snowball
