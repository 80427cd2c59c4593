#include "snowball/oracle.hpp"

#include "snowball/error.hpp"
#include "snowball/text.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <ostream>

namespace snowball {

IndexedBackend::IndexedBackend(IdTable ids, std::span<const DirectedEvent> events,
                               std::string description)
    : ids_(std::move(ids)), in_(ids_.size()), description_(std::move(description)) {
    // Bucket by target, then group by source in id order.
    std::vector<std::vector<std::pair<NodeId, Event>>> buckets(ids_.size());
    for (const auto& e : events) {
        if (e.source == e.target) continue;
        if (index_of(e.source) >= ids_.size() || index_of(e.target) >= ids_.size()) {
            throw DataError("IndexedBackend: event refers to an unknown node");
        }
        buckets[index_of(e.target)].emplace_back(e.source, e.event);
        ++event_count_;
    }
    for (std::size_t t = 0; t < buckets.size(); ++t) {
        auto& bucket = buckets[t];
        std::stable_sort(bucket.begin(), bucket.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        auto& list = in_[t];
        for (auto& [source, event] : bucket) {
            if (list.empty() || list.back().source != source) list.push_back({source, {}});
            list.back().events.push_back(event);
        }
    }
}

std::shared_ptr<IndexedBackend>
IndexedBackend::from_undirected(std::size_t n,
                                std::span<const std::pair<std::uint32_t, std::uint32_t>> edges,
                                std::string description) {
    IdTable ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ids.intern(std::to_string(i));
    std::vector<DirectedEvent> directed;
    directed.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
        directed.push_back({node_at(u), node_at(v), Event::plain()});
        directed.push_back({node_at(v), node_at(u), Event::plain()});
    }
    return std::make_shared<IndexedBackend>(std::move(ids), directed, std::move(description));
}

std::shared_ptr<IndexedBackend> IndexedBackend::load_edge_list(const std::string& path,
                                                               bool undirected) {
    auto in = text::open_input(path);
    IdTable ids;
    std::vector<DirectedEvent> edges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        const auto fields = text::split_fields(trimmed, '\t');
        if (fields.size() < 2 || text::trim(fields[0]).empty() || text::trim(fields[1]).empty()) {
            throw DataError(fmt::format("{}:{}: expected 'source<TAB>target'", path, line_no));
        }
        const NodeId s = ids.intern(text::trim(fields[0]));
        const NodeId t = ids.intern(text::trim(fields[1]));
        edges.push_back({s, t, Event::plain()});
        if (undirected) edges.push_back({t, s, Event::plain()});
    }
    if (in.bad()) throw IoError("read failure: " + path);
    const std::string kind = undirected ? "undirected-edge-list:" : "edge-list:";
    return std::make_shared<IndexedBackend>(std::move(ids), edges, kind + path);
}

std::vector<InNeighbor> IndexedBackend::in_neighbors(NodeId v) const {
    if (index_of(v) >= in_.size()) throw NodeNotDiscoverable(std::to_string(index_of(v)));
    return in_[index_of(v)];
}

GraphOracle::GraphOracle(std::shared_ptr<const OracleBackend> backend)
    : backend_(std::move(backend)) {
    if (!backend_) throw std::invalid_argument("GraphOracle: null backend");
    discoverable_.assign(backend_->ids().size(), false);
}

std::optional<NodeId> GraphOracle::resolve(std::string_view external) const {
    return backend_->ids().find(external);
}

const std::string& GraphOracle::external(NodeId id) const { return backend_->ids().external(id); }

void GraphOracle::declare_seeds(std::span<const NodeId> seeds) {
    std::lock_guard lock(mutex_);
    for (NodeId s : seeds) {
        if (index_of(s) >= discoverable_.size()) {
            throw NodeNotDiscoverable(std::to_string(index_of(s)));
        }
        discoverable_[index_of(s)] = true;
    }
}

std::vector<InNeighbor> GraphOracle::in_neighbors(NodeId v) {
    {
        std::lock_guard lock(mutex_);
        if (index_of(v) >= discoverable_.size() || !discoverable_[index_of(v)]) {
            const auto name = index_of(v) < backend_->ids().size()
                                  ? backend_->ids().external(v)
                                  : std::to_string(index_of(v));
            throw NodeNotDiscoverable(name);
        }
    }
    auto result = backend_->in_neighbors(v);
    std::lock_guard lock(mutex_);
    log_.push_back(v);
    for (const auto& n : result) discoverable_[index_of(n.source)] = true;
    return result;
}

std::vector<NodeId> GraphOracle::access_log() const {
    std::lock_guard lock(mutex_);
    return log_;
}

std::size_t GraphOracle::query_count() const {
    std::lock_guard lock(mutex_);
    return log_.size();
}

void GraphOracle::write_access_log(std::ostream& out) const {
    const auto log = access_log();
    out << "step,node_ext_id\n";
    for (std::size_t i = 0; i < log.size(); ++i) {
        out << i << ',' << external(log[i]) << '\n';
    }
}

} // namespace snowball
