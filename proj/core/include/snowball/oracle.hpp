#pragma once

#include "snowball/ids.hpp"
#include "snowball/pattern.hpp"

#include <iosfwd>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace snowball {

struct InNeighbor {
    NodeId source;
    std::vector<Event> events;

    friend bool operator==(const InNeighbor&, const InNeighbor&) = default;
};

/// Read-only store behind an oracle.
class OracleBackend {
public:
    virtual ~OracleBackend() = default;

    virtual const IdTable& ids() const = 0;
    /// In-neighbors of `v` ordered by internal id, self-loops excluded.
    virtual std::vector<InNeighbor> in_neighbors(NodeId v) const = 0;
    virtual std::string describe() const = 0;
};

/// A directed edge between interned nodes, carrying one event.
struct DirectedEvent {
    NodeId source;
    NodeId target;
    Event event;
};

/// In-memory backend with in-neighborhoods pre-indexed at construction.
class IndexedBackend final : public OracleBackend {
public:
    IndexedBackend(IdTable ids, std::span<const DirectedEvent> events, std::string description);

    /// Undirected graph on nodes 0..n-1 (external ids "0".."n-1"); every edge
    /// is served in both directions as a plain event.
    static std::shared_ptr<IndexedBackend>
    from_undirected(std::size_t n, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges,
                    std::string description);

    /// TSV with one edge `source \t target` per line; '#' comments allowed.
    /// Undirected lists are served in both directions.
    static std::shared_ptr<IndexedBackend> load_edge_list(const std::string& path,
                                                          bool undirected = false);

    const IdTable& ids() const override { return ids_; }
    std::vector<InNeighbor> in_neighbors(NodeId v) const override;
    std::string describe() const override { return description_; }

    std::size_t event_count() const noexcept { return event_count_; }

private:
    IdTable ids_;
    std::vector<std::vector<InNeighbor>> in_;
    std::string description_;
    std::size_t event_count_ = 0;
};

/// The only gateway samplers have to the network: in-neighborhood queries for
/// seeds and for nodes the oracle has already revealed. Every query is logged.
/// Queries may come from several threads; the log is synchronized.
class GraphOracle {
public:
    explicit GraphOracle(std::shared_ptr<const OracleBackend> backend);

    GraphOracle(const GraphOracle&) = delete;
    GraphOracle& operator=(const GraphOracle&) = delete;

    std::optional<NodeId> resolve(std::string_view external) const;
    const std::string& external(NodeId id) const;
    const IdTable& ids() const { return backend_->ids(); }

    /// Marks seeds as discoverable. Throws NodeNotDiscoverable for ids the
    /// backing store does not know.
    void declare_seeds(std::span<const NodeId> seeds);

    /// Throws NodeNotDiscoverable unless `v` is a declared seed or was
    /// returned by an earlier query.
    std::vector<InNeighbor> in_neighbors(NodeId v);

    std::vector<NodeId> access_log() const;
    std::size_t query_count() const;
    /// CSV `step,node_ext_id`, steps from 0.
    void write_access_log(std::ostream& out) const;

    std::string describe() const { return backend_->describe(); }

private:
    std::shared_ptr<const OracleBackend> backend_;
    mutable std::mutex mutex_;
    std::vector<NodeId> log_;
    std::vector<bool> discoverable_;
};

} // namespace snowball
