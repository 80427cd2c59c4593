#pragma once

#include "snowball/ids.hpp"
#include "snowball/pattern.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

namespace snowball {

class EdgeWeighting;

enum class Role : std::uint8_t { Unknown, Outsider, Insider };

/// All engagement from `source` (the engaging user) toward `target` (the author).
struct MultiEdge {
    NodeId source;
    NodeId target;
    std::vector<Event> events;
    double weight = 0.0;
};

enum class EdgeSelector : std::uint8_t {
    All,
    Boundary,        ///< outsider -> insider
    InsiderInternal, ///< insider -> insider
};

/// The part of the network revealed so far. Edges are only ever discovered by
/// querying an insider's in-neighborhood, so every edge target is an insider.
/// Single writer; concurrent readers are fine once a mutation has returned.
class DiscoveredGraph {
public:
    /// Adds `id` with `role` if unknown; otherwise leaves the current role.
    void add_node(NodeId id, Role role);
    void set_role(NodeId id, Role role);
    Role role(NodeId id) const noexcept;
    bool contains(NodeId id) const noexcept { return role(id) != Role::Unknown; }

    /// Appends events to the (source, target) edge, creating it if needed.
    /// Both endpoints must be known and the target must be an insider;
    /// self-loops are rejected.
    const MultiEdge& add_events(NodeId source, NodeId target, std::span<const Event> events,
                                double weight);

    const MultiEdge* find_edge(NodeId source, NodeId target) const;
    std::span<const MultiEdge> edges() const noexcept { return edges_; }
    /// Indices into edges() of the edges entering / leaving `id`.
    std::span<const std::uint32_t> in_edges(NodeId id) const noexcept;
    std::span<const std::uint32_t> out_edges(NodeId id) const noexcept;

    /// Known nodes in discovery order.
    std::span<const NodeId> nodes() const noexcept { return nodes_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::size_t insider_count() const noexcept { return insiders_; }

    /// Recomputes every edge weight from its events.
    void reweigh(const EdgeWeighting& weighting);

private:
    static std::uint64_t key(NodeId s, NodeId t) noexcept {
        return (std::uint64_t{index_of(s)} << 32) | index_of(t);
    }
    void ensure(NodeId id);

    std::vector<Role> roles_;
    std::vector<NodeId> nodes_;
    std::vector<MultiEdge> edges_;
    std::unordered_map<std::uint64_t, std::uint32_t> edge_index_;
    std::vector<std::vector<std::uint32_t>> in_;
    std::vector<std::vector<std::uint32_t>> out_;
    std::size_t insiders_ = 0;
};

/// Insiders only, with exactly the edges between two insiders.
DiscoveredGraph induced_insider_subgraph(const DiscoveredGraph& g);

double total_edge_weight(const DiscoveredGraph& g, EdgeSelector selector);
std::size_t total_event_count(const DiscoveredGraph& g, EdgeSelector selector);

/// TSV `source \t target \t weight \t n_events`, rows ordered by (target, source).
void write_edge_list(std::ostream& out, const DiscoveredGraph& g, const IdTable& ids);

} // namespace snowball
