#include "snowball/graph.hpp"

#include "snowball/text.hpp"
#include "snowball/weighting.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace snowball {

void DiscoveredGraph::ensure(NodeId id) {
    const auto i = index_of(id);
    if (i >= roles_.size()) {
        const auto n = std::max<std::size_t>(i + 1, roles_.size() * 2);
        roles_.resize(n, Role::Unknown);
        in_.resize(n);
        out_.resize(n);
    }
}

void DiscoveredGraph::add_node(NodeId id, Role role) {
    if (role == Role::Unknown) throw std::logic_error("add_node: role must be known");
    ensure(id);
    auto& r = roles_[index_of(id)];
    if (r != Role::Unknown) return;
    r = role;
    nodes_.push_back(id);
    if (role == Role::Insider) ++insiders_;
}

void DiscoveredGraph::set_role(NodeId id, Role role) {
    if (!contains(id)) {
        add_node(id, role);
        return;
    }
    if (role == Role::Unknown) throw std::logic_error("set_role: cannot forget a node");
    auto& r = roles_[index_of(id)];
    if (r == Role::Insider && role != Role::Insider) {
        throw std::logic_error("set_role: insiders never leave the sample");
    }
    if (r != Role::Insider && role == Role::Insider) ++insiders_;
    r = role;
}

Role DiscoveredGraph::role(NodeId id) const noexcept {
    const auto i = index_of(id);
    return i < roles_.size() ? roles_[i] : Role::Unknown;
}

const MultiEdge& DiscoveredGraph::add_events(NodeId source, NodeId target,
                                             std::span<const Event> events, double weight) {
    if (source == target) throw std::logic_error("add_events: self-loop");
    if (!contains(source) || role(target) != Role::Insider) {
        throw std::logic_error("add_events: source must be known and target an insider");
    }
    auto [it, inserted] =
        edge_index_.try_emplace(key(source, target), static_cast<std::uint32_t>(edges_.size()));
    if (inserted) {
        edges_.push_back(MultiEdge{source, target, {}, 0.0});
        out_[index_of(source)].push_back(it->second);
        in_[index_of(target)].push_back(it->second);
    }
    auto& edge = edges_[it->second];
    edge.events.insert(edge.events.end(), events.begin(), events.end());
    edge.weight += weight;
    return edge;
}

const MultiEdge* DiscoveredGraph::find_edge(NodeId source, NodeId target) const {
    auto it = edge_index_.find(key(source, target));
    return it == edge_index_.end() ? nullptr : &edges_[it->second];
}

std::span<const std::uint32_t> DiscoveredGraph::in_edges(NodeId id) const noexcept {
    const auto i = index_of(id);
    if (i >= in_.size()) return {};
    return in_[i];
}

std::span<const std::uint32_t> DiscoveredGraph::out_edges(NodeId id) const noexcept {
    const auto i = index_of(id);
    if (i >= out_.size()) return {};
    return out_[i];
}

void DiscoveredGraph::reweigh(const EdgeWeighting& weighting) {
    for (auto& e : edges_) e.weight = weighting.total(e.events);
}

DiscoveredGraph induced_insider_subgraph(const DiscoveredGraph& g) {
    DiscoveredGraph out;
    for (NodeId v : g.nodes()) {
        if (g.role(v) == Role::Insider) out.add_node(v, Role::Insider);
    }
    for (const auto& e : g.edges()) {
        if (g.role(e.source) == Role::Insider && g.role(e.target) == Role::Insider) {
            out.add_events(e.source, e.target, e.events, e.weight);
        }
    }
    return out;
}

namespace {

bool selected(const DiscoveredGraph& g, const MultiEdge& e, EdgeSelector selector) {
    switch (selector) {
    case EdgeSelector::All: return true;
    case EdgeSelector::Boundary:
        return g.role(e.source) == Role::Outsider && g.role(e.target) == Role::Insider;
    case EdgeSelector::InsiderInternal:
        return g.role(e.source) == Role::Insider && g.role(e.target) == Role::Insider;
    }
    return false;
}

} // namespace

double total_edge_weight(const DiscoveredGraph& g, EdgeSelector selector) {
    double sum = 0;
    for (const auto& e : g.edges()) {
        if (selected(g, e, selector)) sum += e.weight;
    }
    return sum;
}

std::size_t total_event_count(const DiscoveredGraph& g, EdgeSelector selector) {
    std::size_t sum = 0;
    for (const auto& e : g.edges()) {
        if (selected(g, e, selector)) sum += e.events.size();
    }
    return sum;
}

void write_edge_list(std::ostream& out, const DiscoveredGraph& g, const IdTable& ids) {
    std::vector<const MultiEdge*> rows;
    rows.reserve(g.edge_count());
    for (const auto& e : g.edges()) rows.push_back(&e);
    std::sort(rows.begin(), rows.end(), [](const MultiEdge* a, const MultiEdge* b) {
        if (a->target != b->target) return a->target < b->target;
        return a->source < b->source;
    });
    for (const auto* e : rows) {
        out << ids.external(e->source) << '\t' << ids.external(e->target) << '\t'
            << text::format_double(e->weight) << '\t' << e->events.size() << '\n';
    }
}

} // namespace snowball
