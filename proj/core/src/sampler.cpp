#include "snowball/sampler.hpp"

#include "snowball/error.hpp"
#include "snowball/text.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <unordered_map>

namespace snowball {

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::MAS: return "MAS";
    case Strategy::RI_MAS: return "RI_MAS";
    case Strategy::RO: return "RO";
    case Strategy::RI_RO: return "RI_RO";
    case Strategy::RS_DU: return "RS_DU";
    case Strategy::RS_DW: return "RS_DW";
    case Strategy::RS_SU: return "RS_SU";
    case Strategy::RS_SW: return "RS_SW";
    }
    return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
    for (Strategy s : kAllStrategies) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

std::string_view to_string(StopReason r) {
    return r == StopReason::Budget ? "budget reached" : "frontier exhausted";
}

std::vector<NodeId> SampleTrace::inclusion_order() const {
    std::vector<NodeId> order = seeds;
    order.reserve(seeds.size() + steps.size());
    for (const auto& s : steps) order.push_back(s.node);
    return order;
}

void write_trace_csv(std::ostream& out, const SampleTrace& trace, const IdTable& ids) {
    out << "timestep,node_ext_id,priority,boundary,new_nodes,new_edges\n";
    for (const auto& s : trace.steps) {
        out << s.timestep << ',' << ids.external(s.node) << ',' << text::format_double(s.priority)
            << ',' << text::format_double(s.boundary) << ',' << s.new_nodes << ',' << s.new_edges
            << '\n';
    }
}

// ---------------------------------------------------------------------------

void TightSampler::IndexedSet::insert(NodeId v) {
    const auto i = index_of(v);
    if (i >= pos_.size()) pos_.resize(std::max<std::size_t>(i + 1, pos_.size() * 2), -1);
    if (pos_[i] >= 0) return;
    pos_[i] = static_cast<std::int64_t>(items_.size());
    items_.push_back(v);
}

void TightSampler::IndexedSet::erase(NodeId v) {
    if (!contains(v)) return;
    const auto i = index_of(v);
    const auto at = static_cast<std::size_t>(pos_[i]);
    const NodeId last = items_.back();
    items_[at] = last;
    pos_[index_of(last)] = static_cast<std::int64_t>(at);
    items_.pop_back();
    pos_[i] = -1;
}

bool TightSampler::IndexedSet::contains(NodeId v) const noexcept {
    const auto i = index_of(v);
    return i < pos_.size() && pos_[i] >= 0;
}

std::size_t TightSampler::Fenwick::append(double value) {
    values_.push_back(value);
    const std::size_t i = values_.size(); // 1-based
    const std::size_t low = i & (~i + 1);
    tree_.push_back(value + (prefix(i - 1) - prefix(i - low)));
    return i - 1;
}

void TightSampler::Fenwick::add(std::size_t slot, double delta) {
    values_[slot] += delta;
    for (std::size_t i = slot + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
}

double TightSampler::Fenwick::prefix(std::size_t count) const {
    double s = 0;
    for (std::size_t i = count; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
}

double TightSampler::Fenwick::total() const { return prefix(values_.size()); }

std::size_t TightSampler::Fenwick::find(double u) const {
    const std::size_t n = values_.size();
    std::size_t pos = 0;
    for (std::size_t step = std::bit_floor(n); step > 0; step >>= 1) {
        if (pos + step <= n && tree_[pos + step] <= u) {
            pos += step;
            u -= tree_[pos];
        }
    }
    return std::min(pos, n - 1);
}

bool TightSampler::HeapOrder::operator()(const HeapEntry& a, const HeapEntry& b) const noexcept {
    if (a.priority != b.priority) return a.priority < b.priority;
    if (a.key != b.key) return a.key > b.key;
    return a.node > b.node;
}

// ---------------------------------------------------------------------------

TightSampler::TightSampler(GraphOracle& oracle, std::span<const NodeId> seeds,
                           EdgeWeighting weighting, SamplerOptions options)
    : oracle_(oracle), weighting_(std::move(weighting)), base_(weighting_.unscaled()),
      scale_(weighting_.scale()), options_(options),
      rng_(options.rng_seed) {
    std::vector<NodeId> unique;
    for (NodeId s : seeds) {
        if (std::find(unique.begin(), unique.end(), s) == unique.end()) unique.push_back(s);
    }
    if (unique.empty()) throw ConfigError("no seeds");
    oracle_.declare_seeds(unique);

    // All seeds are inside before any query, so seed-to-seed edges are internal.
    for (NodeId s : unique) {
        grow(s);
        graph_.add_node(s, Role::Insider);
        insiders_.push_back(s);
    }
    std::size_t ignored = 0;
    for (NodeId s : unique) {
        if (reveal(s, 0, ignored) > 0 && outsider_in_count_[index_of(s)] > 0) staged_.insert(s);
    }
    trace_.seeds = unique;
    trace_.initial_boundary = scale_ * boundary_;
}

void TightSampler::grow(NodeId v) {
    const auto need = std::size_t{index_of(v)} + 1;
    if (need <= priority_.size()) return;
    const auto n = std::max(need, priority_.size() * 2);
    priority_.resize(n, 0.0);
    tie_key_.resize(n, 0);
    outsider_in_count_.resize(n, 0);
    slot_.resize(n, -1);
}

double TightSampler::priority(NodeId v) const noexcept {
    const auto i = index_of(v);
    if (i >= priority_.size() || graph_.role(v) != Role::Outsider) return 0.0;
    return scale_ * priority_[i];
}

void TightSampler::include(NodeId v) {
    const auto i = index_of(v);
    boundary_ -= priority_[i];
    outsiders_.erase(v);
    if (slot_[i] >= 0) {
        const auto slot = static_cast<std::size_t>(slot_[i]);
        fenwick_.add(slot, -fenwick_.value(slot));
    }
    graph_.set_role(v, Role::Insider);
    insiders_.push_back(v);
    // v's edges into the sample stop being boundary edges.
    for (auto e : graph_.out_edges(v)) {
        const NodeId target = graph_.edges()[e].target;
        auto& count = outsider_in_count_[index_of(target)];
        if (--count == 0) staged_.erase(target);
    }
}

std::size_t TightSampler::reveal(NodeId v, std::size_t timestep, std::size_t& new_nodes) {
    const auto neighbors = oracle_.in_neighbors(v);
    for (const auto& n : neighbors) {
        const NodeId u = n.source;
        if (u == v) continue;
        const double w = base_.total(n.events);
        if (!graph_.contains(u)) {
            grow(u);
            graph_.add_node(u, Role::Outsider);
            const auto ui = index_of(u);
            tie_key_[ui] = options_.tie_break == TieBreak::Random ? rng_() : timestep;
            priority_[ui] = 0.0;
            outsiders_.insert(u);
            slot_[ui] = static_cast<std::int64_t>(fenwick_.append(0.0));
            slot_node_.push_back(u);
            ++new_nodes;
        }
        graph_.add_events(u, v, n.events, weighting_.total(n.events));
        if (graph_.role(u) == Role::Outsider) {
            const auto ui = index_of(u);
            priority_[ui] += w;
            boundary_ += w;
            heap_.push({priority_[ui], tie_key_[ui], u});
            fenwick_.add(static_cast<std::size_t>(slot_[ui]), w);
            ++outsider_in_count_[index_of(v)];
        }
    }
    return neighbors.size();
}

bool TightSampler::better(NodeId a, NodeId b) const noexcept {
    const auto ia = index_of(a), ib = index_of(b);
    return HeapOrder{}({priority_[ib], tie_key_[ib], b}, {priority_[ia], tie_key_[ia], a});
}

std::size_t TightSampler::pick_uniform(std::size_t n) {
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(rng_);
}

NodeId TightSampler::select_max_priority() {
    while (!heap_.empty()) {
        const auto top = heap_.top();
        const auto i = index_of(top.node);
        if (graph_.role(top.node) == Role::Outsider && top.priority == priority_[i]) {
            return top.node;
        }
        heap_.pop(); // stale
    }
    throw FrontierExhausted();
}

NodeId TightSampler::select_weighted_direct() {
    const double total = fenwick_.total();
    if (total > 0) {
        std::uniform_real_distribution<double> dist(0.0, total);
        const auto slot = fenwick_.find(dist(rng_));
        const NodeId v = slot_node_[slot];
        if (graph_.role(v) == Role::Outsider && fenwick_.value(slot) > 0) return v;
    }
    // Rounding drift in the tree landed on an empty slot; draw exactly.
    double sum = 0;
    for (NodeId v : outsiders_.items()) sum += priority_[index_of(v)];
    std::uniform_real_distribution<double> dist(0.0, sum);
    double u = dist(rng_);
    for (NodeId v : outsiders_.items()) {
        u -= priority_[index_of(v)];
        if (u < 0) return v;
    }
    return outsiders_.items().back();
}

std::vector<NodeId> TightSampler::staged_candidates() {
    const NodeId insider = staged_.at(pick_uniform(staged_.size()));
    std::vector<NodeId> out;
    for (auto e : graph_.in_edges(insider)) {
        const NodeId u = graph_.edges()[e].source;
        if (graph_.role(u) == Role::Outsider) out.push_back(u);
    }
    return out;
}

NodeId TightSampler::select(Strategy strategy) {
    switch (strategy) {
    case Strategy::MAS: return select_max_priority();
    case Strategy::RO:
    case Strategy::RS_DU:
        return outsiders_.at(pick_uniform(outsiders_.size()));
    case Strategy::RS_DW: return select_weighted_direct();
    case Strategy::RI_MAS: {
        const auto c = staged_candidates();
        return *std::min_element(c.begin(), c.end(),
                                 [this](NodeId a, NodeId b) { return better(a, b); });
    }
    case Strategy::RI_RO:
    case Strategy::RS_SU: {
        const auto c = staged_candidates();
        return c[pick_uniform(c.size())];
    }
    case Strategy::RS_SW: {
        const auto c = staged_candidates();
        double sum = 0;
        for (NodeId v : c) sum += priority_[index_of(v)];
        std::uniform_real_distribution<double> dist(0.0, sum);
        double u = dist(rng_);
        for (NodeId v : c) {
            u -= priority_[index_of(v)];
            if (u < 0) return v;
        }
        return c.back();
    }
    }
    throw std::logic_error("unknown strategy");
}

NodeId TightSampler::step(Strategy strategy) {
    if (outsiders_.empty()) throw FrontierExhausted();
    const NodeId v = select(strategy);
    const double p = priority_[index_of(v)];
    include(v);
    std::size_t new_nodes = 0;
    const std::size_t new_edges = reveal(v, trace_.steps.size() + 1, new_nodes);
    if (outsiders_.empty()) boundary_ = 0.0; // drop subtraction residue
    if (outsider_in_count_[index_of(v)] > 0) staged_.insert(v);

    TraceStep s;
    s.timestep = trace_.steps.size() + 1;
    s.node = v;
    s.priority = scale_ * p;
    s.boundary = scale_ * boundary_;
    s.new_nodes = new_nodes;
    s.new_edges = new_edges;
    s.insiders = insiders_.size();
    trace_.steps.push_back(s);
    return v;
}

const SampleTrace& TightSampler::run(Strategy strategy, Budget budget) {
    if (budget.max_steps && *budget.max_steps == 0) throw ConfigError("budget must be >= 1");
    trace_.reason = StopReason::Budget;
    for (;;) {
        if (budget.max_steps && trace_.steps.size() >= *budget.max_steps) break;
        if (budget.target_insiders && insiders_.size() >= *budget.target_insiders) break;
        if (outsiders_.empty()) {
            trace_.reason = StopReason::FrontierExhausted;
            break;
        }
        step(strategy);
    }
    return trace_;
}

TightSampler::Audit TightSampler::audit() const {
    Audit a;
    std::unordered_map<std::uint32_t, double> recomputed;
    std::unordered_map<std::uint32_t, std::uint32_t> staged_count;
    double boundary = 0;
    for (const auto& e : graph_.edges()) {
        if (graph_.role(e.source) == Role::Outsider && graph_.role(e.target) == Role::Insider) {
            recomputed[index_of(e.source)] += e.weight;
            ++staged_count[index_of(e.target)];
            boundary += e.weight;
        }
    }
    a.boundary_error = std::abs(boundary - scale_ * boundary_);

    std::size_t outsiders = 0;
    for (NodeId v : graph_.nodes()) {
        if (graph_.role(v) != Role::Outsider) continue;
        ++outsiders;
        auto it = recomputed.find(index_of(v));
        if (it == recomputed.end() || !outsiders_.contains(v)) {
            a.frontier_consistent = false;
            continue;
        }
        a.max_priority_error =
            std::max(a.max_priority_error, std::abs(it->second - scale_ * priority_[index_of(v)]));
    }
    if (outsiders != outsiders_.size()) a.frontier_consistent = false;

    for (NodeId v : insiders_) {
        auto it = staged_count.find(index_of(v));
        const std::uint32_t expect = it == staged_count.end() ? 0 : it->second;
        if (outsider_in_count_[index_of(v)] != expect || staged_.contains(v) != (expect > 0)) {
            a.staged_index_consistent = false;
        }
    }
    return a;
}

} // namespace snowball
