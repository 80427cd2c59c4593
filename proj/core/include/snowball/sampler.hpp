#pragma once

// Tight snowball sampling: grow a seed set one node per timestep by moving an
// outsider (a discovered in-neighbor of the sample) inside. Priorities and the
// directed boundary are maintained incrementally as new in-edges are revealed.

#include "snowball/graph.hpp"
#include "snowball/oracle.hpp"
#include "snowball/weighting.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace snowball {

enum class Strategy : std::uint8_t {
    MAS,    ///< maximum priority outsider
    RI_MAS, ///< random insider, then its maximum priority outsider in-neighbor
    RO,     ///< uniform outsider
    RI_RO,  ///< random insider, then a uniform outsider in-neighbor
    RS_DU,  ///< direct, uniform
    RS_DW,  ///< direct, proportional to priority
    RS_SU,  ///< staged, uniform
    RS_SW,  ///< staged, proportional to priority
};

inline constexpr Strategy kAllStrategies[] = {Strategy::MAS,   Strategy::RI_MAS, Strategy::RO,
                                              Strategy::RI_RO, Strategy::RS_DU,  Strategy::RS_DW,
                                              Strategy::RS_SU, Strategy::RS_SW};

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

enum class TieBreak : std::uint8_t {
    Discovery, ///< earliest discovery timestep, then smallest id
    Random,    ///< seeded random order, for sensitivity studies
};

struct SamplerOptions {
    std::uint64_t rng_seed = 0;
    TieBreak tie_break = TieBreak::Discovery;
};

struct TraceStep {
    std::size_t timestep = 0;
    NodeId node{};
    double priority = 0;  ///< priority when selected
    double boundary = 0;  ///< boundary after the node's in-edges were revealed
    std::size_t new_nodes = 0;
    std::size_t new_edges = 0;
    std::size_t insiders = 0;
};

enum class StopReason : std::uint8_t { Budget, FrontierExhausted };
std::string_view to_string(StopReason r);

struct SampleTrace {
    std::vector<NodeId> seeds;
    double initial_boundary = 0;
    std::vector<TraceStep> steps;
    StopReason reason = StopReason::Budget;

    std::size_t final_insiders() const noexcept { return seeds.size() + steps.size(); }
    /// Seeds followed by selected nodes.
    std::vector<NodeId> inclusion_order() const;
};

/// CSV `timestep,node_ext_id,priority,boundary,new_nodes,new_edges`.
void write_trace_csv(std::ostream& out, const SampleTrace& trace, const IdTable& ids);

struct Budget {
    std::optional<std::size_t> max_steps;
    std::optional<std::size_t> target_insiders;

    static Budget steps(std::size_t n) { return {n, std::nullopt}; }
    static Budget insiders(std::size_t n) { return {std::nullopt, n}; }
};

class TightSampler {
public:
    /// Queries every seed once (in the given order, duplicates dropped) and
    /// builds the initial frontier. Throws NodeNotDiscoverable naming an
    /// unresolvable seed and ConfigError on an empty seed set.
    TightSampler(GraphOracle& oracle, std::span<const NodeId> seeds, EdgeWeighting weighting,
                 SamplerOptions options = {});

    /// Moves one outsider inside. Throws FrontierExhausted when none is left.
    NodeId step(Strategy strategy);

    /// Steps until the budget is reached or the frontier runs out.
    const SampleTrace& run(Strategy strategy, Budget budget);

    const DiscoveredGraph& graph() const noexcept { return graph_; }
    const SampleTrace& trace() const noexcept { return trace_; }
    std::size_t timestep() const noexcept { return trace_.steps.size(); }
    double boundary() const noexcept { return scale_ * boundary_; }
    double priority(NodeId v) const noexcept;
    std::span<const NodeId> insiders() const noexcept { return insiders_; }
    std::span<const NodeId> outsiders() const noexcept { return outsiders_.items(); }
    const EdgeWeighting& weighting() const noexcept { return weighting_; }

    struct Audit {
        double max_priority_error = 0;
        double boundary_error = 0;
        bool frontier_consistent = true; ///< outsider set == N-(S) \ S
        bool staged_index_consistent = true;

        bool ok(double tolerance) const {
            return frontier_consistent && staged_index_consistent &&
                   max_priority_error <= tolerance && boundary_error <= tolerance;
        }
    };
    /// Recomputes priorities, boundary and frontier from the discovered graph
    /// and compares them with the incrementally maintained values.
    Audit audit() const;

private:
    class IndexedSet {
    public:
        void insert(NodeId v);
        void erase(NodeId v);
        bool contains(NodeId v) const noexcept;
        bool empty() const noexcept { return items_.empty(); }
        std::size_t size() const noexcept { return items_.size(); }
        NodeId at(std::size_t i) const { return items_[i]; }
        std::span<const NodeId> items() const noexcept { return items_; }

    private:
        std::vector<NodeId> items_;
        std::vector<std::int64_t> pos_;
    };

    class Fenwick {
    public:
        std::size_t append(double value);
        void add(std::size_t slot, double delta);
        double value(std::size_t slot) const { return values_[slot]; }
        double total() const;
        /// Smallest slot whose inclusive prefix sum exceeds `u`.
        std::size_t find(double u) const;
        std::size_t size() const noexcept { return values_.size(); }

    private:
        double prefix(std::size_t count) const;
        std::vector<double> tree_{0.0};
        std::vector<double> values_;
    };

    struct HeapEntry {
        double priority;
        std::uint64_t key;
        NodeId node;
    };
    struct HeapOrder {
        bool operator()(const HeapEntry& a, const HeapEntry& b) const noexcept;
    };

    void grow(NodeId v);
    void include(NodeId v);
    std::size_t reveal(NodeId v, std::size_t timestep, std::size_t& new_nodes);
    bool better(NodeId a, NodeId b) const noexcept;

    NodeId select(Strategy strategy);
    NodeId select_max_priority();
    NodeId select_weighted_direct();
    std::size_t pick_uniform(std::size_t n);
    std::vector<NodeId> staged_candidates();

    GraphOracle& oracle_;
    EdgeWeighting weighting_;
    // Priorities and the boundary accumulate unscaled weights so selections
    // do not depend on the global scale; reported values are multiplied back.
    EdgeWeighting base_;
    double scale_ = 1.0;
    SamplerOptions options_;
    std::mt19937_64 rng_;

    DiscoveredGraph graph_;
    std::vector<double> priority_;
    std::vector<std::uint64_t> tie_key_;
    std::vector<std::uint32_t> outsider_in_count_;
    std::vector<std::int64_t> slot_;
    std::vector<NodeId> insiders_;
    IndexedSet outsiders_;
    IndexedSet staged_; ///< insiders with at least one outsider in-neighbor
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapOrder> heap_;
    Fenwick fenwick_;
    std::vector<NodeId> slot_node_;
    double boundary_ = 0;
    SampleTrace trace_;
};

} // namespace snowball
