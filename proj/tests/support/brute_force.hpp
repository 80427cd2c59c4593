#pragma once

// Slow, obviously-correct reference implementations used as test oracles.

#include "snowball/ids.hpp"
#include "snowball/metrics.hpp"
#include "snowball/oracle.hpp"
#include "snowball/weighting.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace snowball::testing {

using EdgePairs = std::vector<std::pair<std::uint32_t, std::uint32_t>>;
using Matrix = std::vector<std::vector<bool>>;

Matrix adjacency(std::size_t n, const EdgePairs& edges);

/// Directed G(n, p) without self-loops.
EdgePairs random_digraph(std::size_t n, double p, std::mt19937_64& rng);

/// Triad enumeration over the adjacency matrix.
std::vector<double> local_cc_brute(const Matrix& a);
/// Triangles and connected triplets counted over all node triples.
double global_cc_brute(const Matrix& a);

struct FloydResult {
    double average = 0;
    std::uint64_t reachable = 0;
};
FloydResult floyd_warshall(const Matrix& a);

/// MAS recomputed from scratch at every step: priorities are summed over all
/// known outsider->insider edges; ties go to the earliest discovery step, then
/// the smallest id. Reads the backend directly.
std::vector<NodeId> reference_mas(const OracleBackend& backend, std::span<const NodeId> seeds,
                                  const EdgeWeighting& weighting, std::size_t steps);

/// Random directed graph served as an oracle with dyadic per-edge weights
/// (events carrying patterns whose omega_star values are powers of two).
struct WeightedInstance {
    std::shared_ptr<IndexedBackend> backend;
    EdgeWeighting weighting;
    std::vector<NodeId> seeds;
};
WeightedInstance random_weighted_instance(std::size_t n, double p, std::size_t n_seeds,
                                          std::uint64_t seed);

} // namespace snowball::testing
