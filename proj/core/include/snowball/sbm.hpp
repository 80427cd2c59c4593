#pragma once

// Planted-partition test networks. Block probabilities are chosen so every
// block has intra-block mean degree k_intra and intra/inter edge ratio r:
//
//   rho_ii   = k_intra / (n_i - 1)
//   rho_i*   = k_intra / (2 r (n - n_i))
//   rho_ij   = (rho_i* + rho_j*) / 2        (i != j, symmetrized)

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace snowball::sbm {

struct BlockModelConfig {
    std::vector<std::uint32_t> block_sizes;
    double k_intra = 10.0;
    double r = 1.0;
    std::uint64_t rng_seed = 0;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

struct BlockMatrix {
    std::vector<std::vector<double>> rho;

    std::size_t blocks() const noexcept { return rho.size(); }
};

/// Throws ConfigError("infeasible configuration ...") when k_intra >= n_i or
/// any probability exceeds 1.
BlockMatrix derive_block_matrix(const BlockModelConfig& cfg);

/// Default intra/inter ratios: 1/(b-1), 0.5, 1, 2, 4, 8.
std::vector<double> default_r_sweep(std::size_t blocks);

struct Graph {
    std::size_t n = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges; ///< u < v, simple
    std::vector<std::uint32_t> labels;                          ///< block per node

    std::vector<std::uint32_t> degrees() const;
};

/// Each unordered pair {u, v} is an edge independently with probability
/// rho[block(u)][block(v)]. Nodes are numbered block by block. Deterministic
/// for a given seed.
Graph generate(const BlockMatrix& matrix, const std::vector<std::uint32_t>& sizes,
               std::uint64_t rng_seed);

enum class SeedSelection : std::uint8_t { UniformRandom, LowDegree, HighDegree };

struct SeedConfig {
    std::vector<std::uint32_t> per_block_counts;
    SeedSelection selection = SeedSelection::UniformRandom;
    std::uint64_t rng_seed = 0;
};

/// Parses "[i]*j" (i seeds in each of the first j blocks, zero elsewhere) or
/// a comma-separated list of per-block counts.
std::vector<std::uint32_t> parse_seed_counts(const std::string& spec, std::size_t blocks);
SeedSelection parse_selection(const std::string& name);

/// Seed node indices in ascending order. Degree extremes break ties by node id.
std::vector<std::uint32_t> select_seeds(const std::vector<std::uint32_t>& labels,
                                        const SeedConfig& cfg,
                                        const std::vector<std::uint32_t>& degrees);

/// Edge list TSV (`u \t v`, one line per undirected edge) and labels CSV `node,block`.
void write_edge_list(std::ostream& out, const Graph& g);
void write_labels(std::ostream& out, const Graph& g);

/// Key-value config (`key = value`, '#' comments) with keys block_sizes,
/// k_intra, r, rng_seed, and optionally seeds, selection, seed_rng.
struct ConfigFile {
    BlockModelConfig model;
    std::optional<SeedConfig> seeds;
};
ConfigFile read_config(std::istream& in);
ConfigFile read_config_file(const std::string& path);

} // namespace snowball::sbm
