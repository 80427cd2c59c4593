#include "snowball/sbm.hpp"

#include "snowball/error.hpp"
#include "snowball/text.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <regex>

namespace snowball::sbm {

void BlockModelConfig::validate() const {
    if (block_sizes.size() < 2) throw ConfigError("block_sizes: need at least two blocks");
    for (std::size_t i = 0; i < block_sizes.size(); ++i) {
        if (block_sizes[i] < 2) {
            throw ConfigError(fmt::format("block_sizes[{}]: each block needs >= 2 nodes", i));
        }
    }
    if (!(k_intra > 0) || !std::isfinite(k_intra)) throw ConfigError("k_intra: must be positive");
    if (!(r > 0) || !std::isfinite(r)) throw ConfigError("r: must be positive");
}

BlockMatrix derive_block_matrix(const BlockModelConfig& cfg) {
    cfg.validate();
    const auto& sizes = cfg.block_sizes;
    const std::size_t b = sizes.size();
    const double n = std::accumulate(sizes.begin(), sizes.end(), 0.0);

    std::vector<double> outward(b);
    BlockMatrix m{std::vector<std::vector<double>>(b, std::vector<double>(b, 0.0))};
    for (std::size_t i = 0; i < b; ++i) {
        const double ni = sizes[i];
        if (cfg.k_intra >= ni) {
            throw ConfigError(fmt::format(
                "infeasible configuration: k_intra {} >= size {} of block {}", cfg.k_intra, ni, i));
        }
        m.rho[i][i] = cfg.k_intra / (ni - 1.0);
        outward[i] = cfg.k_intra / (2.0 * cfg.r * (n - ni));
    }
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < b; ++j) {
            if (i != j) m.rho[i][j] = (outward[i] + outward[j]) / 2.0;
        }
    }
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < b; ++j) {
            if (m.rho[i][j] > 1.0) {
                throw ConfigError(fmt::format(
                    "infeasible configuration: rho[{}][{}] = {} exceeds 1", i, j, m.rho[i][j]));
            }
        }
    }
    return m;
}

std::vector<double> default_r_sweep(std::size_t blocks) {
    if (blocks < 2) throw ConfigError("r sweep needs at least two blocks");
    return {1.0 / static_cast<double>(blocks - 1), 0.5, 1.0, 2.0, 4.0, 8.0};
}

std::vector<std::uint32_t> Graph::degrees() const {
    std::vector<std::uint32_t> d(n, 0);
    for (auto [u, v] : edges) {
        ++d[u];
        ++d[v];
    }
    return d;
}

namespace {

// Number of failures before the next success of a Bernoulli(p) sequence.
class GapSampler {
public:
    GapSampler(std::mt19937_64& rng, double p) : rng_(rng), p_(p) {
        if (p > 0 && p < 1) log_q_ = std::log1p(-p);
    }

    bool never() const { return p_ <= 0; }

    std::uint64_t next() {
        if (p_ >= 1) return 0;
        // uniform in (0, 1]
        const double u = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
        const double gap = std::floor(std::log(u) / log_q_);
        return gap >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max()
                             : static_cast<std::uint64_t>(gap);
    }

private:
    std::mt19937_64& rng_;
    double p_;
    double log_q_ = 0;
};

} // namespace

Graph generate(const BlockMatrix& matrix, const std::vector<std::uint32_t>& sizes,
               std::uint64_t rng_seed) {
    if (matrix.blocks() != sizes.size()) {
        throw ConfigError("generate: block matrix and sizes disagree");
    }
    const std::size_t b = sizes.size();
    Graph g;
    std::vector<std::uint64_t> offset(b + 1, 0);
    for (std::size_t i = 0; i < b; ++i) offset[i + 1] = offset[i] + sizes[i];
    g.n = offset[b];
    g.labels.resize(g.n);
    for (std::size_t i = 0; i < b; ++i) {
        std::fill(g.labels.begin() + static_cast<std::ptrdiff_t>(offset[i]),
                  g.labels.begin() + static_cast<std::ptrdiff_t>(offset[i + 1]),
                  static_cast<std::uint32_t>(i));
    }

    std::mt19937_64 rng(rng_seed);
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = i; j < b; ++j) {
            GapSampler gaps(rng, matrix.rho[i][j]);
            if (gaps.never()) continue;
            const std::uint64_t ni = sizes[i], nj = sizes[j];
            // Pairs are enumerated by a linear index; within a block pair k
            // maps to the k-th (row, col) with col < row.
            const std::uint64_t total = i == j ? ni * (ni - 1) / 2 : ni * nj;
            std::uint64_t k = 0;
            std::uint64_t row = 1, row_start = 0; // within-block cursor
            for (;;) {
                const std::uint64_t gap = gaps.next();
                if (gap >= total - k) break;
                k += gap;
                if (i == j) {
                    while (k >= row_start + row) {
                        row_start += row;
                        ++row;
                    }
                    const std::uint64_t col = k - row_start;
                    g.edges.emplace_back(static_cast<std::uint32_t>(offset[i] + col),
                                         static_cast<std::uint32_t>(offset[i] + row));
                } else {
                    g.edges.emplace_back(static_cast<std::uint32_t>(offset[i] + k / nj),
                                         static_cast<std::uint32_t>(offset[j] + k % nj));
                }
                ++k;
                if (k >= total) break;
            }
        }
    }
    return g;
}

std::vector<std::uint32_t> parse_seed_counts(const std::string& spec, std::size_t blocks) {
    static const std::regex bracket(R"(\s*\[\s*(\d+)\s*\]\s*\*\s*(\d+)\s*)");
    std::smatch m;
    std::vector<std::uint32_t> counts(blocks, 0);
    if (std::regex_match(spec, m, bracket)) {
        const auto each = std::stoul(m[1].str());
        const auto nblocks = std::stoul(m[2].str());
        if (nblocks > blocks) {
            throw ConfigError(fmt::format("seeds: '{}' names {} blocks but the model has {}", spec,
                                          nblocks, blocks));
        }
        for (std::size_t i = 0; i < nblocks; ++i) counts[i] = static_cast<std::uint32_t>(each);
        return counts;
    }
    const auto fields = text::split_fields(spec, ',');
    if (fields.size() != blocks) {
        throw ConfigError(fmt::format("seeds: '{}' must be [i]*j or {} comma-separated counts",
                                      spec, blocks));
    }
    for (std::size_t i = 0; i < blocks; ++i) {
        const auto v = text::parse_int(fields[i]);
        if (!v || *v < 0) throw ConfigError(fmt::format("seeds: bad count '{}'", fields[i]));
        counts[i] = static_cast<std::uint32_t>(*v);
    }
    return counts;
}

SeedSelection parse_selection(const std::string& name) {
    if (name == "uniform" || name == "uniform-random" || name == "random") {
        return SeedSelection::UniformRandom;
    }
    if (name == "low-degree" || name == "low") return SeedSelection::LowDegree;
    if (name == "high-degree" || name == "high") return SeedSelection::HighDegree;
    throw ConfigError("selection: expected uniform, low-degree or high-degree, got '" + name + "'");
}

std::vector<std::uint32_t> select_seeds(const std::vector<std::uint32_t>& labels,
                                        const SeedConfig& cfg,
                                        const std::vector<std::uint32_t>& degrees) {
    if (degrees.size() != labels.size()) {
        throw ConfigError("select_seeds: degrees and labels disagree in length");
    }
    const std::size_t b = cfg.per_block_counts.size();
    std::vector<std::vector<std::uint32_t>> members(b);
    for (std::uint32_t v = 0; v < labels.size(); ++v) {
        if (labels[v] >= b) {
            throw ConfigError(fmt::format("select_seeds: node {} has block {} but only {} counts",
                                          v, labels[v], b));
        }
        members[labels[v]].push_back(v);
    }
    std::size_t requested = 0;
    for (std::size_t i = 0; i < b; ++i) {
        if (cfg.per_block_counts[i] > members[i].size()) {
            throw ConfigError(fmt::format("seeds: block {} has {} nodes, {} seeds requested", i,
                                          members[i].size(), cfg.per_block_counts[i]));
        }
        requested += cfg.per_block_counts[i];
    }
    if (requested == 0) throw ConfigError("no seeds");

    std::mt19937_64 rng(cfg.rng_seed);
    std::vector<std::uint32_t> seeds;
    for (std::size_t i = 0; i < b; ++i) {
        auto& pool = members[i];
        const std::size_t want = cfg.per_block_counts[i];
        switch (cfg.selection) {
        case SeedSelection::UniformRandom:
            for (std::size_t k = 0; k < want; ++k) {
                std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
                std::swap(pool[k], pool[pick(rng)]);
            }
            break;
        case SeedSelection::LowDegree:
            std::stable_sort(pool.begin(), pool.end(), [&](auto a, auto c) {
                return degrees[a] < degrees[c];
            });
            break;
        case SeedSelection::HighDegree:
            std::stable_sort(pool.begin(), pool.end(), [&](auto a, auto c) {
                return degrees[a] > degrees[c];
            });
            break;
        }
        seeds.insert(seeds.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want));
    }
    std::sort(seeds.begin(), seeds.end());
    return seeds;
}

void write_edge_list(std::ostream& out, const Graph& g) {
    for (auto [u, v] : g.edges) out << u << '\t' << v << '\n';
}

void write_labels(std::ostream& out, const Graph& g) {
    out << "node,block\n";
    for (std::size_t v = 0; v < g.n; ++v) out << v << ',' << g.labels[v] << '\n';
}

ConfigFile read_config(std::istream& in) {
    ConfigFile cfg;
    std::optional<std::string> seeds_spec;
    std::string selection = "uniform";
    std::optional<std::uint64_t> seed_rng;
    bool have_sizes = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto content = text::trim(std::string_view(line).substr(0, line.find('#')));
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(fmt::format("config line {}: expected key = value", line_no));
        }
        const std::string key(text::trim(content.substr(0, eq)));
        const std::string value(text::trim(content.substr(eq + 1)));
        auto number = [&](const char* field) {
            auto v = text::parse_double(value);
            if (!v) throw ConfigError(fmt::format("{}: not a number '{}'", field, value));
            return *v;
        };
        auto integer = [&](const char* field) {
            auto v = text::parse_int(value);
            if (!v || *v < 0) throw ConfigError(fmt::format("{}: not an integer '{}'", field, value));
            return static_cast<std::uint64_t>(*v);
        };
        if (key == "block_sizes") {
            cfg.model.block_sizes.clear();
            for (const auto& f : text::split_fields(value, ',')) {
                auto v = text::parse_int(f);
                if (!v || *v <= 0) throw ConfigError("block_sizes: bad size '" + f + "'");
                cfg.model.block_sizes.push_back(static_cast<std::uint32_t>(*v));
            }
            have_sizes = true;
        } else if (key == "k_intra") {
            cfg.model.k_intra = number("k_intra");
        } else if (key == "r") {
            cfg.model.r = number("r");
        } else if (key == "rng_seed") {
            cfg.model.rng_seed = integer("rng_seed");
        } else if (key == "seeds") {
            seeds_spec = value;
        } else if (key == "selection") {
            selection = value;
        } else if (key == "seed_rng") {
            seed_rng = integer("seed_rng");
        } else {
            throw ConfigError(fmt::format("config line {}: unknown key '{}'", line_no, key));
        }
    }
    if (!have_sizes) throw ConfigError("block_sizes: missing");
    cfg.model.validate();
    if (seeds_spec) {
        SeedConfig s;
        s.per_block_counts = parse_seed_counts(*seeds_spec, cfg.model.block_sizes.size());
        s.selection = parse_selection(selection);
        s.rng_seed = seed_rng.value_or(cfg.model.rng_seed);
        cfg.seeds = s;
    }
    return cfg;
}

ConfigFile read_config_file(const std::string& path) {
    auto in = text::open_input(path);
    return read_config(in);
}

} // namespace snowball::sbm
