#pragma once

// Calibration of per-pattern importance weights from an engagement corpus:
// count patterns under a counting scheme, normalize globally, per source and
// per target, balance the three by least squares, and invert.
//
// All frequencies are in percent units, so omega = 1 / eta_star reproduces
// the magnitudes of published weight tables (1 / 1.9137 = 0.5225).

#include "snowball/ids.hpp"
#include "snowball/pattern.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

namespace snowball {

/// A deduplicated (tweet, interactor) engagement with an author's tweet.
struct Engagement {
    NodeId author;     ///< source of information i
    NodeId interactor; ///< consumer j
    InteractionPattern pattern;
};

struct PatternCounts {
    struct Row {
        std::array<std::uint64_t, 16> counts{};
        std::uint64_t events = 0; ///< raw events, each counted once
    };

    CountingScheme scheme = CountingScheme::Distinct;
    std::uint64_t total_events = 0;      ///< N
    std::array<std::uint64_t, 16> global{}; ///< n(x), indexed by pattern code
    std::vector<Row> by_source;          ///< n(i, x), indexed by author id
    std::vector<Row> by_target;          ///< n(x, j), indexed by interactor id
};

/// Distinct: each event adds to its own pattern. Nested and AudienceFacing: to
/// every non-empty bitwise subset of its (collapsed) pattern.
PatternCounts count_events(std::span<const Engagement> events, CountingScheme scheme);

enum class FrequencyKind : std::uint8_t { Global, Source, Target, Balanced };

struct FrequencyTable {
    CountingScheme scheme = CountingScheme::Distinct;
    FrequencyKind kind = FrequencyKind::Global;
    std::map<unsigned, double> values; ///< pattern code -> percent

    double at(unsigned code) const;
    double sum() const;
};

/// eta(x) = 100 n(x) / N. Throws DataError("empty corpus") when N = 0.
FrequencyTable normalize_global(const PatternCounts& counts);
/// Unweighted mean over engaged sources of 100 n(i,x) / N(i).
FrequencyTable normalize_source(const PatternCounts& counts);
/// Unweighted mean over engaged interactors of 100 n(x,j) / N(j).
FrequencyTable normalize_target(const PatternCounts& counts);

/// Least-squares compromise of the three normalizations (their mean).
/// Patterns that are zero in all three inputs are dropped.
FrequencyTable balance(const FrequencyTable& global, const FrequencyTable& source,
                       const FrequencyTable& target);

/// Sum of squared deviations of `candidate` from the three tables; the
/// objective balance() minimizes.
double balance_objective(const FrequencyTable& candidate, const FrequencyTable& global,
                         const FrequencyTable& source, const FrequencyTable& target);

struct WeightTable {
    CountingScheme scheme = CountingScheme::Distinct;
    std::map<unsigned, double> omega;
    std::map<unsigned, double> omega_star;

    std::optional<double> lookup(unsigned code) const;
    double max_weight() const;
};

/// Half-away-from-zero rounding to `decimals` places.
double round_half_away(double value, int decimals);

/// omega = 1 / eta_star, omega_star = omega rounded to two decimals.
/// Throws DataError on a zero frequency inside the table's domain.
WeightTable weights_from(const FrequencyTable& balanced);

/// Everything the weight-table file carries.
struct Calibration {
    FrequencyTable global;
    FrequencyTable source;
    FrequencyTable target;
    FrequencyTable balanced;
    WeightTable weights;
};

Calibration calibrate(const PatternCounts& counts);

/// CSV with header scheme,pattern,eta_global,eta_source,eta_target,eta_star,omega,omega_star
void write_calibration_csv(std::ostream& out, const Calibration& cal);
/// Reads a weight-table file. Loaded values are authoritative; nothing is
/// re-derived. Throws DataError on malformed content.
Calibration read_calibration_csv(std::istream& in);
Calibration read_calibration_file(const std::string& path);

} // namespace snowball
