#include "snowball/interaction.hpp"

#include "snowball/error.hpp"
#include "snowball/text.hpp"

#include <cmath>
#include <fmt/format.h>
#include <istream>
#include <ostream>
#include <set>

namespace snowball {

namespace {

void add_to_row(PatternCounts::Row& row, unsigned code, bool nested) {
    ++row.events;
    if (!nested) {
        ++row.counts[code];
        return;
    }
    // every non-empty subset of `code`
    for (unsigned sub = code; sub != 0; sub = (sub - 1) & code) {
        ++row.counts[sub];
    }
}

PatternCounts::Row& row_at(std::vector<PatternCounts::Row>& rows, NodeId id) {
    if (index_of(id) >= rows.size()) rows.resize(index_of(id) + 1);
    return rows[index_of(id)];
}

FrequencyTable entity_average(const std::vector<PatternCounts::Row>& rows, CountingScheme scheme,
                              FrequencyKind kind, const char* what) {
    const unsigned n_codes = pattern_count(scheme);
    std::vector<double> sums(n_codes + 1, 0.0);
    std::size_t engaged = 0;
    for (const auto& row : rows) {
        if (row.events == 0) continue;
        ++engaged;
        const auto denom = static_cast<double>(row.events);
        for (unsigned code = 1; code <= n_codes; ++code) {
            sums[code] += static_cast<double>(row.counts[code]) / denom;
        }
    }
    if (engaged == 0) throw DataError(fmt::format("no {} with engagement", what));
    FrequencyTable table{scheme, kind, {}};
    for (unsigned code = 1; code <= n_codes; ++code) {
        table.values[code] = 100.0 * sums[code] / static_cast<double>(engaged);
    }
    return table;
}

std::string_view kind_name(FrequencyKind kind) {
    switch (kind) {
    case FrequencyKind::Global: return "global";
    case FrequencyKind::Source: return "source";
    case FrequencyKind::Target: return "target";
    case FrequencyKind::Balanced: return "balanced";
    }
    return "?";
}

} // namespace

PatternCounts count_events(std::span<const Engagement> events, CountingScheme scheme) {
    PatternCounts counts;
    counts.scheme = scheme;
    const bool nested = is_nested(scheme);
    PatternCounts::Row global;
    for (const auto& e : events) {
        const unsigned code = scheme_code(scheme, e.pattern);
        add_to_row(global, code, nested);
        add_to_row(row_at(counts.by_source, e.author), code, nested);
        add_to_row(row_at(counts.by_target, e.interactor), code, nested);
    }
    counts.global = global.counts;
    counts.total_events = global.events;
    return counts;
}

double FrequencyTable::at(unsigned code) const {
    auto it = values.find(code);
    return it == values.end() ? 0.0 : it->second;
}

double FrequencyTable::sum() const {
    double s = 0;
    for (const auto& [code, v] : values) s += v;
    return s;
}

FrequencyTable normalize_global(const PatternCounts& counts) {
    if (counts.total_events == 0) throw DataError("empty corpus");
    FrequencyTable table{counts.scheme, FrequencyKind::Global, {}};
    const auto n = static_cast<double>(counts.total_events);
    for (unsigned code = 1; code <= pattern_count(counts.scheme); ++code) {
        table.values[code] = 100.0 * static_cast<double>(counts.global[code]) / n;
    }
    return table;
}

FrequencyTable normalize_source(const PatternCounts& counts) {
    return entity_average(counts.by_source, counts.scheme, FrequencyKind::Source, "source");
}

FrequencyTable normalize_target(const PatternCounts& counts) {
    return entity_average(counts.by_target, counts.scheme, FrequencyKind::Target, "target");
}

FrequencyTable balance(const FrequencyTable& global, const FrequencyTable& source,
                       const FrequencyTable& target) {
    if (global.scheme != source.scheme || global.scheme != target.scheme) {
        throw DataError("balance: frequency tables use different counting schemes");
    }
    std::set<unsigned> support;
    for (const auto* t : {&global, &source, &target}) {
        for (const auto& [code, v] : t->values) {
            if (v < 0) throw DataError(fmt::format("balance: negative frequency in {} table",
                                                   kind_name(t->kind)));
            support.insert(code);
        }
    }
    for (const auto* t : {&global, &source, &target}) {
        if (t->values.size() != support.size()) {
            throw DataError("balance: frequency tables cover different patterns");
        }
    }
    // The objective is separable per pattern; each term is minimized by the
    // mean of the three values, which is non-negative whenever they are.
    FrequencyTable out{global.scheme, FrequencyKind::Balanced, {}};
    for (unsigned code : support) {
        const double g = global.at(code), s = source.at(code), t = target.at(code);
        if (g == 0 && s == 0 && t == 0) continue;
        out.values[code] = (g + s + t) / 3.0;
    }
    return out;
}

double balance_objective(const FrequencyTable& candidate, const FrequencyTable& global,
                         const FrequencyTable& source, const FrequencyTable& target) {
    double sse = 0;
    for (const auto& [code, v] : candidate.values) {
        for (const auto* t : {&global, &source, &target}) {
            const double d = v - t->at(code);
            sse += d * d;
        }
    }
    return sse;
}

std::optional<double> WeightTable::lookup(unsigned code) const {
    auto it = omega_star.find(code);
    if (it == omega_star.end()) return std::nullopt;
    return it->second;
}

double WeightTable::max_weight() const {
    double m = 0;
    for (const auto& [code, w] : omega_star) m = std::max(m, w);
    return m;
}

double round_half_away(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    // std::round already rounds halfway cases away from zero; the nudge
    // absorbs representation error such as 0.125 * 100 = 12.4999...
    const double scaled = value * scale;
    const double nudged = scaled + std::copysign(1e-9 * std::max(1.0, std::abs(scaled)), scaled);
    return std::round(nudged) / scale;
}

WeightTable weights_from(const FrequencyTable& balanced) {
    WeightTable table;
    table.scheme = balanced.scheme;
    for (const auto& [code, eta] : balanced.values) {
        if (!(eta > 0)) {
            throw DataError(fmt::format("unobserved pattern {}; exclude or supply prior",
                                        pattern_label(balanced.scheme, code)));
        }
        const double omega = 1.0 / eta;
        table.omega[code] = omega;
        table.omega_star[code] = round_half_away(omega, 2);
    }
    return table;
}

Calibration calibrate(const PatternCounts& counts) {
    Calibration cal;
    cal.global = normalize_global(counts);
    cal.source = normalize_source(counts);
    cal.target = normalize_target(counts);
    cal.balanced = balance(cal.global, cal.source, cal.target);
    cal.weights = weights_from(cal.balanced);
    return cal;
}

void write_calibration_csv(std::ostream& out, const Calibration& cal) {
    out << "scheme,pattern,eta_global,eta_source,eta_target,eta_star,omega,omega_star\n";
    const auto scheme = cal.weights.scheme;
    for (const auto& [code, eta_star] : cal.balanced.values) {
        auto omega = cal.weights.omega.find(code);
        auto omega_star = cal.weights.omega_star.find(code);
        if (omega == cal.weights.omega.end() || omega_star == cal.weights.omega_star.end()) {
            continue;
        }
        out << to_string(scheme) << ',' << pattern_label(scheme, code) << ','
            << text::format_double(cal.global.at(code)) << ','
            << text::format_double(cal.source.at(code)) << ','
            << text::format_double(cal.target.at(code)) << ','
            << text::format_double(eta_star) << ',' << text::format_double(omega->second) << ','
            << text::format_double(omega_star->second) << '\n';
    }
}

Calibration read_calibration_csv(std::istream& in) {
    static constexpr std::string_view kHeader =
        "scheme,pattern,eta_global,eta_source,eta_target,eta_star,omega,omega_star";
    std::string line;
    if (!std::getline(in, line) || text::trim(line) != kHeader) {
        throw DataError("weight table: missing or unexpected header");
    }
    Calibration cal;
    std::optional<CountingScheme> scheme;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto fields = text::split_fields(line, ',');
        if (fields.size() != 8) {
            throw DataError(fmt::format("weight table line {}: expected 8 fields", line_no));
        }
        const auto row_scheme = parse_scheme(text::trim(fields[0]));
        if (!row_scheme) {
            throw DataError(fmt::format("weight table line {}: unknown scheme '{}'", line_no,
                                        fields[0]));
        }
        if (scheme && *scheme != *row_scheme) {
            throw DataError(fmt::format("weight table line {}: mixed schemes", line_no));
        }
        scheme = row_scheme;
        const auto code = parse_pattern_label(*scheme, text::trim(fields[1]));
        if (!code) {
            throw DataError(fmt::format("weight table line {}: bad pattern '{}'", line_no,
                                        fields[1]));
        }
        double v[6];
        for (int k = 0; k < 6; ++k) {
            const auto parsed = text::parse_double(fields[2 + k]);
            if (!parsed || *parsed < 0) {
                throw DataError(fmt::format("weight table line {}: bad number '{}'", line_no,
                                            fields[2 + k]));
            }
            v[k] = *parsed;
        }
        cal.global.values[*code] = v[0];
        cal.source.values[*code] = v[1];
        cal.target.values[*code] = v[2];
        cal.balanced.values[*code] = v[3];
        cal.weights.omega[*code] = v[4];
        cal.weights.omega_star[*code] = v[5];
    }
    if (!scheme) throw DataError("weight table: no rows");
    cal.global.scheme = cal.source.scheme = cal.target.scheme = cal.balanced.scheme = *scheme;
    cal.weights.scheme = *scheme;
    cal.global.kind = FrequencyKind::Global;
    cal.source.kind = FrequencyKind::Source;
    cal.target.kind = FrequencyKind::Target;
    cal.balanced.kind = FrequencyKind::Balanced;
    return cal;
}

Calibration read_calibration_file(const std::string& path) {
    auto in = text::open_input(path);
    return read_calibration_csv(in);
}

} // namespace snowball
