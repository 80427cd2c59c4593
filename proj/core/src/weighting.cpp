#include "snowball/weighting.hpp"

#include "snowball/error.hpp"

#include <array>
#include <atomic>
#include <spdlog/spdlog.h>

namespace snowball {

struct EdgeWeighting::Warned {
    std::array<std::atomic<bool>, 16> seen{};
};

EdgeWeighting::EdgeWeighting() = default;

EdgeWeighting EdgeWeighting::from_table(WeightTable table, std::string label) {
    if (table.omega_star.empty()) throw DataError("weight table is empty");
    for (const auto& [code, w] : table.omega_star) {
        if (!(w > 0)) {
            throw DataError("weight table has a non-positive weight for pattern " +
                            pattern_label(table.scheme, code));
        }
    }
    EdgeWeighting w;
    w.fallback_ = table.max_weight();
    w.table_ = std::make_shared<const WeightTable>(std::move(table));
    w.warned_ = std::make_shared<Warned>();
    w.label_ = std::move(label);
    return w;
}

EdgeWeighting EdgeWeighting::scaled(double factor) const {
    if (!(factor > 0)) throw ConfigError("weight scale must be positive");
    EdgeWeighting w = *this;
    w.scale_ *= factor;
    return w;
}

EdgeWeighting EdgeWeighting::unscaled() const {
    EdgeWeighting w = *this;
    w.scale_ = 1.0;
    return w;
}

double EdgeWeighting::operator()(const Event& event) const {
    if (!table_ || !event.pattern) return scale_;
    const unsigned code = scheme_code(table_->scheme, *event.pattern);
    if (auto w = table_->lookup(code)) return scale_ * *w;
    if (!warned_->seen[code].exchange(true)) {
        spdlog::warn("pattern {} is not in the weight table; using the largest weight {}",
                     pattern_label(table_->scheme, code), fallback_);
    }
    return scale_ * fallback_;
}

double EdgeWeighting::total(std::span<const Event> events) const {
    double sum = 0;
    for (const auto& e : events) sum += (*this)(e);
    return sum;
}

} // namespace snowball
