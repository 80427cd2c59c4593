#pragma once

#include "snowball/interaction.hpp"
#include "snowball/pattern.hpp"

#include <memory>
#include <span>
#include <string>

namespace snowball {

/// Maps edge events to weights. The unit weighting gives every event weight 1,
/// so edge weight equals event count. A calibrated weighting looks up
/// omega_star of the event's pattern under the table's scheme; plain events
/// weigh 1, and patterns outside the table's domain use the largest calibrated
/// weight (a warning is logged once per pattern).
class EdgeWeighting {
public:
    EdgeWeighting();

    static EdgeWeighting unit() { return EdgeWeighting(); }
    static EdgeWeighting from_table(WeightTable table, std::string label = "table");

    /// Same weighting with every weight multiplied by `factor` (> 0).
    EdgeWeighting scaled(double factor) const;
    /// Same weighting with the scale reset to 1.
    EdgeWeighting unscaled() const;

    double operator()(const Event& event) const;
    double total(std::span<const Event> events) const;

    bool is_unit() const noexcept { return table_ == nullptr; }
    double scale() const noexcept { return scale_; }
    const WeightTable* table() const noexcept { return table_.get(); }
    /// Identifier recorded in run manifests.
    const std::string& label() const noexcept { return label_; }

private:
    struct Warned;

    std::shared_ptr<const WeightTable> table_;
    std::shared_ptr<Warned> warned_;
    std::string label_ = "unit";
    double scale_ = 1.0;
    double fallback_ = 1.0;
};

} // namespace snowball
