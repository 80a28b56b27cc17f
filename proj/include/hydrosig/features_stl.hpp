#pragma once

#include "hydrosig/decomposition.hpp"
#include "hydrosig/series.hpp"

namespace hydrosig {

struct StlFeatures {
    double trend, spike, linearity, curvature;
    double e_acf1, e_acf10;
    double seasonal_strength;
    double peak, trough;  // cycle positions 1..period
};

/// Strength, shape and remainder-dependence measures of an STL split of the
/// z-scored series. Peak and trough positions follow the calendar phase
/// given by ts.start_month.
[[nodiscard]] StlFeatures stl_feature_suite(const TimeSeries& ts, const StlOptions& opts = {});

/// Same measures from an existing decomposition of `x`.
[[nodiscard]] StlFeatures stl_features_from(std::span<const double> x, const Decomposition& d, int period,
                                            int start_month = 1);

}  // namespace hydrosig
