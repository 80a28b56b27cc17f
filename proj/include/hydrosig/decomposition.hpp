#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hydrosig/series.hpp"

namespace hydrosig {

enum class DecompositionMethod { Classical, Stl };

/// Additive split x_t = seasonal_t + trend_t + remainder_t, all full length.
struct Decomposition {
    std::vector<double> seasonal;
    std::vector<double> trend;
    std::vector<double> remainder;
    DecompositionMethod method = DecompositionMethod::Classical;
};

/// Centered moving-average trend (2 x period for even periods), per-phase
/// mean seasonal re-centred to zero sum. The trend is undefined within
/// period/2 of either end; those points repeat the nearest defined value.
[[nodiscard]] Decomposition classical_additive(const TimeSeries& ts);

struct StlOptions {
    std::size_t seasonal_window = 13;
    std::size_t trend_window = 0;    // 0: smallest odd >= 1.5 p / (1 - 1.5 / seasonal_window)
    std::size_t lowpass_window = 0;  // 0: smallest odd >= p
    int seasonal_degree = 1;
    int trend_degree = 1;
    int lowpass_degree = 1;
    int inner_iterations = 2;
    int outer_iterations = 0;  // robustness iterations; 0 disables them

    /// Fills the derived windows for `period` and checks they are odd and >= 3.
    [[nodiscard]] StlOptions resolved(int period) const;
    [[nodiscard]] std::string describe() const;
};

/// Seasonal-trend decomposition by loess.
[[nodiscard]] Decomposition stl(const TimeSeries& ts, const StlOptions& opts = {});

}  // namespace hydrosig
