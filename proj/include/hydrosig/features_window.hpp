#pragma once

#include <cstddef>
#include <span>

namespace hydrosig {

struct TiledStats {
    double lumpiness;  // variance of the window variances
    double stability;  // variance of the window means
};

/// Non-overlapping windows of `width` over the z-scored series; the ragged
/// tail is dropped.
[[nodiscard]] TiledStats tiled_stats(std::span<const double> x, std::size_t width);

/// Largest level, variance and Gaussian-KL shifts between adjacent windows.
/// time_* are the 1-based offsets t where window [t-w+1, t] meets [t+1, t+w].
struct ShiftFeatures {
    double max_level_shift, time_level_shift;
    double max_var_shift, time_var_shift;
    double max_kl_shift, time_kl_shift;
};

[[nodiscard]] ShiftFeatures shift_suite(std::span<const double> x, std::size_t width);

/// KL(N(mean_a, var_a + 1e-8) || N(mean_b, var_b + 1e-8)).
[[nodiscard]] double gaussian_kl(double mean_a, double var_a, double mean_b, double var_b);

}  // namespace hydrosig
