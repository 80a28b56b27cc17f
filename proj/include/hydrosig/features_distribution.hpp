#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "hydrosig/series.hpp"

namespace hydrosig {

/// Sample sd (n-1) of the first differences of the z-scored series.
[[nodiscard]] double std1st_der(std::span<const double> x);

/// Centre of the fullest of 10 equal-width bins over the z-scored range;
/// ties go to the lowest bin.
[[nodiscard]] double histogram_mode_10(std::span<const double> x);

/// Median over thresholds 0, 0.01, 0.02, ... of the relative median time
/// index of points with |z| >= threshold, centred so the output lies in
/// [-0.5, 0.5]. Thresholds stop once fewer than two points qualify.
[[nodiscard]] double outlierinclude_mdrmd(std::span<const double> x);

/// Number of side changes relative to the median (ties count as above).
[[nodiscard]] std::size_t crossing_points(std::span<const double> x);

/// Longest run of consecutive values inside one of 10 equal-width bins.
[[nodiscard]] std::size_t flat_spots(std::span<const double> x);

/// Matching template pair counts for sample entropy: `shorter` counts pairs
/// of length-m templates within Chebyshev radius r, `longer` the same pairs
/// extended to length m + 1. Both use the first n - m templates.
struct TemplateMatches {
    std::uint64_t shorter = 0;
    std::uint64_t longer = 0;
};

[[nodiscard]] TemplateMatches count_template_matches(std::span<const double> x, std::size_t m, double r);

/// Sample entropy with m = 2 and r = 0.3 on the z-scored series.
/// With no length-3 matches the value is capped at ln(B (B - 1)).
[[nodiscard]] double sampen_first(std::span<const double> x);

inline constexpr std::size_t kSpectralGrid = 500;

/// Normalized Shannon entropy of the AIC-selected Yule-Walker AR spectrum
/// on 500 frequencies in (0, pi]. 1 for a flat spectrum.
[[nodiscard]] double spectral_entropy(std::span<const double> x);

/// Fluctuation-analysis scales and root-mean-square residual ranges.
struct FluctuationProfile {
    std::vector<double> scales;
    std::vector<double> fluctuations;
};

[[nodiscard]] FluctuationProfile fluctuation_profile(std::span<const double> x);

/// Position (as a share of scales) of the best two-line split of
/// log F(tau) against log tau.
[[nodiscard]] double fluctanal_prop_r1(std::span<const double> x);

}  // namespace hydrosig
