#pragma once

#include <cstdint>
#include <span>

#include "hydrosig/series.hpp"

namespace hydrosig {

// Feature values are NaN when the feature is undefined for the input.

struct AcfFeatures {
    double x_acf1, ac_9, x_acf10;
    double diff1_acf1, diff1_acf10;
    double diff2_acf1, diff2_acf10;
    double seas_acf1;
    double firstzero_ac, firstmin_ac;
};

struct PacfFeatures {
    double x_pacf5, diff1x_pacf5, diff2x_pacf5, seas_pacf;
};

/// ACF family on the original and the once/twice differenced series.
[[nodiscard]] AcfFeatures acf_suite(const TimeSeries& ts);

/// Sums of the first five squared partial autocorrelations plus the
/// partial autocorrelation at the seasonal lag.
[[nodiscard]] PacfFeatures pacf_suite(const TimeSeries& ts);

/// Share of lag-tau embedding pairs (z_t, z_{t+tau}) strictly inside the
/// circle of squared radius `boundary`; tau is the first ACF zero crossing.
[[nodiscard]] double embed2_incircle(std::span<const double> x, double boundary);

/// Mean cubed lag-1 increment of the z-scored series.
[[nodiscard]] double trev_num(std::span<const double> x);

/// Shannon entropy (nats) of overlapping 3-letter words in the series
/// binarized at its mean.
[[nodiscard]] double motiftwo_entro3(std::span<const double> x);

/// Fraction of steps at which a walker closing 10% of its gap to the
/// z-scored series per step crosses it.
[[nodiscard]] double walker_propcross(std::span<const double> x);

enum class LocalPredictor {
    Mean1,  // previous value
    Lfit3,  // least-squares line through the previous three values, extrapolated one step
};

/// First zero crossing of the ACF of one-step local-prediction residuals.
[[nodiscard]] double localsimple_tau(std::span<const double> x, LocalPredictor mode);

enum class SegmentRule {
    Fixed50,  // segments of 50 points
    Ac2,      // segments of twice the first ACF zero crossing
};

inline constexpr std::size_t kSpreadSegments = 100;

/// Mean first ACF zero crossing over 100 random contiguous segments.
/// Deterministic in (x, rule, seed). Throws SegmentTooLong.
[[nodiscard]] double spreadrandomlocal(std::span<const double> x, SegmentRule rule, std::uint64_t seed);

}  // namespace hydrosig
