#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hydrosig/error.hpp"

namespace hydrosig {

/// One station's complete, gap-free seasonal record.
struct TimeSeries {
    std::string id;
    std::vector<double> values;
    int period = 12;
    int start_year = 0;
    int start_month = 1;  // 1..12 for monthly data

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }

    /// Throws Error(InvalidSeries) when the series is shorter than two
    /// cycles, has period < 2, or holds a non-finite value.
    void validate() const;
};

/// Sample autocorrelations and partial autocorrelations at lags 1..max_lag.
/// Index 0 of each vector holds lag 1.
struct CorrelationSpectrum {
    std::vector<double> acf;
    std::vector<double> pacf;

    [[nodiscard]] std::size_t max_lag() const noexcept { return acf.size(); }
};

// Basic moments. Variance and sd use the n-1 divisor.
[[nodiscard]] double mean(std::span<const double> x);
[[nodiscard]] double variance(std::span<const double> x);
[[nodiscard]] double stddev(std::span<const double> x);
[[nodiscard]] double median(std::vector<double> x);

/// True when the spread of x is indistinguishable from rounding noise
/// relative to `scale` (default: max |x|). Constant inputs are degenerate.
[[nodiscard]] bool is_degenerate(std::span<const double> x, double scale = -1.0);

/// min(n-1, floor(10 log10 n)).
[[nodiscard]] std::size_t default_max_lag(std::size_t n);

/// Biased (divisor n) sample ACF r_1..r_max_lag.
/// Throws ZeroVariance for constant input and LagTooLarge when max_lag >= n.
[[nodiscard]] std::vector<double> sample_acf(std::span<const double> x, std::size_t max_lag);

/// Durbin-Levinson recursion over an ACF vector (lag 1 first).
/// Throws DegeneratePacf if a coefficient leaves [-1, 1] beyond rounding.
[[nodiscard]] std::vector<double> pacf_from_acf(std::span<const double> acf);

/// PACF phi_11..phi_LL of x. Requires max_lag < n/2.
[[nodiscard]] std::vector<double> sample_pacf(std::span<const double> x, std::size_t max_lag);

[[nodiscard]] CorrelationSpectrum correlation_spectrum(std::span<const double> x, std::size_t max_lag);

/// order-th difference; the result is shorter by `order`.
[[nodiscard]] std::vector<double> difference(std::span<const double> x, int order);
[[nodiscard]] TimeSeries difference(const TimeSeries& ts, int order);

/// Mean 0, sd 1 (divisor n-1). Throws ZeroVariance.
[[nodiscard]] std::vector<double> zscore(std::span<const double> x);
[[nodiscard]] TimeSeries zscore(const TimeSeries& ts);

/// Smallest lag k with r_k <= 0, or the last lag when the ACF never crosses.
[[nodiscard]] std::size_t first_zero_crossing(std::span<const double> acf);

/// Smallest lag k with r_{k-1} > r_k < r_{k+1} (r_0 = 1), saturating at the
/// last lag.
[[nodiscard]] std::size_t first_local_min(std::span<const double> acf);

}  // namespace hydrosig
