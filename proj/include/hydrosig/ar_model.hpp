#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hydrosig {

/// Autoregressive fit x_t - mean = sum_k coef[k-1] (x_{t-k} - mean) + e_t.
struct ArFit {
    std::vector<double> coefficients;
    double mean = 0.0;
    double innovation_variance = 0.0;

    [[nodiscard]] std::size_t order() const noexcept { return coefficients.size(); }
};

/// Yule-Walker fit with the order (0..max_order) minimizing
/// AIC = n log(sigma^2_p) + 2p. Throws ZeroVariance on constant input.
[[nodiscard]] ArFit fit_ar_yule_walker(std::span<const double> x, std::size_t max_order);

/// One-step residuals e_t for t = p..n-1 (length n - p).
[[nodiscard]] std::vector<double> ar_residuals(std::span<const double> x, const ArFit& fit);

/// Spectral density of the fitted AR process at angular frequency omega.
[[nodiscard]] double ar_spectral_density(const ArFit& fit, double omega);

/// Ordinary least squares R^2 of y_t on an intercept and y_{t-1..t-lags}.
/// Returns 0 when the response is constant.
[[nodiscard]] double autoregression_r2(std::span<const double> y, std::size_t lags);

}  // namespace hydrosig
