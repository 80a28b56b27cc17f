#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hydrosig/series.hpp"

namespace hydrosig {

struct PrewhitenResult {
    std::vector<double> residuals;  // demeaned AR residuals y_t
    std::size_t order = 0;
};

/// Demeans x, fits an AIC-selected Yule-Walker AR (max order 10 log10 n)
/// and returns its residuals, re-centred to mean zero.
[[nodiscard]] PrewhitenResult prewhiten_ar(std::span<const double> x);

/// Gaussian GARCH(1,1) fit. `standardized_residuals` are y_t / sigma_t.
struct GarchFit {
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double log_likelihood = 0.0;
    std::vector<double> standardized_residuals;
    bool converged = false;
};

[[nodiscard]] GarchFit fit_garch11(std::span<const double> y);

/// Heterogeneity features. garch_* are NaN when the GARCH fit fails.
struct HeterogeneityFeatures {
    double arch_acf, garch_acf, arch_r2, garch_r2, arch_lm;
};

[[nodiscard]] HeterogeneityFeatures heterogeneity_suite(std::span<const double> x);

/// Additive Holt-Winters smoothing parameters; beta is the trend parameter
/// beta* that multiplies the level change.
struct HoltWintersFit {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double sse = 0.0;
};

/// One-step squared error of additive Holt-Winters on x, starting from the
/// first-cycle initial states.
[[nodiscard]] double holt_winters_sse(std::span<const double> x, int period, double alpha, double beta,
                                      double gamma);

[[nodiscard]] HoltWintersFit holt_winters_params(const TimeSeries& ts);

/// Terasvirta-type neural-network linearity test at lag 1, reported as
/// 10 X^2 / T.
[[nodiscard]] double nonlinearity_terasvirta(std::span<const double> x);

/// KPSS statistic around a linear trend with Bartlett truncation lag 1.
[[nodiscard]] double kpss_stat(std::span<const double> x);

struct FractionalFit {
    double d = 0.0;
    double hurst = 0.5;
};

inline constexpr std::size_t kArfimaTruncation = 100;

/// Haslett-Raftery approximate profile log-likelihood of ARFIMA(0, d, 0)
/// for a zero-mean series.
[[nodiscard]] double arfima_log_likelihood(std::span<const double> x, double d,
                                           std::size_t truncation = kArfimaTruncation);

/// Maximum-likelihood d over (-0.499, 0.499) for a series (demeaned here).
[[nodiscard]] FractionalFit fit_fractional_d(std::span<const double> x);

/// 0.5 + d on the classically de-seasonalized series.
[[nodiscard]] FractionalFit hurst_arfima(const TimeSeries& ts);

}  // namespace hydrosig
