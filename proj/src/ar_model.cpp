#include "hydrosig/ar_model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>

#include "hydrosig/series.hpp"

namespace hydrosig {

ArFit fit_ar_yule_walker(std::span<const double> x, std::size_t max_order) {
    const std::size_t n = x.size();
    if (is_degenerate(x)) throw Error(ErrorKind::ZeroVariance, "AR fit on constant series");
    max_order = std::min(max_order, n - 1);

    const double m = mean(x);
    std::vector<double> gamma(max_order + 1, 0.0);
    for (std::size_t k = 0; k <= max_order; ++k) {
        double s = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) s += (x[t] - m) * (x[t + k] - m);
        gamma[k] = s / static_cast<double>(n);
    }

    // Durbin-Levinson over all candidate orders, keeping the AIC minimizer.
    std::vector<double> phi, best_phi;
    double v = gamma[0];
    double best_aic = static_cast<double>(n) * std::log(v);
    double best_v = v;
    for (std::size_t k = 1; k <= max_order; ++k) {
        double num = gamma[k];
        for (std::size_t j = 1; j < k; ++j) num -= phi[j - 1] * gamma[k - j];
        const double a = num / v;
        if (!std::isfinite(a) || std::abs(a) >= 1.0) break;
        std::vector<double> next(k);
        for (std::size_t j = 1; j < k; ++j) next[j - 1] = phi[j - 1] - a * phi[k - j - 1];
        next[k - 1] = a;
        phi = std::move(next);
        v *= 1.0 - a * a;
        if (!(v > 0.0)) break;
        const double aic = static_cast<double>(n) * std::log(v) + 2.0 * static_cast<double>(k);
        if (aic < best_aic) {
            best_aic = aic;
            best_phi = phi;
            best_v = v;
        }
    }
    return ArFit{std::move(best_phi), m, best_v};
}

std::vector<double> ar_residuals(std::span<const double> x, const ArFit& fit) {
    const std::size_t p = fit.order();
    std::vector<double> e;
    if (x.size() <= p) return e;
    e.reserve(x.size() - p);
    for (std::size_t t = p; t < x.size(); ++t) {
        double pred = 0.0;
        for (std::size_t k = 1; k <= p; ++k) pred += fit.coefficients[k - 1] * (x[t - k] - fit.mean);
        e.push_back(x[t] - fit.mean - pred);
    }
    return e;
}

double ar_spectral_density(const ArFit& fit, double omega) {
    std::complex<double> transfer(1.0, 0.0);
    for (std::size_t k = 1; k <= fit.order(); ++k) {
        transfer -= fit.coefficients[k - 1] * std::polar(1.0, -omega * static_cast<double>(k));
    }
    return fit.innovation_variance / std::norm(transfer);
}

double autoregression_r2(std::span<const double> y, std::size_t lags) {
    if (y.size() <= 2 * lags + 1) throw Error(ErrorKind::TooShort, "autoregression needs more data");
    const auto rows = static_cast<Eigen::Index>(y.size() - lags);
    const auto cols = static_cast<Eigen::Index>(lags + 1);
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd response(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const std::size_t t = static_cast<std::size_t>(i) + lags;
        response(i) = y[t];
        design(i, 0) = 1.0;
        for (std::size_t k = 1; k <= lags; ++k) design(i, static_cast<Eigen::Index>(k)) = y[t - k];
    }
    const double tss = (response.array() - response.mean()).square().sum();
    if (!(tss > 0.0)) return 0.0;
    const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(response);
    const double rss = (response - design * beta).squaredNorm();
    return std::clamp(1.0 - rss / tss, 0.0, 1.0);
}

}  // namespace hydrosig
