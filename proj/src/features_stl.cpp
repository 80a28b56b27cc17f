#include "hydrosig/features_stl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hydrosig {

namespace {

double strength(std::span<const double> remainder, std::span<const double> adjusted) {
    const double va = variance(adjusted);
    if (!(va > 0.0)) return 0.0;
    return std::clamp(1.0 - variance(remainder) / va, 0.0, 1.0);
}

}  // namespace

StlFeatures stl_features_from(std::span<const double> x, const Decomposition& d, int period, int start_month) {
    const std::size_t n = x.size();
    StlFeatures f{};
    const auto& R = d.remainder;

    std::vector<double> deseason(n), detrend(n);
    for (std::size_t t = 0; t < n; ++t) {
        deseason[t] = x[t] - d.seasonal[t];
        detrend[t] = x[t] - d.trend[t];
    }
    f.trend = strength(R, deseason);
    f.seasonal_strength = strength(R, detrend);

    // Leave-one-out variances of the remainder, in closed form.
    const double rm = mean(R);
    const double rv = variance(R);
    std::vector<double> loo(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double dev = (R[t] - rm) * (R[t] - rm);
        loo[t] = (rv * static_cast<double>(n - 1) - dev * static_cast<double>(n) / static_cast<double>(n - 1)) /
                 static_cast<double>(n - 2);
    }
    f.spike = variance(loo);

    // Orthonormal quadratic basis on t = 1..n by Gram-Schmidt.
    std::vector<std::vector<double>> basis(3, std::vector<double>(n));
    for (std::size_t t = 0; t < n; ++t) {
        const double u = static_cast<double>(t + 1);
        basis[0][t] = 1.0;
        basis[1][t] = u;
        basis[2][t] = u * u;
    }
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t j = 0; j < k; ++j) {
            double dot = 0.0;
            for (std::size_t t = 0; t < n; ++t) dot += basis[k][t] * basis[j][t];
            for (std::size_t t = 0; t < n; ++t) basis[k][t] -= dot * basis[j][t];
        }
        double norm = 0.0;
        for (double v : basis[k]) norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : basis[k]) v /= norm;
    }
    f.linearity = f.curvature = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        f.linearity += basis[1][t] * d.trend[t];
        f.curvature += basis[2][t] * d.trend[t];
    }

    try {
        const auto r = sample_acf(R, std::min<std::size_t>(10, n - 1));
        f.e_acf1 = r[0];
        f.e_acf10 = 0.0;
        for (double a : r) f.e_acf10 += a * a;
    } catch (const Error&) {
        f.e_acf1 = f.e_acf10 = std::numeric_limits<double>::quiet_NaN();
    }

    const auto p = static_cast<std::size_t>(period);
    std::vector<double> phase_sum(p, 0.0);
    std::vector<std::size_t> phase_count(p, 0);
    const auto offset = static_cast<std::size_t>(std::max(start_month - 1, 0));
    for (std::size_t t = 0; t < n; ++t) {
        phase_sum[(t + offset) % p] += d.seasonal[t];
        ++phase_count[(t + offset) % p];
    }
    for (std::size_t k = 0; k < p; ++k) phase_sum[k] /= static_cast<double>(phase_count[k]);
    f.peak = static_cast<double>(std::max_element(phase_sum.begin(), phase_sum.end()) - phase_sum.begin() + 1);
    f.trough = static_cast<double>(std::min_element(phase_sum.begin(), phase_sum.end()) - phase_sum.begin() + 1);
    return f;
}

StlFeatures stl_feature_suite(const TimeSeries& ts, const StlOptions& opts) {
    TimeSeries z = zscore(ts);
    const Decomposition d = stl(z, opts);
    return stl_features_from(z.values, d, ts.period, ts.start_month);
}

}  // namespace hydrosig
