#include "hydrosig/features_correlation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace hydrosig {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

double sum_squares(std::span<const double> v, std::size_t count) {
    double s = 0.0;
    for (std::size_t k = 0; k < count; ++k) s += v[k] * v[k];
    return s;
}

std::size_t zero_crossing_of(std::span<const double> x) {
    return first_zero_crossing(sample_acf(x, default_max_lag(x.size())));
}

}  // namespace

AcfFeatures acf_suite(const TimeSeries& ts) {
    const auto& x = ts.values;
    const std::size_t n = x.size();
    const auto period = static_cast<std::size_t>(ts.period);
    if (n < 2 * period || n < 15) throw Error(ErrorKind::TooShort, "acf features need two cycles");

    AcfFeatures f{};
    const std::size_t base_lag = default_max_lag(n);
    const std::size_t lag = std::min(n - 1, std::max({base_lag, period, std::size_t{10}}));
    try {
        const auto r = sample_acf(x, lag);
        f.x_acf1 = r[0];
        f.ac_9 = r[8];
        f.x_acf10 = sum_squares(r, 10);
        f.seas_acf1 = r[period - 1];
        const std::span<const double> head(r.data(), base_lag);
        f.firstzero_ac = static_cast<double>(first_zero_crossing(head));
        f.firstmin_ac = static_cast<double>(first_local_min(head));
    } catch (const Error&) {
        f.x_acf1 = f.ac_9 = f.x_acf10 = f.seas_acf1 = f.firstzero_ac = f.firstmin_ac = kMissing;
    }

    auto differenced = [&](int order, double& acf1, double& acf10) {
        try {
            const auto d = difference(x, order);
            const auto r = sample_acf(d, 10);
            acf1 = r[0];
            acf10 = sum_squares(r, 10);
        } catch (const Error&) {
            acf1 = acf10 = kMissing;
        }
    };
    differenced(1, f.diff1_acf1, f.diff1_acf10);
    differenced(2, f.diff2_acf1, f.diff2_acf10);
    return f;
}

PacfFeatures pacf_suite(const TimeSeries& ts) {
    const auto& x = ts.values;
    const auto period = static_cast<std::size_t>(ts.period);
    PacfFeatures f{};

    try {
        const auto phi = sample_pacf(x, std::max<std::size_t>(5, period));
        f.x_pacf5 = sum_squares(phi, 5);
        f.seas_pacf = phi[period - 1];
    } catch (const Error&) {
        f.x_pacf5 = f.seas_pacf = kMissing;
    }
    auto differenced = [&](int order) {
        try {
            return sum_squares(sample_pacf(difference(x, order), 5), 5);
        } catch (const Error&) {
            return kMissing;
        }
    };
    f.diff1x_pacf5 = differenced(1);
    f.diff2x_pacf5 = differenced(2);
    return f;
}

double embed2_incircle(std::span<const double> x, double boundary) {
    const auto z = zscore(x);
    std::size_t tau = 1;
    try {
        tau = zero_crossing_of(z);
    } catch (const Error&) {
        tau = 1;
    }
    if (z.size() < tau + 2) throw Error(ErrorKind::TooShort, "embedding lag exceeds series");
    const std::size_t pairs = z.size() - tau;
    std::size_t inside = 0;
    for (std::size_t t = 0; t < pairs; ++t) {
        if (z[t] * z[t] + z[t + tau] * z[t + tau] < boundary) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(pairs);
}

double trev_num(std::span<const double> x) {
    if (x.size() < 2) throw Error(ErrorKind::TooShort, "trev needs two points");
    const auto z = zscore(x);
    double s = 0.0;
    for (std::size_t t = 0; t + 1 < z.size(); ++t) {
        const double d = z[t + 1] - z[t];
        s += d * d * d;
    }
    return s / static_cast<double>(z.size() - 1);
}

double motiftwo_entro3(std::span<const double> x) {
    if (x.size() < 4) throw Error(ErrorKind::TooShort, "motif entropy needs four points");
    const double m = mean(x);
    std::array<std::size_t, 8> counts{};
    for (std::size_t t = 0; t + 2 < x.size(); ++t) {
        const unsigned word = (x[t] > m ? 4u : 0u) | (x[t + 1] > m ? 2u : 0u) | (x[t + 2] > m ? 1u : 0u);
        ++counts[word];
    }
    const auto total = static_cast<double>(x.size() - 2);
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log(p);
    }
    return h;
}

double walker_propcross(std::span<const double> x) {
    if (x.size() < 3) throw Error(ErrorKind::TooShort, "walker needs three points");
    const auto z = zscore(x);
    const std::size_t n = z.size();
    std::vector<double> w(n);
    w[0] = 0.0;
    for (std::size_t t = 1; t < n; ++t) w[t] = w[t - 1] + 0.1 * (z[t - 1] - w[t - 1]);
    std::size_t crossings = 0;
    for (std::size_t t = 0; t + 1 < n; ++t) {
        if ((w[t] - z[t]) * (w[t + 1] - z[t + 1]) < 0.0) ++crossings;
    }
    return static_cast<double>(crossings) / static_cast<double>(n - 1);
}

double localsimple_tau(std::span<const double> x, LocalPredictor mode) {
    if (x.size() < 10) throw Error(ErrorKind::TooShort, "local prediction needs ten points");
    const auto z = zscore(x);
    const std::size_t lookback = mode == LocalPredictor::Mean1 ? 1 : 3;
    std::vector<double> resid;
    resid.reserve(z.size() - lookback);
    for (std::size_t t = lookback; t < z.size(); ++t) {
        double pred = z[t - 1];
        if (mode == LocalPredictor::Lfit3) {
            // Line through (-1, z[t-3]), (0, z[t-2]), (1, z[t-1]) evaluated at 2.
            pred = (4.0 * z[t - 1] + z[t - 2] - 2.0 * z[t - 3]) / 3.0;
        }
        resid.push_back(z[t] - pred);
    }
    if (is_degenerate(resid, 1.0)) throw Error(ErrorKind::ZeroVariance, "local prediction is exact");
    return static_cast<double>(zero_crossing_of(resid));
}

double spreadrandomlocal(std::span<const double> x, SegmentRule rule, std::uint64_t seed) {
    const auto z = zscore(x);
    const std::size_t n = z.size();
    const std::size_t len = rule == SegmentRule::Fixed50 ? 50 : 2 * zero_crossing_of(z);
    if (len >= n) {
        throw Error(ErrorKind::SegmentTooLong,
                    "segment length " + std::to_string(len) + " for series of " + std::to_string(n));
    }
    if (len < 3) throw Error(ErrorKind::TooShort, "segments need three points");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> start_of(0, n - len);
    double total = 0.0;
    for (std::size_t s = 0; s < kSpreadSegments; ++s) {
        const std::size_t start = start_of(rng);
        total += static_cast<double>(zero_crossing_of(std::span<const double>(z).subspan(start, len)));
    }
    return total / static_cast<double>(kSpreadSegments);
}

}  // namespace hydrosig
