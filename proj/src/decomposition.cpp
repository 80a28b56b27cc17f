#include "hydrosig/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace hydrosig {

Decomposition classical_additive(const TimeSeries& ts) {
    const auto n = ts.size();
    const auto p = static_cast<std::size_t>(ts.period);
    if (ts.period < 2 || n < 2 * p) throw Error(ErrorKind::TooShort, "classical decomposition needs two cycles");
    const auto& x = ts.values;

    // Centered moving average; the 2 x p filter for even periods.
    const std::size_t half = p / 2;
    std::vector<double> trend(n, 0.0);
    for (std::size_t t = half; t + half < n; ++t) {
        double s = 0.0;
        if (p % 2 == 0) {
            s += 0.5 * (x[t - half] + x[t + half]);
            for (std::size_t j = t - half + 1; j < t + half; ++j) s += x[j];
        } else {
            for (std::size_t j = t - half; j <= t + half; ++j) s += x[j];
        }
        trend[t] = s / static_cast<double>(p);
    }
    const std::size_t first = half, last = n - 1 - half;

    std::vector<double> phase_sum(p, 0.0);
    std::vector<std::size_t> phase_count(p, 0);
    for (std::size_t t = first; t <= last; ++t) {
        phase_sum[t % p] += x[t] - trend[t];
        ++phase_count[t % p];
    }
    std::vector<double> phase_mean(p);
    for (std::size_t k = 0; k < p; ++k) phase_mean[k] = phase_sum[k] / static_cast<double>(phase_count[k]);
    const double centre = mean(phase_mean);
    for (double& v : phase_mean) v -= centre;

    for (std::size_t t = 0; t < first; ++t) trend[t] = trend[first];
    for (std::size_t t = last + 1; t < n; ++t) trend[t] = trend[last];

    Decomposition d;
    d.method = DecompositionMethod::Classical;
    d.seasonal.resize(n);
    d.remainder.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        d.seasonal[t] = phase_mean[t % p];
        d.remainder[t] = x[t] - d.seasonal[t] - trend[t];
    }
    d.trend = std::move(trend);
    return d;
}

namespace {

std::size_t next_odd(double v) {
    auto k = static_cast<std::size_t>(std::ceil(v));
    if (k % 2 == 0) ++k;
    return k;
}

// Loess machinery after Cleveland et al.'s reference STL. Positions are
// 1-based: y[i - 1] is the observation at abscissa i.
struct Loess {
    std::vector<double> w;

    std::optional<double> estimate(const std::vector<double>& y, std::size_t n, std::size_t len, int degree,
                                   double xs, std::size_t nleft, std::size_t nright,
                                   const std::vector<double>* rw) {
        if (w.size() < n + 1) w.resize(n + 1);
        const double range = static_cast<double>(n) - 1.0;
        double h = std::max(xs - static_cast<double>(nleft), static_cast<double>(nright) - xs);
        if (len > n) h += static_cast<double>((len - n) / 2);
        const double h9 = 0.999 * h, h1 = 0.001 * h;

        double a = 0.0;
        for (std::size_t j = nleft; j <= nright; ++j) {
            w[j] = 0.0;
            const double r = std::abs(static_cast<double>(j) - xs);
            if (r <= h9) {
                if (r <= h1) {
                    w[j] = 1.0;
                } else {
                    const double q = r / h;
                    const double c = 1.0 - q * q * q;
                    w[j] = c * c * c;
                }
                if (rw) w[j] *= (*rw)[j - 1];
                a += w[j];
            }
        }
        if (a <= 0.0) return std::nullopt;
        for (std::size_t j = nleft; j <= nright; ++j) w[j] /= a;
        if (h > 0.0 && degree > 0) {
            double centre = 0.0;
            for (std::size_t j = nleft; j <= nright; ++j) centre += w[j] * static_cast<double>(j);
            double b = xs - centre;
            double c = 0.0;
            for (std::size_t j = nleft; j <= nright; ++j) {
                const double dj = static_cast<double>(j) - centre;
                c += w[j] * dj * dj;
            }
            if (std::sqrt(c) > 0.001 * range) {
                b /= c;
                for (std::size_t j = nleft; j <= nright; ++j) w[j] *= b * (static_cast<double>(j) - centre) + 1.0;
            }
        }
        double ys = 0.0;
        for (std::size_t j = nleft; j <= nright; ++j) ys += w[j] * y[j - 1];
        return ys;
    }

    double must(const std::vector<double>& y, std::size_t n, std::size_t len, int degree, double xs,
                std::size_t nleft, std::size_t nright, const std::vector<double>* rw) {
        auto v = estimate(y, n, len, degree, xs, nleft, nright, rw);
        if (!v) throw Error(ErrorKind::NonconvergentLoess, "all loess weights vanished");
        return *v;
    }

    // Smooths y (length n) into ys, evaluating every `jump` points and
    // interpolating linearly in between.
    std::vector<double> smooth(const std::vector<double>& y, std::size_t len, int degree, std::size_t jump,
                               const std::vector<double>* rw) {
        const std::size_t n = y.size();
        std::vector<double> ys(n);
        if (n < 2) {
            ys = y;
            return ys;
        }
        const std::size_t step = std::min(jump, n - 1);
        std::size_t nleft = 1, nright = n;
        if (len >= n) {
            for (std::size_t i = 1; i <= n; i += step) ys[i - 1] = must(y, n, len, degree, double(i), 1, n, rw);
        } else if (step == 1) {
            const std::size_t nsh = (len + 1) / 2;
            nleft = 1;
            nright = len;
            for (std::size_t i = 1; i <= n; ++i) {
                if (i > nsh && nright != n) {
                    ++nleft;
                    ++nright;
                }
                ys[i - 1] = must(y, n, len, degree, double(i), nleft, nright, rw);
            }
        } else {
            const std::size_t nsh = (len + 1) / 2;
            for (std::size_t i = 1; i <= n; i += step) {
                if (i < nsh) {
                    nleft = 1;
                    nright = len;
                } else if (i >= n - nsh + 1) {
                    nleft = n - len + 1;
                    nright = n;
                } else {
                    nleft = i - nsh + 1;
                    nright = len + i - nsh;
                }
                ys[i - 1] = must(y, n, len, degree, double(i), nleft, nright, rw);
            }
        }
        if (step != 1) {
            for (std::size_t i = 1; i + step <= n; i += step) {
                const double delta = (ys[i + step - 1] - ys[i - 1]) / static_cast<double>(step);
                for (std::size_t j = i + 1; j < i + step; ++j) ys[j - 1] = ys[i - 1] + delta * double(j - i);
            }
            const std::size_t k = ((n - 1) / step) * step + 1;
            if (k != n) {
                nleft = len >= n ? 1 : n - len + 1;
                nright = n;
                ys[n - 1] = must(y, n, len, degree, double(n), nleft, nright, rw);
                if (k != n - 1) {
                    const double delta = (ys[n - 1] - ys[k - 1]) / static_cast<double>(n - k);
                    for (std::size_t j = k + 1; j < n; ++j) ys[j - 1] = ys[k - 1] + delta * double(j - k);
                }
            }
        }
        return ys;
    }
};

std::size_t jump_for(std::size_t window) { return (window + 9) / 10; }

// Cycle-subseries smoothing, extended by one cycle on each side.
std::vector<double> smooth_subseries(Loess& loess, const std::vector<double>& y, std::size_t period,
                                     const StlOptions& o, const std::vector<double>* rw) {
    const std::size_t n = y.size();
    std::vector<double> season(n + 2 * period);
    std::vector<double> sub, sub_rw;
    for (std::size_t j = 0; j < period; ++j) {
        sub.clear();
        sub_rw.clear();
        for (std::size_t i = j; i < n; i += period) {
            sub.push_back(y[i]);
            if (rw) sub_rw.push_back((*rw)[i]);
        }
        const std::size_t k = sub.size();
        const std::vector<double>* srw = rw ? &sub_rw : nullptr;
        std::vector<double> smoothed = loess.smooth(sub, o.seasonal_window, o.seasonal_degree,
                                                    jump_for(o.seasonal_window), srw);
        const std::size_t nright = std::min(o.seasonal_window, k);
        const double left = loess.estimate(sub, k, o.seasonal_window, o.seasonal_degree, 0.0, 1, nright, srw)
                                .value_or(smoothed.front());
        const std::size_t nleft = k >= o.seasonal_window ? k - o.seasonal_window + 1 : 1;
        const double right = loess.estimate(sub, k, o.seasonal_window, o.seasonal_degree, double(k + 1), nleft, k, srw)
                                 .value_or(smoothed.back());
        season[j] = left;
        for (std::size_t m = 0; m < k; ++m) season[(m + 1) * period + j] = smoothed[m];
        season[(k + 1) * period + j] = right;
    }
    return season;
}

std::vector<double> moving_average(const std::vector<double>& x, std::size_t len) {
    std::vector<double> out(x.size() - len + 1);
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += x[i];
    out[0] = s / static_cast<double>(len);
    for (std::size_t i = 1; i < out.size(); ++i) {
        s += x[i + len - 1] - x[i - 1];
        out[i] = s / static_cast<double>(len);
    }
    return out;
}

std::vector<double> robustness_weights(const std::vector<double>& resid) {
    std::vector<double> a(resid.size());
    std::transform(resid.begin(), resid.end(), a.begin(), [](double v) { return std::abs(v); });
    const double h = 6.0 * median(a);
    std::vector<double> rw(resid.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double u = h > 0 ? a[i] / h : 0.0;
        rw[i] = u <= 0.001 ? 1.0 : (u <= 0.999 ? (1 - u * u) * (1 - u * u) : 0.0);
    }
    return rw;
}

}  // namespace

StlOptions StlOptions::resolved(int period) const {
    StlOptions o = *this;
    const double p = static_cast<double>(period);
    if (o.lowpass_window == 0) o.lowpass_window = next_odd(p);
    if (o.trend_window == 0) o.trend_window = next_odd(1.5 * p / (1.0 - 1.5 / double(o.seasonal_window)));
    for (std::size_t w : {o.seasonal_window, o.trend_window, o.lowpass_window}) {
        if (w < 3 || w % 2 == 0) throw Error(ErrorKind::TooShort, "STL windows must be odd and >= 3");
    }
    return o;
}

std::string StlOptions::describe() const {
    std::ostringstream os;
    os << "s.window=" << seasonal_window << ";t.window=" << trend_window << ";l.window=" << lowpass_window
       << ";s.degree=" << seasonal_degree << ";t.degree=" << trend_degree << ";l.degree=" << lowpass_degree
       << ";inner=" << inner_iterations << ";outer=" << outer_iterations;
    return os.str();
}

Decomposition stl(const TimeSeries& ts, const StlOptions& opts) {
    const std::size_t n = ts.size();
    const auto period = static_cast<std::size_t>(ts.period);
    if (ts.period < 2 || n < 2 * period) throw Error(ErrorKind::TooShort, "STL needs two full cycles");
    const StlOptions o = opts.resolved(ts.period);
    const auto& y = ts.values;

    Loess loess;
    std::vector<double> trend(n, 0.0), season(n, 0.0), work(n);
    std::vector<double> rw;
    const int passes = std::max(0, o.outer_iterations) + 1;
    for (int outer = 0; outer < passes; ++outer) {
        const std::vector<double>* rwp = rw.empty() ? nullptr : &rw;
        for (int inner = 0; inner < o.inner_iterations; ++inner) {
            for (std::size_t i = 0; i < n; ++i) work[i] = y[i] - trend[i];
            const std::vector<double> cycle = smooth_subseries(loess, work, period, o, rwp);
            const std::vector<double> low =
                moving_average(moving_average(moving_average(cycle, period), period), 3);
            const std::vector<double> low_smooth =
                loess.smooth(low, o.lowpass_window, o.lowpass_degree, jump_for(o.lowpass_window), nullptr);
            for (std::size_t i = 0; i < n; ++i) season[i] = cycle[period + i] - low_smooth[i];
            for (std::size_t i = 0; i < n; ++i) work[i] = y[i] - season[i];
            trend = loess.smooth(work, o.trend_window, o.trend_degree, jump_for(o.trend_window), rwp);
        }
        if (outer + 1 < passes) {
            for (std::size_t i = 0; i < n; ++i) work[i] = y[i] - trend[i] - season[i];
            rw = robustness_weights(work);
        }
    }

    Decomposition d;
    d.method = DecompositionMethod::Stl;
    d.remainder.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.remainder[i] = y[i] - season[i] - trend[i];
    d.seasonal = std::move(season);
    d.trend = std::move(trend);
    return d;
}

}  // namespace hydrosig
