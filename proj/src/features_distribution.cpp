#include "hydrosig/features_distribution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "hydrosig/ar_model.hpp"

namespace hydrosig {

namespace {

// Bin index in [0, bins) for v over [lo, hi].
std::size_t bin_of(double v, double lo, double hi, std::size_t bins) {
    if (!(hi > lo)) return 0;
    const double u = (v - lo) / (hi - lo) * static_cast<double>(bins);
    const auto k = static_cast<std::ptrdiff_t>(std::floor(u));
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(bins) - 1));
}

}  // namespace

double std1st_der(std::span<const double> x) {
    if (x.size() < 3) throw Error(ErrorKind::TooShort, "std1st_der needs three points");
    return stddev(difference(zscore(x), 1));
}

double histogram_mode_10(std::span<const double> x) {
    const auto z = zscore(x);
    const auto [lo_it, hi_it] = std::minmax_element(z.begin(), z.end());
    const double lo = *lo_it, hi = *hi_it;
    std::array<std::size_t, 10> counts{};
    for (double v : z) ++counts[bin_of(v, lo, hi, 10)];
    const auto best = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    const double width = (hi - lo) / 10.0;
    return lo + (static_cast<double>(best) + 0.5) * width;
}

double outlierinclude_mdrmd(std::span<const double> x) {
    const auto z = zscore(x);
    const std::size_t n = z.size();
    double max_abs = 0.0;
    for (double v : z) max_abs = std::max(max_abs, std::abs(v));

    std::vector<double> medians;
    std::vector<double> idx;
    for (std::size_t j = 0;; ++j) {
        const double threshold = 0.01 * static_cast<double>(j);
        if (threshold > max_abs) break;
        idx.clear();
        for (std::size_t t = 0; t < n; ++t) {
            if (std::abs(z[t]) >= threshold) idx.push_back(static_cast<double>(t + 1));
        }
        if (idx.size() < 2) break;
        medians.push_back(median(idx) / static_cast<double>(n) - 0.5);
    }
    if (medians.empty()) throw Error(ErrorKind::Undefined, "no threshold kept two points");
    return median(std::move(medians));
}

std::size_t crossing_points(std::span<const double> x) {
    if (x.size() < 2) return 0;
    const double m = median(std::vector<double>(x.begin(), x.end()));
    std::size_t count = 0;
    bool above = x[0] >= m;
    for (std::size_t t = 1; t < x.size(); ++t) {
        const bool now = x[t] >= m;
        if (now != above) ++count;
        above = now;
    }
    return count;
}

std::size_t flat_spots(std::span<const double> x) {
    if (x.empty()) return 0;
    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    const double lo = *lo_it, hi = *hi_it;
    std::size_t best = 1, run = 1;
    std::size_t prev = bin_of(x[0], lo, hi, 10);
    for (std::size_t t = 1; t < x.size(); ++t) {
        const std::size_t b = bin_of(x[t], lo, hi, 10);
        run = b == prev ? run + 1 : 1;
        best = std::max(best, run);
        prev = b;
    }
    return best;
}

TemplateMatches count_template_matches(std::span<const double> x, std::size_t m, double r) {
    TemplateMatches out;
    const std::size_t n = x.size();
    if (n <= m + 1) return out;
    const std::size_t templates = n - m;
    for (std::size_t i = 0; i + 1 < templates; ++i) {
        for (std::size_t j = i + 1; j < templates; ++j) {
            bool close = true;
            for (std::size_t k = 0; k < m; ++k) {
                if (std::abs(x[i + k] - x[j + k]) > r) {
                    close = false;
                    break;
                }
            }
            if (!close) continue;
            ++out.shorter;
            if (std::abs(x[i + m] - x[j + m]) <= r) ++out.longer;
        }
    }
    return out;
}

double sampen_first(std::span<const double> x) {
    if (x.size() < 20) throw Error(ErrorKind::TooShort, "sample entropy needs 20 points");
    const auto z = zscore(x);
    const auto counts = count_template_matches(z, 2, 0.3);
    const auto b = static_cast<double>(counts.shorter);
    if (counts.shorter == 0) throw Error(ErrorKind::Undefined, "no length-2 template matches");
    if (counts.longer == 0) {
        if (counts.shorter < 2) throw Error(ErrorKind::Undefined, "sample entropy cap undefined");
        return std::log(b * (b - 1.0));
    }
    return -std::log(static_cast<double>(counts.longer) / b);
}

double spectral_entropy(std::span<const double> x) {
    const std::size_t n = x.size();
    const auto max_order = static_cast<std::size_t>(std::floor(10.0 * std::log10(static_cast<double>(n))));
    ArFit fit;
    try {
        fit = fit_ar_yule_walker(x, max_order);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ZeroVariance) throw;
        throw Error(ErrorKind::FitFailure, e.what());
    }
    std::vector<double> density(kSpectralGrid);
    double total = 0.0;
    for (std::size_t i = 0; i < kSpectralGrid; ++i) {
        const double omega = std::numbers::pi * static_cast<double>(i + 1) / static_cast<double>(kSpectralGrid);
        density[i] = ar_spectral_density(fit, omega);
        total += density[i];
    }
    if (!(total > 0.0) || !std::isfinite(total)) throw Error(ErrorKind::FitFailure, "degenerate AR spectrum");
    double h = 0.0;
    for (double d : density) {
        const double p = d / total;
        if (p > 0.0) h -= p * std::log(p);
    }
    return std::clamp(h / std::log(static_cast<double>(kSpectralGrid)), 0.0, 1.0);
}

FluctuationProfile fluctuation_profile(std::span<const double> x) {
    const auto z = zscore(x);
    const std::size_t n = z.size();
    std::vector<double> profile(n);
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) profile[t] = acc += z[t];

    // ~50 log-spaced integer scales in [5, n/2], deduplicated.
    std::vector<std::size_t> scales;
    const double lo = std::log(5.0), hi = std::log(static_cast<double>(n) / 2.0);
    for (int i = 0; i < 50; ++i) {
        const auto s = static_cast<std::size_t>(std::lround(std::exp(lo + (hi - lo) * i / 49.0)));
        if (scales.empty() || scales.back() != s) scales.push_back(s);
    }

    FluctuationProfile out;
    for (std::size_t tau : scales) {
        const std::size_t buffers = n / tau;
        // Least-squares line against 0..tau-1 in each buffer.
        const double tm = 0.5 * static_cast<double>(tau - 1);
        double sxx = 0.0;
        for (std::size_t i = 0; i < tau; ++i) sxx += (double(i) - tm) * (double(i) - tm);
        double ss = 0.0;
        for (std::size_t b = 0; b < buffers; ++b) {
            const double* seg = profile.data() + b * tau;
            double ym = 0.0;
            for (std::size_t i = 0; i < tau; ++i) ym += seg[i];
            ym /= static_cast<double>(tau);
            double sxy = 0.0;
            for (std::size_t i = 0; i < tau; ++i) sxy += (double(i) - tm) * (seg[i] - ym);
            const double slope = sxy / sxx;
            double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin;
            for (std::size_t i = 0; i < tau; ++i) {
                const double r = seg[i] - (ym + slope * (double(i) - tm));
                rmin = std::min(rmin, r);
                rmax = std::max(rmax, r);
            }
            ss += (rmax - rmin) * (rmax - rmin);
        }
        out.scales.push_back(static_cast<double>(tau));
        out.fluctuations.push_back(std::sqrt(ss / static_cast<double>(buffers)));
    }
    return out;
}

double fluctanal_prop_r1(std::span<const double> x) {
    if (x.size() < 50) throw Error(ErrorKind::TooShort, "fluctuation analysis needs 50 points");
    const auto prof = fluctuation_profile(x);
    const std::size_t m = prof.scales.size();
    if (m < 6) throw Error(ErrorKind::TooShort, "too few fluctuation scales");
    std::vector<double> lx(m), ly(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(prof.fluctuations[i] > 0.0)) throw Error(ErrorKind::DegenerateFit, "zero fluctuation");
        lx[i] = std::log(prof.scales[i]);
        ly[i] = std::log(prof.fluctuations[i]);
    }
    auto line_sse = [&](std::size_t from, std::size_t to) {  // [from, to)
        const double cnt = static_cast<double>(to - from);
        double mx = 0, my = 0;
        for (std::size_t i = from; i < to; ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= cnt;
        my /= cnt;
        double sxx = 0, sxy = 0, syy = 0;
        for (std::size_t i = from; i < to; ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
            syy += (ly[i] - my) * (ly[i] - my);
        }
        return sxx > 0 ? std::max(0.0, syy - sxy * sxy / sxx) : syy;
    };
    std::size_t best_k = 3;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 3; k <= m - 3; ++k) {
        const double sse = line_sse(0, k) + line_sse(k, m);
        if (sse < best) {
            best = sse;
            best_k = k;
        }
    }
    return static_cast<double>(best_k) / static_cast<double>(m);
}

}  // namespace hydrosig
