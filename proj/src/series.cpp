#include "hydrosig/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hydrosig {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::ZeroVariance: return "ZeroVariance";
        case ErrorKind::LagTooLarge: return "LagTooLarge";
        case ErrorKind::DegeneratePacf: return "DegeneratePacf";
        case ErrorKind::TooShort: return "TooShort";
        case ErrorKind::NonconvergentLoess: return "NonconvergentLoess";
        case ErrorKind::SegmentTooLong: return "SegmentTooLong";
        case ErrorKind::Undefined: return "Undefined";
        case ErrorKind::DegenerateFit: return "DegenerateFit";
        case ErrorKind::FitFailure: return "FitFailure";
        case ErrorKind::OptimizerFailure: return "OptimizerFailure";
        case ErrorKind::SingularDesign: return "SingularDesign";
        case ErrorKind::InvalidSeries: return "InvalidSeries";
        case ErrorKind::AllMissingColumn: return "AllMissingColumn";
        case ErrorKind::AllConstantColumns: return "AllConstantColumns";
        case ErrorKind::ZeroVarianceColumn: return "ZeroVarianceColumn";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::MalformedDissimilarity: return "MalformedDissimilarity";
        case ErrorKind::DegenerateLabels: return "DegenerateLabels";
        case ErrorKind::SchemaMismatch: return "SchemaMismatch";
        case ErrorKind::EmptyMatrix: return "EmptyMatrix";
        case ErrorKind::MalformedLine: return "MalformedLine";
        case ErrorKind::UnknownElement: return "UnknownElement";
        case ErrorKind::CoordinateOutOfRange: return "CoordinateOutOfRange";
        case ErrorKind::DuplicateStation: return "DuplicateStation";
        case ErrorKind::BadHeader: return "BadHeader";
        case ErrorKind::BadDate: return "BadDate";
        case ErrorKind::DuplicateObservation: return "DuplicateObservation";
        case ErrorKind::EmptyRecord: return "EmptyRecord";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

void TimeSeries::validate() const {
    if (period < 2) {
        throw Error(ErrorKind::InvalidSeries, "series '" + id + "': period must be >= 2");
    }
    if (values.size() < 2 * static_cast<std::size_t>(period)) {
        throw Error(ErrorKind::InvalidSeries,
                    "series '" + id + "': length " + std::to_string(values.size()) +
                        " is shorter than two cycles");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw Error(ErrorKind::InvalidSeries,
                        "series '" + id + "': non-finite value at index " + std::to_string(i));
        }
    }
}

double mean(std::span<const double> x) {
    if (x.empty()) return std::nan("");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) return std::nan("");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

double median(std::vector<double> x) {
    if (x.empty()) return std::nan("");
    const std::size_t mid = x.size() / 2;
    std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid), x.end());
    const double upper = x[mid];
    if (x.size() % 2 == 1) return upper;
    const double lower = *std::max_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

bool is_degenerate(std::span<const double> x, double scale) {
    if (x.size() < 2) return true;
    if (scale < 0.0) {
        scale = 0.0;
        for (double v : x) scale = std::max(scale, std::abs(v));
    }
    const double m = mean(x);
    double max_dev = 0.0;
    for (double v : x) max_dev = std::max(max_dev, std::abs(v - m));
    return max_dev <= 1e-12 * scale || max_dev == 0.0;
}

std::size_t default_max_lag(std::size_t n) {
    if (n < 2) return 0;
    const auto by_log = static_cast<std::size_t>(std::floor(10.0 * std::log10(static_cast<double>(n))));
    return std::max<std::size_t>(1, std::min(n - 1, by_log));
}

std::vector<double> sample_acf(std::span<const double> x, std::size_t max_lag) {
    const std::size_t n = x.size();
    if (max_lag >= n) {
        throw Error(ErrorKind::LagTooLarge,
                    "lag " + std::to_string(max_lag) + " for length " + std::to_string(n));
    }
    if (is_degenerate(x)) throw Error(ErrorKind::ZeroVariance, "constant series has no ACF");

    const double m = mean(x);
    std::vector<double> c(n);
    std::transform(x.begin(), x.end(), c.begin(), [m](double v) { return v - m; });
    double denom = 0.0;
    for (double v : c) denom += v * v;

    std::vector<double> r(max_lag);
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) num += c[t] * c[t + k];
        r[k - 1] = num / denom;
    }
    return r;
}

std::vector<double> pacf_from_acf(std::span<const double> acf) {
    const std::size_t L = acf.size();
    std::vector<double> pacf(L);
    std::vector<double> phi(L + 1, 0.0), prev(L + 1, 0.0);
    double v = 1.0;
    for (std::size_t k = 1; k <= L; ++k) {
        double num = acf[k - 1];
        for (std::size_t j = 1; j < k; ++j) num -= prev[j] * acf[k - 1 - j];
        const double a = v > 0.0 ? num / v : 0.0;
        if (!std::isfinite(a) || std::abs(a) > 1.0 + 1e-9) {
            throw Error(ErrorKind::DegeneratePacf, "partial autocorrelation outside [-1, 1] at lag " +
                                                       std::to_string(k));
        }
        phi[k] = a;
        for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - a * prev[k - j];
        v *= (1.0 - a * a);
        pacf[k - 1] = a;
        prev = phi;
    }
    return pacf;
}

std::vector<double> sample_pacf(std::span<const double> x, std::size_t max_lag) {
    if (2 * max_lag >= x.size()) {
        throw Error(ErrorKind::LagTooLarge, "pacf lag must be below half the length");
    }
    return pacf_from_acf(sample_acf(x, max_lag));
}

CorrelationSpectrum correlation_spectrum(std::span<const double> x, std::size_t max_lag) {
    CorrelationSpectrum s;
    s.acf = sample_acf(x, max_lag);
    if (2 * max_lag < x.size()) s.pacf = pacf_from_acf(s.acf);
    return s;
}

std::vector<double> difference(std::span<const double> x, int order) {
    if (order < 0 || x.size() <= static_cast<std::size_t>(order)) {
        throw Error(ErrorKind::TooShort, "cannot difference length " + std::to_string(x.size()) +
                                             " at order " + std::to_string(order));
    }
    std::vector<double> y(x.begin(), x.end());
    for (int o = 0; o < order; ++o) {
        for (std::size_t t = 0; t + 1 < y.size(); ++t) y[t] = y[t + 1] - y[t];
        y.pop_back();
    }
    return y;
}

TimeSeries difference(const TimeSeries& ts, int order) {
    TimeSeries out = ts;
    out.values = difference(ts.values, order);
    return out;
}

std::vector<double> zscore(std::span<const double> x) {
    if (is_degenerate(x)) throw Error(ErrorKind::ZeroVariance, "cannot standardize a constant series");
    const double m = mean(x);
    const double s = stddev(x);
    std::vector<double> z(x.size());
    std::transform(x.begin(), x.end(), z.begin(), [m, s](double v) { return (v - m) / s; });
    return z;
}

TimeSeries zscore(const TimeSeries& ts) {
    TimeSeries out = ts;
    out.values = zscore(ts.values);
    return out;
}

std::size_t first_zero_crossing(std::span<const double> acf) {
    for (std::size_t k = 0; k < acf.size(); ++k) {
        if (acf[k] <= 0.0) return k + 1;
    }
    return acf.size();
}

std::size_t first_local_min(std::span<const double> acf) {
    const std::size_t L = acf.size();
    for (std::size_t k = 1; k < L; ++k) {
        const double before = k == 1 ? 1.0 : acf[k - 2];
        if (before > acf[k - 1] && acf[k - 1] < acf[k]) return k;
    }
    return L;
}

}  // namespace hydrosig
