#include "hydrosig/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>

#include <omp.h>

#include "hydrosig/decomposition.hpp"
#include "hydrosig/features_correlation.hpp"
#include "hydrosig/features_distribution.hpp"
#include "hydrosig/features_model.hpp"
#include "hydrosig/features_stl.hpp"
#include "hydrosig/features_window.hpp"
#include "hydrosig/rng.hpp"

namespace hydrosig {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

constexpr std::array<std::string_view, kFeatureCount> kNames{
    "x_acf1", "ac_9", "x_acf10", "diff1_acf1", "diff1_acf10", "diff2_acf1", "diff2_acf10", "seas_acf1",
    "firstzero_ac", "firstmin_ac", "embed2_incircle_1", "embed2_incircle_2", "trev_num", "motiftwo_entro3",
    "walker_propcross", "x_pacf5", "diff1x_pacf5", "diff2x_pacf5", "seas_pacf", "localsimple_mean1",
    "localsimple_lfitac", "sampen_first", "std1st_der", "spreadrandomlocal_meantaul_50",
    "spreadrandomlocal_meantaul_ac2", "histogram_mode_10", "outlierinclude_mdrmd", "fluctanal_prop_r1",
    "crossing_points", "entropy", "flat_spots", "arch_acf", "garch_acf", "arch_r2", "garch_r2", "alpha", "beta",
    "gamma", "lumpiness", "stability", "max_level_shift", "time_level_shift", "max_var_shift", "time_var_shift",
    "max_kl_shift", "time_kl_shift", "ARCH.LM", "nonlinearity", "unitroot_kpss", "hurst", "trend", "spike",
    "linearity", "curvature", "e_acf1", "e_acf10", "seasonal_strength", "peak", "trough"};

// Writes feature values by name so each family stays readable.
class Sink {
public:
    explicit Sink(FeatureVector& v) : v_(v) {}
    void set(std::string_view name, double value) { v_.values[feature_index(name)] = value; }

    template <class Fn>
    void guarded(std::initializer_list<std::string_view> names, Fn&& fn) {
        try {
            fn();
        } catch (const Error&) {
            for (auto name : names) set(name, kMissing);
        }
    }

private:
    FeatureVector& v_;
};

std::string format_number(double v) {
    if (!std::isfinite(v)) return {};
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(len));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(std::move(field));
    return out;
}

}  // namespace

const std::array<std::string_view, kFeatureCount>& feature_names() { return kNames; }

std::uint64_t feature_schema_hash() {
    std::string joined;
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (i) joined += ',';
        joined += kNames[i];
    }
    return fnv1a64(joined);
}

std::size_t feature_index(std::string_view name) {
    const auto it = std::find(kNames.begin(), kNames.end(), name);
    return static_cast<std::size_t>(it - kNames.begin());
}

bool FeatureVector::present(std::size_t i) const { return std::isfinite(values[i]); }

double FeatureVector::operator[](std::string_view name) const {
    const std::size_t i = feature_index(name);
    if (i >= kFeatureCount) throw Error(ErrorKind::SchemaMismatch, "unknown feature " + std::string(name));
    return values[i];
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
    return out;
}

std::size_t FeatureMatrix::missing_count() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); }));
}

FeatureMatrix FeatureMatrix::with_feature_columns() {
    FeatureMatrix m;
    m.columns.assign(kNames.begin(), kNames.end());
    return m;
}

std::map<std::string, std::string> extraction_parameters() {
    const StlOptions stl_defaults;
    return {
        {"input_scaling", "z-score before extraction"},
        {"acf_estimator", "biased (divisor n)"},
        {"acf_default_max_lag", "min(n-1, floor(10 log10 n))"},
        {"stl", stl_defaults.resolved(12).describe()},
        {"classical_trend_edges", "repeat nearest defined value"},
        {"spread_segments", std::to_string(kSpreadSegments)},
        {"sampen", "m=2;r=0.3;chebyshev;cap=ln(B(B-1))"},
        {"spectral_entropy", "yule-walker;aic;max_order=10log10(n);grid=500"},
        {"fluctanal", "scales=50 log-spaced [5,n/2];q=2;split k in [3,m-3]"},
        {"crossing_points_ties", "above"},
        {"outlier_threshold_step", "0.01"},
        {"garch", "gaussian mle;nelder-mead;softmax-constrained"},
        {"holt_winters_starts", "(0.3,0.1,0.1);(0.7,0.3,0.3);(0.1,0.01,0.5)"},
        {"holt_winters_bounds", "[1e-4,0.9999]"},
        {"terasvirta_lag", "1"},
        {"kpss_bartlett_lag", "1"},
        {"arfima", "haslett-raftery;M=" + std::to_string(kArfimaTruncation) + ";d in (-0.499,0.499)"},
        {"window_width", "period"},
        {"kl_shift", "gaussian closed form;eps=1e-8"},
        {"lfit3", "least-squares line through previous three values"},
    };
}

std::uint64_t series_seed(std::uint64_t master_seed, std::string_view id) {
    return derive_seed(master_seed, fnv1a64(id));
}

FeatureVector extract_all(const TimeSeries& ts, std::uint64_t seed) {
    ts.validate();
    FeatureVector v;
    v.values.fill(kMissing);
    v.provenance = extraction_parameters();
    v.provenance["seed"] = std::to_string(seed);

    TimeSeries z = ts;
    if (!is_degenerate(ts.values)) z.values = zscore(ts.values);
    const std::span<const double> x = z.values;
    const auto period = static_cast<std::size_t>(ts.period);
    Sink out(v);

    out.guarded({"x_acf1", "ac_9", "x_acf10", "diff1_acf1", "diff1_acf10", "diff2_acf1", "diff2_acf10",
                 "seas_acf1", "firstzero_ac", "firstmin_ac"},
                [&] {
                    const auto f = acf_suite(z);
                    out.set("x_acf1", f.x_acf1);
                    out.set("ac_9", f.ac_9);
                    out.set("x_acf10", f.x_acf10);
                    out.set("diff1_acf1", f.diff1_acf1);
                    out.set("diff1_acf10", f.diff1_acf10);
                    out.set("diff2_acf1", f.diff2_acf1);
                    out.set("diff2_acf10", f.diff2_acf10);
                    out.set("seas_acf1", f.seas_acf1);
                    out.set("firstzero_ac", f.firstzero_ac);
                    out.set("firstmin_ac", f.firstmin_ac);
                });
    out.guarded({"embed2_incircle_1"}, [&] { out.set("embed2_incircle_1", embed2_incircle(x, 1.0)); });
    out.guarded({"embed2_incircle_2"}, [&] { out.set("embed2_incircle_2", embed2_incircle(x, 2.0)); });
    out.guarded({"trev_num"}, [&] { out.set("trev_num", trev_num(x)); });
    out.guarded({"motiftwo_entro3"}, [&] { out.set("motiftwo_entro3", motiftwo_entro3(x)); });
    out.guarded({"walker_propcross"}, [&] { out.set("walker_propcross", walker_propcross(x)); });
    out.guarded({"x_pacf5", "diff1x_pacf5", "diff2x_pacf5", "seas_pacf"}, [&] {
        const auto f = pacf_suite(z);
        out.set("x_pacf5", f.x_pacf5);
        out.set("diff1x_pacf5", f.diff1x_pacf5);
        out.set("diff2x_pacf5", f.diff2x_pacf5);
        out.set("seas_pacf", f.seas_pacf);
    });
    out.guarded({"localsimple_mean1"},
                [&] { out.set("localsimple_mean1", localsimple_tau(x, LocalPredictor::Mean1)); });
    out.guarded({"localsimple_lfitac"},
                [&] { out.set("localsimple_lfitac", localsimple_tau(x, LocalPredictor::Lfit3)); });
    out.guarded({"sampen_first"}, [&] { out.set("sampen_first", sampen_first(x)); });
    out.guarded({"std1st_der"}, [&] { out.set("std1st_der", std1st_der(x)); });
    out.guarded({"spreadrandomlocal_meantaul_50"}, [&] {
        out.set("spreadrandomlocal_meantaul_50", spreadrandomlocal(x, SegmentRule::Fixed50, derive_seed(seed, 24)));
    });
    out.guarded({"spreadrandomlocal_meantaul_ac2"}, [&] {
        out.set("spreadrandomlocal_meantaul_ac2", spreadrandomlocal(x, SegmentRule::Ac2, derive_seed(seed, 25)));
    });
    out.guarded({"histogram_mode_10"}, [&] { out.set("histogram_mode_10", histogram_mode_10(x)); });
    out.guarded({"outlierinclude_mdrmd"}, [&] { out.set("outlierinclude_mdrmd", outlierinclude_mdrmd(x)); });
    out.guarded({"fluctanal_prop_r1"}, [&] { out.set("fluctanal_prop_r1", fluctanal_prop_r1(x)); });
    out.set("crossing_points", static_cast<double>(crossing_points(x)));
    out.guarded({"entropy"}, [&] { out.set("entropy", spectral_entropy(x)); });
    out.set("flat_spots", static_cast<double>(flat_spots(x)));

    out.guarded({"arch_acf", "garch_acf", "arch_r2", "garch_r2", "ARCH.LM"}, [&] {
        const auto f = heterogeneity_suite(x);
        out.set("arch_acf", f.arch_acf);
        out.set("garch_acf", f.garch_acf);
        out.set("arch_r2", f.arch_r2);
        out.set("garch_r2", f.garch_r2);
        out.set("ARCH.LM", f.arch_lm);
    });
    out.guarded({"alpha", "beta", "gamma"}, [&] {
        const auto f = holt_winters_params(z);
        out.set("alpha", f.alpha);
        out.set("beta", f.beta);
        out.set("gamma", f.gamma);
    });
    out.guarded({"lumpiness", "stability"}, [&] {
        const auto f = tiled_stats(x, period);
        out.set("lumpiness", f.lumpiness);
        out.set("stability", f.stability);
    });
    out.guarded({"max_level_shift", "time_level_shift", "max_var_shift", "time_var_shift", "max_kl_shift",
                 "time_kl_shift"},
                [&] {
                    const auto f = shift_suite(x, period);
                    out.set("max_level_shift", f.max_level_shift);
                    out.set("time_level_shift", f.time_level_shift);
                    out.set("max_var_shift", f.max_var_shift);
                    out.set("time_var_shift", f.time_var_shift);
                    out.set("max_kl_shift", f.max_kl_shift);
                    out.set("time_kl_shift", f.time_kl_shift);
                });
    out.guarded({"nonlinearity"}, [&] { out.set("nonlinearity", nonlinearity_terasvirta(x)); });
    out.guarded({"unitroot_kpss"}, [&] { out.set("unitroot_kpss", kpss_stat(x)); });
    out.guarded({"hurst"}, [&] { out.set("hurst", hurst_arfima(z).hurst); });
    out.guarded({"trend", "spike", "linearity", "curvature", "e_acf1", "e_acf10", "seasonal_strength", "peak",
                 "trough"},
                [&] {
                    const auto f = stl_feature_suite(z);
                    out.set("trend", f.trend);
                    out.set("spike", f.spike);
                    out.set("linearity", f.linearity);
                    out.set("curvature", f.curvature);
                    out.set("e_acf1", f.e_acf1);
                    out.set("e_acf10", f.e_acf10);
                    out.set("seasonal_strength", f.seasonal_strength);
                    out.set("peak", f.peak);
                    out.set("trough", f.trough);
                });

    for (double& value : v.values) {
        if (!std::isfinite(value)) value = kMissing;
    }
    return v;
}

namespace {

void extract_row(std::span<const TimeSeries> series, std::uint64_t master_seed, std::size_t i, BatchResult& out) {
    const TimeSeries& ts = series[i];
    double* row = out.matrix.values.data() + i * kFeatureCount;
    try {
        const FeatureVector v = extract_all(ts, series_seed(master_seed, ts.id));
        std::copy(v.values.begin(), v.values.end(), row);
    } catch (const std::exception& e) {
        out.row_errors[i] = e.what();
    }
}

BatchResult prepare_batch(std::span<const TimeSeries> series) {
    BatchResult out;
    out.matrix = FeatureMatrix::with_feature_columns();
    out.matrix.ids.reserve(series.size());
    for (const auto& ts : series) out.matrix.ids.push_back(ts.id);
    out.matrix.values.assign(series.size() * kFeatureCount, kMissing);
    out.row_errors.assign(series.size(), {});
    return out;
}

}  // namespace

BatchResult extract_batch(std::span<const TimeSeries> series, std::uint64_t master_seed, int threads) {
    BatchResult out = prepare_batch(series);
    const auto count = static_cast<std::ptrdiff_t>(series.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, threads))
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        extract_row(series, master_seed, static_cast<std::size_t>(i), out);
    }
    return out;
}

BatchResult extract_batch_serial(std::span<const TimeSeries> series, std::uint64_t master_seed) {
    BatchResult out = prepare_batch(series);
    for (std::size_t i = 0; i < series.size(); ++i) extract_row(series, master_seed, i, out);
    return out;
}

ImputeResult impute_missing(const FeatureMatrix& m) {
    ImputeResult res{m, 0};
    for (std::size_t c = 0; c < m.cols(); ++c) {
        std::vector<double> present;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (std::isfinite(m.at(r, c))) present.push_back(m.at(r, c));
        }
        if (present.size() == m.rows()) continue;
        if (present.empty()) throw Error(ErrorKind::AllMissingColumn, "column " + m.columns[c] + " has no values");
        const double med = median(std::move(present));
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (!std::isfinite(res.matrix.at(r, c))) {
                res.matrix.at(r, c) = med;
                ++res.imputed;
            }
        }
    }
    return res;
}

void write_matrix_csv(std::ostream& os, const FeatureMatrix& m) {
    os << "id";
    for (const auto& c : m.columns) os << ',' << c;
    os << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        os << m.ids[r];
        for (std::size_t c = 0; c < m.cols(); ++c) os << ',' << format_number(m.at(r, c));
        os << '\n';
    }
}

FeatureMatrix read_matrix_csv(std::istream& is) {
    FeatureMatrix m;
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorKind::BadHeader, "empty matrix file");
    auto header = split_csv_line(line);
    if (header.empty() || header[0] != "id") throw Error(ErrorKind::BadHeader, "first column must be 'id'");
    m.columns.assign(header.begin() + 1, header.end());
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw Error(ErrorKind::MalformedLine, "line " + std::to_string(line_no) + ": expected " +
                                                      std::to_string(header.size()) + " fields");
        }
        m.ids.push_back(fields[0]);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            const std::string& f = fields[c];
            if (f.empty()) {
                m.values.push_back(kMissing);
                continue;
            }
            char* end = nullptr;
            const double v = std::strtod(f.c_str(), &end);
            if (end != f.c_str() + f.size()) {
                throw Error(ErrorKind::MalformedLine, "line " + std::to_string(line_no) + ": bad number '" + f + "'");
            }
            m.values.push_back(v);
        }
    }
    return m;
}

}  // namespace hydrosig
