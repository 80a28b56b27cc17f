#include "hydrosig/features_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "hydrosig/ar_model.hpp"
#include "hydrosig/decomposition.hpp"
#include "hydrosig/optimize.hpp"

namespace hydrosig {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::vector<double> squared(std::span<const double> v) {
    std::vector<double> s(v.size());
    std::transform(v.begin(), v.end(), s.begin(), [](double a) { return a * a; });
    return s;
}

double acf_sum12(std::span<const double> v) {
    const auto r = sample_acf(v, 12);
    double s = 0.0;
    for (double a : r) s += a * a;
    return s;
}

double ols_sse(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) throw Error(ErrorKind::SingularDesign, "collinear regressors");
    const Eigen::VectorXd beta = qr.solve(response);
    return (response - design * beta).squaredNorm();
}

}  // namespace

PrewhitenResult prewhiten_ar(std::span<const double> x) {
    if (x.size() < 30) throw Error(ErrorKind::TooShort, "prewhitening needs 30 points");
    const std::size_t n = x.size();
    const auto max_order = static_cast<std::size_t>(std::floor(10.0 * std::log10(static_cast<double>(n))));
    std::vector<double> z;
    ArFit fit;
    try {
        z = zscore(x);
        fit = fit_ar_yule_walker(z, max_order);
    } catch (const Error& e) {
        throw Error(ErrorKind::FitFailure, e.what());
    }
    PrewhitenResult out;
    out.order = fit.order();
    out.residuals = ar_residuals(z, fit);
    const double m = mean(out.residuals);
    for (double& v : out.residuals) v -= m;
    return out;
}

GarchFit fit_garch11(std::span<const double> y) {
    const std::size_t n = y.size();
    if (n < 10) throw Error(ErrorKind::TooShort, "GARCH needs data");
    double ms = 0.0;
    for (double v : y) ms += v * v;
    ms /= static_cast<double>(n);
    if (!(ms > 0.0)) throw Error(ErrorKind::ZeroVariance, "GARCH on zero series");
    const double scale = std::sqrt(ms);
    std::vector<double> u(n);
    std::transform(y.begin(), y.end(), u.begin(), [scale](double v) { return v / scale; });

    // alpha, beta through a 3-way softmax so that alpha + beta < 1.
    auto unpack = [](std::span<const double> th) {
        const double ea = std::exp(std::clamp(th[1], -30.0, 30.0));
        const double eb = std::exp(std::clamp(th[2], -30.0, 30.0));
        const double den = 1.0 + ea + eb;
        return std::array<double, 3>{std::exp(std::clamp(th[0], -30.0, 30.0)), ea / den, eb / den};
    };
    auto nll = [&](std::span<const double> th) {
        const auto [omega, alpha, beta] = unpack(th);
        double s2 = 1.0, total = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            if (t > 0) s2 = omega + alpha * u[t - 1] * u[t - 1] + beta * s2;
            if (!(s2 > 0.0)) return std::numeric_limits<double>::infinity();
            total += 0.5 * (std::log(s2) + u[t] * u[t] / s2);
        }
        return total;
    };

    NelderMeadOptions opts;
    opts.initial_step = 0.5;
    opts.ftol = 1e-9;
    opts.max_evaluations = 3000;
    const auto res = nelder_mead(nll, {std::log(0.1), 0.0, std::log(8.0)}, opts);

    GarchFit fit;
    const auto [omega, alpha, beta] = unpack(res.x);
    fit.omega = omega * ms;
    fit.alpha = alpha;
    fit.beta = beta;
    fit.log_likelihood = -res.value;
    fit.converged = res.converged && std::isfinite(res.value) && alpha + beta < 1.0;
    fit.standardized_residuals.resize(n);
    double s2 = 1.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) s2 = omega + alpha * u[t - 1] * u[t - 1] + beta * s2;
        fit.standardized_residuals[t] = u[t] / std::sqrt(s2);
    }
    return fit;
}

HeterogeneityFeatures heterogeneity_suite(std::span<const double> x) {
    if (x.size() < 60) throw Error(ErrorKind::TooShort, "heterogeneity features need 60 points");
    HeterogeneityFeatures f{kMissing, kMissing, kMissing, kMissing, kMissing};

    auto guarded = [](auto&& fn) {
        try {
            return fn();
        } catch (const Error&) {
            return kMissing;
        }
    };

    const double m = mean(x);
    std::vector<double> centred(x.size());
    std::transform(x.begin(), x.end(), centred.begin(), [m](double v) { return v - m; });
    f.arch_lm = guarded([&] { return autoregression_r2(squared(centred), 12); });

    PrewhitenResult white;
    try {
        white = prewhiten_ar(x);
    } catch (const Error&) {
        return f;
    }
    const auto y2 = squared(white.residuals);
    f.arch_acf = guarded([&] { return acf_sum12(y2); });
    f.arch_r2 = guarded([&] { return autoregression_r2(y2, 12); });

    try {
        const GarchFit g = fit_garch11(white.residuals);
        if (g.converged) {
            const auto e2 = squared(g.standardized_residuals);
            f.garch_acf = guarded([&] { return acf_sum12(e2); });
            f.garch_r2 = guarded([&] { return autoregression_r2(e2, 12); });
        }
    } catch (const Error&) {
    }
    return f;
}

double holt_winters_sse(std::span<const double> x, int period, double alpha, double beta, double gamma) {
    const auto m = static_cast<std::size_t>(period);
    const std::size_t n = x.size();
    double c1 = 0.0, c2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        c1 += x[i];
        c2 += x[m + i];
    }
    c1 /= static_cast<double>(m);
    c2 /= static_cast<double>(m);
    double level = c1;
    double trend = (c2 - c1) / static_cast<double>(m);
    std::vector<double> season(n);
    for (std::size_t i = 0; i < m; ++i) season[i] = x[i] - level;

    double sse = 0.0;
    for (std::size_t t = m; t < n; ++t) {
        const double s_prev = season[t - m];
        const double err = x[t] - (level + trend + s_prev);
        sse += err * err;
        const double new_level = alpha * (x[t] - s_prev) + (1.0 - alpha) * (level + trend);
        const double new_trend = beta * (new_level - level) + (1.0 - beta) * trend;
        season[t] = gamma * (x[t] - level - trend) + (1.0 - gamma) * s_prev;
        level = new_level;
        trend = new_trend;
    }
    return sse;
}

HoltWintersFit holt_winters_params(const TimeSeries& ts) {
    const auto m = static_cast<std::size_t>(ts.period);
    if (ts.size() < 3 * m) throw Error(ErrorKind::TooShort, "Holt-Winters needs three cycles");
    const auto z = zscore(ts.values);

    auto sse = [&](std::span<const double> p) { return holt_winters_sse(z, ts.period, p[0], p[1], p[2]); };
    NelderMeadOptions opts;
    opts.initial_step = 0.1;
    opts.ftol = 1e-10;
    opts.max_evaluations = 1500;
    opts.lower = {1e-4, 1e-4, 1e-4};
    opts.upper = {0.9999, 0.9999, 0.9999};

    constexpr std::array<std::array<double, 3>, 3> starts{{{0.3, 0.1, 0.1}, {0.7, 0.3, 0.3}, {0.1, 0.01, 0.5}}};
    OptimResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
        auto res = nelder_mead(sse, {s.begin(), s.end()}, opts);
        if (res.value < best.value) best = std::move(res);
    }
    if (!std::isfinite(best.value)) throw Error(ErrorKind::OptimizerFailure, "Holt-Winters SSE not finite");
    return HoltWintersFit{best.x[0], best.x[1], best.x[2], best.value};
}

double nonlinearity_terasvirta(std::span<const double> x) {
    if (x.size() < 30) throw Error(ErrorKind::TooShort, "nonlinearity test needs 30 points");
    const auto z = zscore(x);
    const auto rows = static_cast<Eigen::Index>(z.size() - 1);
    Eigen::MatrixXd restricted(rows, 2), full(rows, 4);
    Eigen::VectorXd response(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double lag = z[static_cast<std::size_t>(i)];
        response(i) = z[static_cast<std::size_t>(i) + 1];
        restricted(i, 0) = full(i, 0) = 1.0;
        restricted(i, 1) = full(i, 1) = lag;
        full(i, 2) = lag * lag;
        full(i, 3) = lag * lag * lag;
    }
    const double sse0 = ols_sse(restricted, response);
    const double sse1 = ols_sse(full, response);
    if (!(sse0 > 0.0)) throw Error(ErrorKind::SingularDesign, "perfect linear fit");
    const double usable = static_cast<double>(rows);
    const double chi2 = usable * std::max(0.0, sse0 - sse1) / sse0;
    return 10.0 * chi2 / usable;
}

double kpss_stat(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 20) throw Error(ErrorKind::TooShort, "KPSS needs 20 points");
    const auto z = zscore(x);
    const auto rows = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd design(rows, 2);
    Eigen::VectorXd response(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = static_cast<double>(i + 1) / static_cast<double>(n);
        response(i) = z[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(response);
    const Eigen::VectorXd u = response - design * beta;

    double gamma0 = 0.0, gamma1 = 0.0, partial = 0.0, sum_s2 = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        gamma0 += u(i) * u(i);
        if (i > 0) gamma1 += u(i) * u(i - 1);
        partial += u(i);
        sum_s2 += partial * partial;
    }
    const double nd = static_cast<double>(n);
    gamma0 /= nd;
    gamma1 /= nd;
    const double lrv = gamma0 + 2.0 * (1.0 - 1.0 / 2.0) * gamma1;
    if (!(lrv > 1e-300)) throw Error(ErrorKind::ZeroVariance, "KPSS long-run variance vanished");
    return sum_s2 / (nd * nd * lrv);
}

double arfima_log_likelihood(std::span<const double> x, double d, std::size_t truncation) {
    const std::size_t n = x.size();
    const std::size_t M = std::min(truncation, n - 1);

    // Prediction-error variance relative to the innovation variance.
    double rel_var = std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));

    // Exact Durbin-Levinson predictions for t <= M (phi_kk = d / (k - d)).
    std::vector<double> phi, next;
    double weighted_ss = 0.0, log_var_sum = 0.0;
    for (std::size_t t = 0; t <= M; ++t) {
        if (t > 0) {
            const double a = d / (static_cast<double>(t) - d);
            next.assign(t, 0.0);
            for (std::size_t j = 1; j < t; ++j) next[j - 1] = phi[j - 1] - a * phi[t - j - 1];
            next[t - 1] = a;
            phi.swap(next);
            rel_var *= 1.0 - a * a;
        }
        double pred = 0.0;
        for (std::size_t j = 1; j <= t; ++j) pred += phi[j - 1] * x[t - j];
        const double e = x[t] - pred;
        weighted_ss += e * e / rel_var;
        log_var_sum += std::log(rel_var);
    }

    // Beyond M: truncated AR(infinity) form with the remote past replaced by
    // its mean, innovation variance 1.
    if (M + 1 < n) {
        std::vector<double> pi(n);
        pi[0] = 1.0;
        for (std::size_t j = 1; j < n; ++j) pi[j] = pi[j - 1] * (static_cast<double>(j) - 1.0 - d) / double(j);
        std::vector<double> pi_cum(n + 1, 0.0);
        for (std::size_t j = 0; j < n; ++j) pi_cum[j + 1] = pi_cum[j] + pi[j];
        std::vector<double> x_cum(n + 1, 0.0);
        for (std::size_t j = 0; j < n; ++j) x_cum[j + 1] = x_cum[j] + x[j];

        for (std::size_t t = M + 1; t < n; ++t) {
            double pred = 0.0;
            for (std::size_t j = 1; j <= M; ++j) pred -= pi[j] * x[t - j];
            // Lags M+1..t cover x[0..t-M-1].
            const std::size_t remote = t - M;
            const double tail_weight = pi_cum[t + 1] - pi_cum[M + 1];
            pred -= tail_weight * (x_cum[remote] / static_cast<double>(remote));
            const double e = x[t] - pred;
            weighted_ss += e * e;
        }
    }
    const double nd = static_cast<double>(n);
    return -0.5 * nd * std::log(weighted_ss / nd) - 0.5 * log_var_sum;
}

FractionalFit fit_fractional_d(std::span<const double> x) {
    if (x.size() < 20) throw Error(ErrorKind::TooShort, "ARFIMA needs data");
    const auto z = zscore(x);
    auto negll = [&](double d) { return -arfima_log_likelihood(z, d); };
    const auto res = brent_minimize(negll, -0.499, 0.499, 1e-7);
    if (!res.converged || !std::isfinite(res.value)) {
        throw Error(ErrorKind::OptimizerFailure, "fractional order search did not converge");
    }
    return FractionalFit{res.x, 0.5 + res.x};
}

FractionalFit hurst_arfima(const TimeSeries& ts) {
    if (ts.size() < 4 * static_cast<std::size_t>(ts.period)) {
        throw Error(ErrorKind::TooShort, "hurst needs four cycles");
    }
    const Decomposition dec = classical_additive(ts);
    std::vector<double> adjusted(ts.size());
    for (std::size_t t = 0; t < ts.size(); ++t) adjusted[t] = ts.values[t] - dec.seasonal[t];
    return fit_fractional_d(adjusted);
}

}  // namespace hydrosig
