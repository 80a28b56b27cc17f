#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hydrosig/extractor.hpp"
#include "hydrosig/series.hpp"

namespace testgen {

using Rng = std::mt19937_64;

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, sd);
    std::vector<double> x(n);
    for (auto& v : x) v = g(rng);
    return x;
}

inline std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> x(n);
    double prev = 0.0;
    for (std::size_t i = 0; i < 200; ++i) prev = phi * prev + g(rng);
    for (auto& v : x) v = prev = phi * prev + g(rng);
    return x;
}

inline std::vector<double> garch11(std::size_t n, double omega, double alpha, double beta, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> x(n);
    double var = omega / (1.0 - alpha - beta), prev = 0.0;
    for (std::size_t i = 0; i < n + 500; ++i) {
        var = omega + alpha * prev * prev + beta * var;
        prev = std::sqrt(var) * g(rng);
        if (i >= 500) x[i - 500] = prev;
    }
    return x;
}

/// Exact Gaussian ARFIMA(0, d, 0) sample via Durbin-Levinson on the
/// fractional-noise autocorrelations.
inline std::vector<double> arfima(std::size_t n, double d, std::uint64_t seed) {
    std::vector<double> rho(n);
    rho[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k) rho[k] = rho[k - 1] * (static_cast<double>(k) - 1.0 + d) / (static_cast<double>(k) - d);
    Rng rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> x(n), phi, prev;
    double v = 1.0;
    x[0] = g(rng);
    for (std::size_t t = 1; t < n; ++t) {
        prev = phi;
        double num = rho[t];
        for (std::size_t j = 0; j + 1 < t; ++j) num -= prev[j] * rho[t - 1 - j];
        const double phi_tt = num / v;
        phi.assign(t, 0.0);
        for (std::size_t j = 0; j + 1 < t; ++j) phi[j] = prev[j] - phi_tt * prev[t - 2 - j];
        phi[t - 1] = phi_tt;
        v *= 1.0 - phi_tt * phi_tt;
        double mean = 0.0;
        for (std::size_t j = 0; j < t; ++j) mean += phi[j] * x[t - 1 - j];
        x[t] = mean + std::sqrt(v) * g(rng);
    }
    return x;
}

inline std::vector<double> sinusoid(std::size_t n, double period = 12.0, double noise = 0.0, std::uint64_t seed = 1) {
    auto e = white_noise(n, seed, noise > 0 ? noise : 1.0);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = std::sin(2.0 * std::numbers::pi * static_cast<double>(t + 1) / period) + (noise > 0 ? e[t] : 0.0);
    }
    return x;
}

inline hydrosig::TimeSeries series(std::vector<double> values, std::string id = "s", int period = 12) {
    hydrosig::TimeSeries ts;
    ts.id = std::move(id);
    ts.values = std::move(values);
    ts.period = period;
    ts.start_year = 1980;
    ts.start_month = 1;
    return ts;
}

struct Labeled {
    hydrosig::FeatureMatrix x;
    std::vector<int> y;
};

/// Isotropic Gaussian blobs with centres `spacing` apart along distinct axes.
inline Labeled blobs(std::size_t k, std::size_t per, std::size_t dim, double sigma, double spacing, std::uint64_t seed) {
    Labeled out;
    for (std::size_t j = 0; j < dim; ++j) out.x.columns.push_back("f" + std::to_string(j + 1));
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < per; ++i) {
            out.x.ids.push_back("b" + std::to_string(c + 1) + "_" + std::to_string(i + 1));
            for (std::size_t j = 0; j < dim; ++j) {
                const double centre = j % k == c ? spacing : 0.0;
                out.x.values.push_back(centre + g(rng));
            }
            out.y.push_back(static_cast<int>(c + 1));
        }
    }
    return out;
}

/// Four clusters at the corners of the unit square; opposite corners share a class.
inline Labeled xor_data(std::size_t n, double sigma, std::uint64_t seed) {
    Labeled out;
    out.x.columns = {"u", "v"};
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    for (std::size_t i = 0; i < n; ++i) {
        const int a = static_cast<int>(i % 2), b = static_cast<int>((i / 2) % 2);
        out.x.ids.push_back("p" + std::to_string(i + 1));
        out.x.values.push_back(a + g(rng));
        out.x.values.push_back(b + g(rng));
        out.y.push_back((a ^ b) + 1);
    }
    return out;
}

inline double median_of(std::vector<double> v) { return hydrosig::median(std::move(v)); }

}  // namespace testgen
