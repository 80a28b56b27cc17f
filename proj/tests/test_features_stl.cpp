#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hydrosig/features_stl.hpp"
#include "support.hpp"

using namespace hydrosig;

namespace {

void check_bounds(const StlFeatures& f) {
    CHECK(f.trend >= 0.0);
    CHECK(f.trend <= 1.0);
    CHECK(f.seasonal_strength >= 0.0);
    CHECK(f.seasonal_strength <= 1.0);
    CHECK(f.spike >= 0.0);
    CHECK(std::abs(f.e_acf1) <= 1.0);
    CHECK(f.e_acf10 >= 0.0);
    CHECK(f.peak >= 1.0);
    CHECK(f.peak <= 12.0);
    CHECK(f.trough >= 1.0);
    CHECK(f.trough <= 12.0);
}

}  // namespace

TEST_CASE("sinusoid") {
    const auto f = stl_feature_suite(testgen::series(testgen::sinusoid(480, 12.0, 0.01, 3)));
    check_bounds(f);
    CHECK(f.seasonal_strength >= 0.99);
    CHECK(f.trend <= 0.2);
    CHECK(f.peak == 3.0);
    CHECK(f.trough == 9.0);
}

TEST_CASE("calendar phase follows the start month") {
    auto ts = testgen::series(testgen::sinusoid(480, 12.0, 0.01, 3));
    ts.start_month = 4;
    const auto f = stl_feature_suite(ts);
    CHECK(f.peak == 6.0);
    CHECK(f.trough == 12.0);
}

TEST_CASE("ramp") {
    auto x = testgen::white_noise(480, 8, 0.01);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] += 0.01 * static_cast<double>(t);
    const auto f = stl_feature_suite(testgen::series(x));
    check_bounds(f);
    CHECK(f.trend >= 0.95);
    CHECK(f.seasonal_strength <= 0.2);
    CHECK(f.linearity > 0.0);
}

TEST_CASE("noise lowers both strengths") {
    double prev_trend = 2.0, prev_seas = 2.0;
    for (double sd : {0.05, 0.3, 1.0, 3.0}) {
        std::vector<double> tr, se;
        for (std::uint64_t s = 0; s < 30; ++s) {
            auto x = testgen::sinusoid(480, 12.0, sd, s);
            for (std::size_t t = 0; t < x.size(); ++t) x[t] += 2.0 * std::sin(static_cast<double>(t) / 90.0);
            const auto f = stl_feature_suite(testgen::series(x));
            check_bounds(f);
            tr.push_back(f.trend);
            se.push_back(f.seasonal_strength);
        }
        CHECK(testgen::median_of(tr) < prev_trend);
        CHECK(testgen::median_of(se) < prev_seas);
        prev_trend = testgen::median_of(tr);
        prev_seas = testgen::median_of(se);
    }
}

TEST_CASE("orthonormal polynomial coefficients") {
    // A decomposition whose trend is exactly a quadratic: linearity and
    // curvature are projections on the unit-norm Gram-Schmidt basis.
    const std::size_t n = 48;
    Decomposition d;
    d.trend.resize(n);
    d.seasonal.assign(n, 0.0);
    d.remainder = testgen::white_noise(n, 5, 0.1);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double u = static_cast<double>(t + 1);
        d.trend[t] = 1.0 + 0.5 * u - 0.02 * u * u;
        x[t] = d.trend[t] + d.remainder[t];
    }
    std::vector<std::vector<double>> basis;
    for (int p = 0; p < 3; ++p) {
        std::vector<double> v(n);
        for (std::size_t t = 0; t < n; ++t) v[t] = std::pow(static_cast<double>(t + 1), p);
        for (const auto& b : basis) {
            double dot = 0.0;
            for (std::size_t t = 0; t < n; ++t) dot += v[t] * b[t];
            for (std::size_t t = 0; t < n; ++t) v[t] -= dot * b[t];
        }
        double norm = 0.0;
        for (double e : v) norm += e * e;
        for (double& e : v) e /= std::sqrt(norm);
        basis.push_back(v);
    }
    auto coef = [&](int p) {
        double c = 0.0;
        for (std::size_t t = 0; t < n; ++t) c += d.trend[t] * basis[static_cast<std::size_t>(p)][t];
        return c;
    };
    const auto f = stl_features_from(x, d, 12);
    CHECK(f.linearity == doctest::Approx(coef(1)).epsilon(1e-9));
    CHECK(f.curvature == doctest::Approx(coef(2)).epsilon(1e-9));
}
