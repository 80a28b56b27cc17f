#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "hydrosig/decomposition.hpp"
#include "support.hpp"

using namespace hydrosig;

namespace {

double max_abs_identity_error(const std::vector<double>& x, const Decomposition& d) {
    double e = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        e = std::max(e, std::abs(d.seasonal[t] + d.trend[t] + d.remainder[t] - x[t]));
    }
    return e;
}

}  // namespace

TEST_CASE("classical decomposition") {
    SUBCASE("noiseless sinusoid has negligible remainder") {
        const auto x = testgen::sinusoid(480);
        const auto d = classical_additive(testgen::series(x));
        CHECK(variance(d.remainder) <= 1e-6 * variance(x));
        CHECK(max_abs_identity_error(x, d) <= 1e-9);
    }
    SUBCASE("ramp has zero seasonal") {
        std::vector<double> x(240);
        for (std::size_t t = 0; t < x.size(); ++t) x[t] = static_cast<double>(t + 1);
        const auto d = classical_additive(testgen::series(x));
        for (double s : d.seasonal) CHECK(std::abs(s) <= 1e-9);
    }
    SUBCASE("seasonal phases recovered and periodic") {
        const std::vector<double> truth{1.0, 0.5, -0.2, -1.0, -0.6, 0.3, 0.8, 0.1, -0.4, -0.7, 0.2, 0.0};
        auto x = testgen::white_noise(480, 5, 0.1);
        for (std::size_t t = 0; t < x.size(); ++t) x[t] += truth[t % 12] + 0.002 * static_cast<double>(t);
        const auto d = classical_additive(testgen::series(x));
        double sum = 0.0;
        for (std::size_t p = 0; p < 12; ++p) {
            CHECK(std::abs(d.seasonal[p] - truth[p]) <= 0.02);
            sum += d.seasonal[p];
        }
        CHECK(std::abs(sum) <= 1e-9);
        for (std::size_t t = 12; t < x.size(); ++t) CHECK(d.seasonal[t] == d.seasonal[t - 12]);
        CHECK(max_abs_identity_error(x, d) <= 1e-9);
    }
    SUBCASE("too short") {
        auto ts = testgen::series(testgen::white_noise(20, 1));
        try {
            (void)classical_additive(ts);
            FAIL("expected TooShort");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::TooShort);
        }
    }
}

TEST_CASE("stl") {
    SUBCASE("options") {
        const auto o = StlOptions{}.resolved(12);
        CHECK(o.trend_window == 21);
        CHECK(o.lowpass_window == 13);
        CHECK(o.seasonal_window == 13);
        StlOptions bad;
        bad.seasonal_window = 4;
        CHECK_THROWS_AS((void)bad.resolved(12), Error);
    }
    SUBCASE("reconstruction identity") {
        for (std::uint64_t s = 0; s < 10; ++s) {
            auto x = testgen::sinusoid(480, 12.0, 0.3, s);
            for (std::size_t t = 0; t < x.size(); ++t) x[t] += 0.01 * static_cast<double>(t);
            const auto d = stl(testgen::series(x));
            CHECK(max_abs_identity_error(x, d) <= 1e-9);
            CHECK(d.method == DecompositionMethod::Stl);
        }
    }
    SUBCASE("periodic signal leaves a tiny remainder") {
        const auto x = testgen::sinusoid(480);
        const auto d = stl(testgen::series(x));
        double worst = 0.0;
        for (std::size_t t = 12; t + 12 < x.size(); ++t) worst = std::max(worst, std::abs(d.remainder[t]));
        CHECK(worst <= 1e-6);
    }
    SUBCASE("white noise seasonal share is small") {
        int ok = 0;
        for (std::uint64_t s = 0; s < 200; ++s) {
            const auto x = testgen::white_noise(480, s);
            const auto d = stl(testgen::series(x));
            ok += variance(d.seasonal) / variance(x) <= 0.25 ? 1 : 0;
        }
        CHECK(ok >= 180);
    }
    SUBCASE("robustness iterations keep the identity") {
        auto x = testgen::sinusoid(240, 12.0, 0.2, 3);
        x[100] += 25.0;
        StlOptions o;
        o.outer_iterations = 2;
        const auto d = stl(testgen::series(x), o);
        CHECK(max_abs_identity_error(x, d) <= 1e-9);
        CHECK(std::abs(d.remainder[100]) > 20.0);
    }
}
