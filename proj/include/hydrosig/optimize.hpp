#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hydrosig {

struct OptimResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    double initial_step = 0.1;
    double ftol = 1e-10;
    int max_evaluations = 4000;
    // Optional box; vertices are projected into it when non-empty.
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Derivative-free simplex minimization. The returned value never exceeds
/// f(start).
[[nodiscard]] OptimResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                                      std::vector<double> start, const NelderMeadOptions& opts = {});

struct ScalarResult {
    double x = 0.0;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Brent's bracketing minimizer on [lo, hi] (golden section with parabolic
/// steps).
[[nodiscard]] ScalarResult brent_minimize(const std::function<double(double)>& f, double lo, double hi,
                                          double tol = 1e-8, int max_iter = 200);

}  // namespace hydrosig
