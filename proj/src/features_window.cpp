#include "hydrosig/features_window.hpp"

#include <cmath>
#include <vector>

#include "hydrosig/series.hpp"

namespace hydrosig {

TiledStats tiled_stats(std::span<const double> x, std::size_t width) {
    if (width < 2 || x.size() < 2 * width) throw Error(ErrorKind::TooShort, "tiled windows need two windows");
    const auto z = zscore(x);
    const std::size_t windows = z.size() / width;
    std::vector<double> means(windows), vars(windows);
    for (std::size_t w = 0; w < windows; ++w) {
        const std::span<const double> seg(z.data() + w * width, width);
        means[w] = mean(seg);
        vars[w] = variance(seg);
    }
    return TiledStats{variance(vars), variance(means)};
}

double gaussian_kl(double mean_a, double var_a, double mean_b, double var_b) {
    constexpr double eps = 1e-8;
    const double va = var_a + eps, vb = var_b + eps;
    const double dm = mean_a - mean_b;
    return 0.5 * (std::log(vb / va) + (va + dm * dm) / vb - 1.0);
}

ShiftFeatures shift_suite(std::span<const double> x, std::size_t width) {
    const std::size_t w = width;
    if (w < 2 || x.size() < 2 * w + 1) throw Error(ErrorKind::TooShort, "shift features need 2w+1 points");
    const auto z = zscore(x);
    const std::size_t n = z.size();

    ShiftFeatures f{-1.0, 0.0, -1.0, 0.0, -1.0, 0.0};
    for (std::size_t t = w; t <= n - w; ++t) {
        const std::span<const double> a(z.data() + t - w, w), b(z.data() + t, w);
        const double ma = mean(a), mb = mean(b);
        const double va = variance(a), vb = variance(b);
        const double level = std::abs(mb - ma);
        const double var = std::abs(vb - va);
        const double kl = gaussian_kl(ma, va, mb, vb);
        const auto offset = static_cast<double>(t);
        if (level > f.max_level_shift) {
            f.max_level_shift = level;
            f.time_level_shift = offset;
        }
        if (var > f.max_var_shift) {
            f.max_var_shift = var;
            f.time_var_shift = offset;
        }
        if (kl > f.max_kl_shift) {
            f.max_kl_shift = kl;
            f.time_kl_shift = offset;
        }
    }
    return f;
}

}  // namespace hydrosig
