#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hydrosig/error.hpp"
#include "hydrosig/statlearn.hpp"
#include "support.hpp"

using namespace hydrosig;

namespace {

FeatureMatrix make_matrix(std::size_t rows, std::size_t cols, const std::vector<double>& values) {
    FeatureMatrix m;
    for (std::size_t c = 0; c < cols; ++c) m.columns.push_back("f" + std::to_string(c));
    for (std::size_t r = 0; r < rows; ++r) m.ids.push_back("r" + std::to_string(r));
    m.values = values;
    return m;
}

FeatureMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    auto v = testgen::white_noise(rows * cols, seed);
    // Give the columns some shared structure and unequal scales.
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 1; c < cols; ++c) v[r * cols + c] += 0.5 * v[r * cols] * static_cast<double>(c % 3);
        for (std::size_t c = 0; c < cols; ++c) v[r * cols + c] *= 1.0 + static_cast<double>(c);
    }
    return make_matrix(rows, cols, v);
}

Eigen::MatrixXd to_eigen(const FeatureMatrix& m) {
    Eigen::MatrixXd x(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m.at(r, c);
    return x;
}

// Naive complete linkage: returns the merge sequence as cluster member sets.
std::vector<std::vector<std::size_t>> naive_clusters_at(const Eigen::MatrixXd& d, std::size_t k) {
    std::vector<std::vector<std::size_t>> cl;
    for (Eigen::Index i = 0; i < d.rows(); ++i) cl.push_back({static_cast<std::size_t>(i)});
    while (cl.size() > k) {
        double best = INFINITY;
        std::size_t ba = 0, bb = 0;
        for (std::size_t a = 0; a < cl.size(); ++a) {
            for (std::size_t b = a + 1; b < cl.size(); ++b) {
                double link = 0.0;
                for (auto i : cl[a])
                    for (auto j : cl[b]) link = std::max(link, d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
                if (link < best) {
                    best = link;
                    ba = a;
                    bb = b;
                }
            }
        }
        cl[ba].insert(cl[ba].end(), cl[bb].begin(), cl[bb].end());
        cl.erase(cl.begin() + static_cast<std::ptrdiff_t>(bb));
    }
    for (auto& c : cl) std::sort(c.begin(), c.end());
    std::sort(cl.begin(), cl.end());
    return cl;
}

}  // namespace

TEST_CASE("autoscale") {
    const auto a = autoscale(make_matrix(2, 1, {2.0, 4.0}));
    CHECK(a.matrix.at(0, 0) == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-12));
    CHECK(a.matrix.at(1, 0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

    const auto m = random_matrix(50, 6, 1);
    const auto s = autoscale(m).matrix;
    for (std::size_t c = 0; c < s.cols(); ++c) {
        const auto col = s.column(c);
        double mu = 0.0, ss = 0.0;
        for (double v : col) mu += v;
        mu /= 50.0;
        for (double v : col) ss += (v - mu) * (v - mu);
        CHECK(std::abs(mu) <= 1e-12);
        CHECK(std::sqrt(ss / 49.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto twice = autoscale(s).matrix;
    for (std::size_t k = 0; k < s.values.size(); ++k) CHECK(std::abs(twice.values[k] - s.values[k]) <= 1e-12);

    auto with_const = make_matrix(3, 2, {1.0, 5.0, 2.0, 5.0, 3.0, 5.0});
    const auto dropped = autoscale(with_const);
    CHECK(dropped.dropped == std::vector<std::string>{"f1"});
    CHECK(dropped.matrix.cols() == 1);
    CHECK_THROWS_AS((void)autoscale(make_matrix(3, 1, {5.0, 5.0, 5.0})), Error);
}

TEST_CASE("pca") {
    const auto s = autoscale(random_matrix(80, 7, 2)).matrix;
    const auto p = pca(s);
    const auto k = p.loadings.cols();
    CHECK(k == 7);
    const Eigen::MatrixXd gram = p.loadings.transpose() * p.loadings;
    CHECK((gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(std::abs(p.variance_explained.sum() - 1.0) <= 1e-8);
    CHECK(std::abs(p.eigenvalues.sum() - 7.0) <= 1e-6);
    for (Eigen::Index i = 1; i < k; ++i) CHECK(p.eigenvalues(i) <= p.eigenvalues(i - 1));
    for (Eigen::Index c = 0; c < k; ++c) {
        CHECK(std::abs(p.contributions.col(c).sum() - 100.0) <= 1e-6);
        Eigen::Index arg = 0;
        p.loadings.col(c).cwiseAbs().maxCoeff(&arg);
        CHECK(p.loadings(arg, c) > 0.0);
    }
    const Eigen::MatrixXd x = to_eigen(s);
    CHECK((x - p.scores * p.loadings.transpose()).cwiseAbs().maxCoeff() <= 1e-8);

    // Eigenvalues agree with a symmetric eigensolver on the covariance.
    const Eigen::MatrixXd cov = x.transpose() * x / 79.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    for (Eigen::Index i = 0; i < k; ++i) CHECK(p.eigenvalues(i) == doctest::Approx(es.eigenvalues()(k - 1 - i)).epsilon(1e-9));

    std::vector<double> v;
    for (double t : testgen::white_noise(30, 3)) {
        v.push_back(t);
        v.push_back(-2.0 * t + 1.0);
    }
    const auto r1 = pca(autoscale(make_matrix(30, 2, v)).matrix);
    CHECK(std::abs(r1.variance_explained(0) - 1.0) <= 1e-8);
}

TEST_CASE("correlation report") {
    SUBCASE("identities and Gram matrix") {
        const auto m = random_matrix(60, 5, 4);
        const auto rep = correlation_report(m);
        const Eigen::MatrixXd z = to_eigen(autoscale(m).matrix);
        const Eigen::MatrixXd gram = z.transpose() * z / 59.0;
        CHECK((rep.r - gram).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((rep.r - rep.r.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (Eigen::Index i = 0; i < 5; ++i) {
            CHECK(rep.r(i, i) == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(rep.p(i, i) == 0.0);
        }
        CHECK(rep.r.cwiseAbs().maxCoeff() <= 1.0);
        auto ord = rep.order;
        std::sort(ord.begin(), ord.end());
        for (std::size_t i = 0; i < ord.size(); ++i) CHECK(ord[i] == i);
    }
    SUBCASE("antisymmetric pair") {
        std::vector<double> v;
        for (double t : testgen::white_noise(20, 5)) {
            v.push_back(t);
            v.push_back(-t);
        }
        const auto rep = correlation_report(make_matrix(20, 2, v));
        CHECK(rep.r(0, 1) == -1.0);
        CHECK(rep.p(0, 1) == 0.0);
    }
    SUBCASE("t-test p-value with two degrees of freedom") {
        // For nu = 2 the two-sided tail is 1 - |t| / sqrt(2 + t^2).
        const auto m = make_matrix(4, 2, {1.0, 2.0, 2.0, 1.0, 3.0, 4.0, 4.0, 3.5});
        const auto rep = correlation_report(m);
        const double r = rep.r(0, 1);
        const double t = r * std::sqrt(2.0 / (1.0 - r * r));
        CHECK(rep.p(0, 1) == doctest::Approx(1.0 - std::abs(t) / std::sqrt(2.0 + t * t)).epsilon(1e-10));
        CHECK(rep.significant(0, 1) == (rep.p(0, 1) < 0.05));
    }
    SUBCASE("independent columns") {
        const auto m = make_matrix(5000, 12, testgen::white_noise(60000, 6));
        const auto rep = correlation_report(m);
        int small = 0, pairs = 0;
        for (Eigen::Index i = 0; i < 12; ++i)
            for (Eigen::Index j = i + 1; j < 12; ++j) {
                ++pairs;
                small += std::abs(rep.r(i, j)) <= 0.05 ? 1 : 0;
            }
        CHECK(small >= static_cast<int>(std::ceil(0.95 * pairs)));
    }
    CHECK_THROWS_AS((void)correlation_report(make_matrix(3, 2, {1, 2, 3, 4, 5, 7})), Error);
    CHECK_THROWS_AS((void)correlation_report(make_matrix(4, 2, {1, 2, 3, 2, 5, 2, 7, 2})), Error);
}

TEST_CASE("hierarchical clustering") {
    SUBCASE("two tight groups are contiguous") {
        Eigen::MatrixXd d(4, 4);
        d << 0, 9, 1, 8, 9, 0, 10, 2, 1, 10, 0, 9, 8, 2, 9, 0;
        const auto o = hclust_order(d);
        REQUIRE(o.size() == 4);
        const auto pos = [&](std::size_t v) { return std::find(o.begin(), o.end(), v) - o.begin(); };
        CHECK(std::abs(pos(0) - pos(2)) == 1);
        CHECK(std::abs(pos(1) - pos(3)) == 1);
        CHECK(o.front() == 0);
        const auto cut = hclust_cut(d, 2);
        CHECK(cut == std::vector<std::size_t>{0, 1, 0, 1});
    }
    SUBCASE("singleton") {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(1, 1);
        CHECK(hclust_order(d) == std::vector<std::size_t>{0});
    }
    SUBCASE("cuts agree with a naive merge trace") {
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto pts = testgen::white_noise(40, s + 30);
            Eigen::MatrixXd d(20, 20);
            for (Eigen::Index i = 0; i < 20; ++i)
                for (Eigen::Index j = 0; j < 20; ++j) {
                    const double dx = pts[2 * i] - pts[2 * j], dy = pts[2 * i + 1] - pts[2 * j + 1];
                    d(i, j) = std::sqrt(dx * dx + dy * dy);
                }
            for (std::size_t k : {2u, 4u, 7u}) {
                const auto cut = hclust_cut(d, k);
                std::vector<std::vector<std::size_t>> groups(k);
                for (std::size_t i = 0; i < cut.size(); ++i) groups[cut[i]].push_back(i);
                std::sort(groups.begin(), groups.end());
                CHECK(groups == naive_clusters_at(d, k));
            }
            const auto o = hclust_order(d);
            auto sorted = o;
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t i = 0; i < 20; ++i) CHECK(sorted[i] == i);
            // Each cut group occupies a contiguous run of the leaf order.
            const auto cut = hclust_cut(d, 4);
            std::size_t runs = 1;
            for (std::size_t i = 1; i < o.size(); ++i) runs += cut[o[i]] != cut[o[i - 1]] ? 1 : 0;
            CHECK(runs == 4);
        }
    }
    SUBCASE("malformed input") {
        Eigen::MatrixXd d(2, 2);
        d << 0, 1, 2, 0;
        CHECK_THROWS_AS(validate_dissimilarity(d), Error);
        CHECK_THROWS_AS((void)hclust_order(d), Error);
        d << 0, -1, -1, 0;
        CHECK_THROWS_AS(validate_dissimilarity(d), Error);
        d << 1, 1, 1, 0;
        CHECK_THROWS_AS(validate_dissimilarity(d), Error);
        CHECK_THROWS_AS(validate_dissimilarity(Eigen::MatrixXd::Zero(2, 3)), Error);
    }
}
