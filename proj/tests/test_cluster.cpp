#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "hydrosig/cluster.hpp"
#include "hydrosig/error.hpp"
#include "support.hpp"

using namespace hydrosig;

namespace {

Eigen::MatrixXd euclid(const std::vector<double>& pts, std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(pts.size() / dim);
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                const double e = pts[static_cast<std::size_t>(i) * dim + c] - pts[static_cast<std::size_t>(j) * dim + c];
                s += e * e;
            }
            d(i, j) = std::sqrt(s);
        }
    return d;
}

double cost_of(const Eigen::MatrixXd& d, const std::vector<std::size_t>& medoids) {
    double c = 0.0;
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        double best = INFINITY;
        for (auto m : medoids) best = std::min(best, d(i, static_cast<Eigen::Index>(m)));
        c += best;
    }
    return c;
}

double exhaustive_best(const Eigen::MatrixXd& d, std::size_t k) {
    const auto n = static_cast<std::size_t>(d.rows());
    std::vector<bool> sel(n, false);
    std::fill(sel.begin(), sel.begin() + static_cast<std::ptrdiff_t>(k), true);
    double best = INFINITY;
    do {
        std::vector<std::size_t> m;
        for (std::size_t i = 0; i < n; ++i)
            if (sel[i]) m.push_back(i);
        best = std::min(best, cost_of(d, m));
    } while (std::prev_permutation(sel.begin(), sel.end()));
    return best;
}

testgen::Labeled feature_blobs(std::size_t per, std::uint64_t seed) {
    auto b = testgen::blobs(5, per, kFeatureCount, 0.1, 10.0, seed);
    b.x.columns = FeatureMatrix::with_feature_columns().columns;
    return b;
}

ClusterOptions copts(std::size_t trees, std::uint64_t seed) {
    ClusterOptions o;
    o.n_trees = trees;
    o.seed = seed;
    o.threads = 1;
    return o;
}

}  // namespace

TEST_CASE("adjusted Rand index") {
    CHECK(adjusted_rand_index({1, 1, 2, 2}, {1, 2, 1, 2}) == doctest::Approx(-0.5));
    CHECK(adjusted_rand_index({1, 1, 2, 2, 3}, {7, 7, 4, 4, 9}) == doctest::Approx(1.0));
    // Contingency [[2,1],[0,2]]: index 1, expected 0.8, max 2.
    CHECK(adjusted_rand_index({1, 1, 1, 2, 2}, {1, 1, 2, 2, 2}) == doctest::Approx((1.0 - 0.8) / (2.0 - 0.8)));
}

TEST_CASE("PAM") {
    SUBCASE("every point its own medoid") {
        const auto d = euclid(testgen::white_noise(12, 1), 2);
        const auto r = pam(d, 6);
        CHECK(r.cost == 0.0);
        CHECK(std::set<std::size_t>(r.medoids.begin(), r.medoids.end()).size() == 6);
    }
    SUBCASE("two tight pairs") {
        const auto d = euclid({0.0, 0.0, 0.1, 0.0, 5.0, 5.0, 5.0, 5.2}, 2);
        const auto r = pam(d, 2);
        CHECK(r.labels[0] == r.labels[1]);
        CHECK(r.labels[2] == r.labels[3]);
        CHECK(r.labels[0] != r.labels[2]);
        CHECK(r.cost == doctest::Approx(exhaustive_best(d, 2)).epsilon(1e-12));
    }
    SUBCASE("local optimum properties") {
        for (std::uint64_t s = 0; s < 20; ++s) {
            const auto d = euclid(testgen::white_noise(24, s + 3), 2);
            for (std::size_t k : {2u, 3u, 4u}) {
                const auto r = pam(d, k);
                CHECK(r.converged);
                CHECK(r.cost <= r.build_cost + 1e-12);
                CHECK(r.cost == doctest::Approx(cost_of(d, r.medoids)).epsilon(1e-12));
                CHECK(r.cost >= exhaustive_best(d, k) - 1e-12);
                for (std::size_t m = 0; m < k; ++m) CHECK(r.labels[r.medoids[m]] == m);
                // No single swap improves a converged result.
                for (std::size_t m = 0; m < k; ++m) {
                    for (std::size_t o = 0; o < 12; ++o) {
                        if (std::find(r.medoids.begin(), r.medoids.end(), o) != r.medoids.end()) continue;
                        auto trial = r.medoids;
                        trial[m] = o;
                        CHECK(cost_of(d, trial) >= r.cost - 1e-9);
                    }
                }
            }
        }
    }
    SUBCASE("well separated data reach the global optimum") {
        const auto b = testgen::blobs(3, 4, 2, 0.3, 8.0, 5);
        const auto d = euclid(b.x.values, 2);
        CHECK(pam(d, 3).cost == doctest::Approx(exhaustive_best(d, 3)).epsilon(1e-12));
    }
    SUBCASE("errors") {
        Eigen::MatrixXd bad(2, 2);
        bad << 0, 1, 3, 0;
        CHECK_THROWS_AS((void)pam(bad, 1), Error);
        CHECK_THROWS_AS((void)pam(Eigen::MatrixXd::Zero(3, 3), 4), Error);
    }
}

TEST_CASE("unsupervised clustering of separated blobs") {
    const auto b = feature_blobs(20, 1);
    const auto a = unsupervised_cluster(b.x, copts(1000, 7));
    CHECK(adjusted_rand_index(a.labels, b.y) >= 0.9);
    CHECK(a.labels.size() == 100);
    CHECK(a.labels[0] == 1);
    CHECK(std::set<int>(a.labels.begin(), a.labels.end()) == std::set<int>{1, 2, 3, 4, 5});
    REQUIRE(a.medoid_ids.size() == 5);
    for (int l = 1; l <= 5; ++l) {
        const auto it = std::find(a.ids.begin(), a.ids.end(), a.medoid_ids[static_cast<std::size_t>(l - 1)]);
        REQUIRE(it != a.ids.end());
        CHECK(a.labels[static_cast<std::size_t>(it - a.ids.begin())] == l);
    }
    CHECK(a.ranking.size() == kFeatureCount);

    const auto again = unsupervised_cluster(b.x, copts(1000, 7));
    CHECK(again.labels == a.labels);
    CHECK(again.medoid_ids == a.medoid_ids);

    auto h = copts(1000, 7);
    h.method = PartitionMethod::Hierarchical;
    CHECK(adjusted_rand_index(unsupervised_cluster(b.x, h).labels, b.y) >= 0.9);
}

TEST_CASE("duplicated rows are co-clustered") {
    auto b = feature_blobs(8, 2);
    for (std::size_t r : {3u, 17u, 30u}) {
        b.x.ids.push_back("dup" + std::to_string(r));
        for (std::size_t c = 0; c < kFeatureCount; ++c) b.x.values.push_back(b.x.at(r, c));
    }
    const auto a = unsupervised_cluster(b.x, copts(300, 3));
    CHECK(a.labels[40] == a.labels[3]);
    CHECK(a.labels[41] == a.labels[17]);
    CHECK(a.labels[42] == a.labels[30]);
}

TEST_CASE("monotone transforms leave the assignment unchanged") {
    const auto b = testgen::blobs(3, 15, 6, 1.0, 2.5, 4);
    auto t = b.x;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        t.at(r, 0) = std::exp(t.at(r, 0));
        t.at(r, 3) = std::pow(t.at(r, 3) + 10.0, 3.0);
        t.at(r, 5) = 4.0 * t.at(r, 5) - 1.0;
    }
    auto o = copts(300, 11);
    o.k = 3;
    const auto a = unsupervised_cluster(b.x, o);
    const auto c = unsupervised_cluster(t, o);
    CHECK(a.labels == c.labels);
    CHECK(a.medoid_ids == c.medoid_ids);
}

TEST_CASE("feature ranking") {
    auto b = feature_blobs(20, 3);
    const std::size_t decoy = 20;
    const auto noise = testgen::white_noise(b.x.rows(), 99);
    for (std::size_t r = 0; r < b.x.rows(); ++r) b.x.at(r, decoy) = noise[r];
    const auto a = unsupervised_cluster(b.x, copts(500, 5));
    std::set<std::string> names;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < a.ranking.size(); ++i) {
        names.insert(a.ranking[i].feature);
        if (a.ranking[i].index == decoy) pos = i;
    }
    CHECK(names.size() == kFeatureCount);
    CHECK(pos >= 3 * kFeatureCount / 4);
    CHECK(unsupervised_cluster(b.x, copts(500, 5)).ranking[0].feature == a.ranking[0].feature);
}

TEST_CASE("spatial interpolation") {
    SUBCASE("two stations split the grid") {
        std::vector<StationLabel> st{{"w", 45.0, -100.0, 1}, {"e", 45.0, -90.0, 2}};
        SpatialOptions o;
        o.grid_step = 1.0;
        o.n_trees = 100;
        o.seed = 1;
        o.threads = 1;
        const auto g = spatial_interpolate(st, o);
        CHECK(g.bbox.south == 43.0);
        CHECK(g.bbox.north == 47.0);
        CHECK(g.bbox.west == -102.0);
        CHECK(g.bbox.east == -88.0);
        CHECK(g.n_lat == 5);
        CHECK(g.n_lon == 15);
        REQUIRE(g.nodes.size() == 75);
        CHECK(g.nodes[0].lat == 43.0);
        CHECK(g.nodes[0].lon == -102.0);
        CHECK(g.nodes[1].lon == -101.0);
        for (const auto& n : g.nodes) {
            double s = 0.0;
            for (double v : n.votes) s += v;
            CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
            // Any tree separating two points on one latitude splits on longitude.
            CHECK(n.label == (n.lon <= -95.0 ? 1 : 2));
        }
    }
    SUBCASE("homogeneous regions") {
        std::vector<StationLabel> st;
        const auto e = testgen::white_noise(200, 8);
        for (std::size_t i = 0; i < 100; ++i) {
            const double lat = 30.0 + 20.0 * std::abs(std::fmod(e[2 * i], 1.0));
            const double lon = -20.0 + 40.0 * (static_cast<double>(i) + 0.5) / 100.0;
            st.push_back({"s" + std::to_string(i), lat, lon, lon < 0.0 ? 1 : 2});
        }
        st.push_back({"deep_w", 40.0, -15.0, 1});
        st.push_back({"deep_e", 40.0, 15.0, 2});
        SpatialOptions o;
        o.n_trees = 200;
        o.seed = 2;
        o.threads = 1;
        o.bbox = BoundingBox{30.0, 50.0, -20.0, 20.0};
        const auto g = spatial_interpolate(st, o);
        CHECK(g.n_lat == 41);
        CHECK(g.n_lon == 81);
        auto at = [&](double lat, double lon) {
            for (const auto& n : g.nodes)
                if (n.lat == lat && n.lon == lon) return n.label;
            return 0;
        };
        CHECK(at(40.0, -15.0) == 1);
        CHECK(at(40.0, 15.0) == 2);
    }
    SUBCASE("degenerate labels") {
        std::vector<StationLabel> st{{"a", 1.0, 1.0, 1}, {"b", 2.0, 2.0, 1}};
        SpatialOptions o;
        o.n_trees = 10;
        CHECK_THROWS_AS((void)spatial_interpolate(st, o), Error);
    }
}
