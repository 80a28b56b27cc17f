#include "hydrosig/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "hydrosig/error.hpp"
#include "hydrosig/rng.hpp"
#include "hydrosig/statlearn.hpp"

namespace hydrosig {

namespace {

struct Nearest {
    std::vector<double> first, second;
    std::vector<std::size_t> owner;  // position in medoids
};

Nearest nearest(const Eigen::MatrixXd& d, const std::vector<std::size_t>& medoids) {
    const auto n = static_cast<std::size_t>(d.rows());
    constexpr double inf = std::numeric_limits<double>::infinity();
    Nearest out{std::vector<double>(n, inf), std::vector<double>(n, inf), std::vector<std::size_t>(n, 0)};
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t m = 0; m < medoids.size(); ++m) {
            const double v = d(static_cast<Eigen::Index>(medoids[m]), static_cast<Eigen::Index>(j));
            if (v < out.first[j]) {
                out.second[j] = out.first[j];
                out.first[j] = v;
                out.owner[j] = m;
            } else if (v < out.second[j]) {
                out.second[j] = v;
            }
        }
    }
    return out;
}

double total(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

PamResult pam(const Eigen::MatrixXd& d, std::size_t k, std::size_t max_swaps) {
    validate_dissimilarity(d);
    const auto n = static_cast<std::size_t>(d.rows());
    if (k == 0 || k > n) throw Error(ErrorKind::MalformedDissimilarity, "k must lie in 1..n");

    PamResult res;
    std::vector<bool> is_medoid(n, false);
    std::vector<double> dn(n, std::numeric_limits<double>::infinity());

    // BUILD
    while (res.medoids.size() < k) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t pick = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (is_medoid[i]) continue;
            double score = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double dij = d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                score += res.medoids.empty() ? -dij : std::max(dn[j] - dij, 0.0);
            }
            if (score > best) {
                best = score;
                pick = i;
            }
        }
        is_medoid[pick] = true;
        res.medoids.push_back(pick);
        for (std::size_t j = 0; j < n; ++j) {
            dn[j] = std::min(dn[j], d(static_cast<Eigen::Index>(pick), static_cast<Eigen::Index>(j)));
        }
    }
    Nearest near = nearest(d, res.medoids);
    res.build_cost = total(near.first);

    // SWAP
    const double tol = 1e-12 * std::max(1.0, res.build_cost);
    for (;;) {
        if (res.swaps >= max_swaps) {
            res.converged = false;
            break;
        }
        double best_delta = -tol;
        std::size_t best_m = k, best_o = n;
        for (std::size_t m = 0; m < k; ++m) {
            for (std::size_t o = 0; o < n; ++o) {
                if (is_medoid[o]) continue;
                double delta = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double doj = d(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(j));
                    const double now = near.first[j];
                    const double after = near.owner[j] == m ? std::min(doj, near.second[j]) : std::min(now, doj);
                    delta += after - now;
                }
                if (delta < best_delta) {
                    best_delta = delta;
                    best_m = m;
                    best_o = o;
                }
            }
        }
        if (best_m == k) break;
        is_medoid[res.medoids[best_m]] = false;
        is_medoid[best_o] = true;
        res.medoids[best_m] = best_o;
        near = nearest(d, res.medoids);
        ++res.swaps;
    }
    res.labels = near.owner;
    res.cost = total(near.first);
    return res;
}

std::vector<FeatureScore> rank_features_for_clustering(const Forest& contrast_forest) {
    return gini_importance(contrast_forest);
}

ClusterAssignment unsupervised_cluster(const FeatureMatrix& m, const ClusterOptions& opts) {
    const std::size_t n = m.rows();
    if (n == 0) throw Error(ErrorKind::EmptyMatrix, "no rows to cluster");
    if (m.missing_count() != 0) throw Error(ErrorKind::Undefined, "matrix has missing entries; impute first");
    if (opts.k == 0 || opts.k > n) throw Error(ErrorKind::InvalidSeries, "k must lie in 1..rows");

    const ContrastData contrast = synthetic_contrast(m, derive_seed(opts.seed, 1));
    ForestOptions fo;
    fo.n_trees = opts.n_trees;
    fo.mtry = opts.mtry;
    fo.seed = derive_seed(opts.seed, 2);
    fo.threshold = ThresholdRule::LowerValue;
    fo.threads = opts.threads;
    const Forest forest = fit_classifier(contrast.x, contrast.y, fo);

    const Eigen::MatrixXd prox = proximity(forest, m);
    Eigen::MatrixXd dis = (1.0 - prox.array()).matrix();
    dis.diagonal().setZero();

    ClusterAssignment out;
    out.ids = m.ids;
    out.options = opts;
    out.contrast_oob_accuracy = forest.oob_accuracy;
    out.ranking = rank_features_for_clustering(forest);

    std::vector<std::size_t> raw;
    std::vector<std::size_t> medoids;
    if (opts.method == PartitionMethod::Pam) {
        const PamResult p = pam(dis, opts.k);
        raw = p.labels;
        medoids = p.medoids;
        out.cost = p.cost;
        out.converged = p.converged;
    } else {
        raw = hclust_cut(dis, opts.k);
    }

    std::map<std::size_t, int> relabel;
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = relabel.try_emplace(raw[i], static_cast<int>(relabel.size()) + 1).first;
        out.labels[i] = it->second;
    }
    if (!medoids.empty()) {
        out.medoid_ids.resize(opts.k);
        for (std::size_t g = 0; g < medoids.size(); ++g) {
            const auto it = relabel.find(g);
            if (it != relabel.end()) out.medoid_ids[static_cast<std::size_t>(it->second - 1)] = m.ids[medoids[g]];
        }
    }
    return out;
}

GridPrediction spatial_interpolate(const std::vector<StationLabel>& stations, const SpatialOptions& opts) {
    if (!(opts.grid_step > 0.0)) throw Error(ErrorKind::InvalidSeries, "grid step must be positive");
    if (stations.empty()) throw Error(ErrorKind::EmptyMatrix, "no stations");

    FeatureMatrix train;
    train.columns = {"lat", "lon"};
    std::vector<int> y;
    for (const auto& s : stations) {
        if (!(std::abs(s.lat) <= 90.0) || !(std::abs(s.lon) <= 180.0)) {
            throw Error(ErrorKind::CoordinateOutOfRange, "station " + s.id);
        }
        train.ids.push_back(s.id);
        train.values.push_back(s.lat);
        train.values.push_back(s.lon);
        y.push_back(s.label);
    }

    ForestOptions fo;
    fo.n_trees = opts.n_trees;
    fo.seed = opts.seed;
    fo.threads = opts.threads;
    fo.threshold = ThresholdRule::Midpoint;
    const Forest forest = fit_classifier(train, y, fo);

    GridPrediction grid;
    grid.step = opts.grid_step;
    grid.classes = forest.classes;
    if (opts.bbox) {
        grid.bbox = *opts.bbox;
    } else {
        BoundingBox b{90.0, -90.0, 180.0, -180.0};
        for (const auto& s : stations) {
            b.south = std::min(b.south, s.lat);
            b.north = std::max(b.north, s.lat);
            b.west = std::min(b.west, s.lon);
            b.east = std::max(b.east, s.lon);
        }
        grid.bbox = {std::max(-90.0, b.south - opts.padding), std::min(90.0, b.north + opts.padding),
                     std::max(-180.0, b.west - opts.padding), std::min(180.0, b.east + opts.padding)};
    }
    const BoundingBox& b = grid.bbox;
    if (!(b.north >= b.south) || !(b.east >= b.west)) throw Error(ErrorKind::CoordinateOutOfRange, "empty bounding box");
    grid.n_lat = static_cast<std::size_t>(std::floor((b.north - b.south) / opts.grid_step + 1e-9)) + 1;
    grid.n_lon = static_cast<std::size_t>(std::floor((b.east - b.west) / opts.grid_step + 1e-9)) + 1;

    FeatureMatrix lattice;
    lattice.columns = train.columns;
    lattice.ids.resize(grid.n_lat * grid.n_lon);
    lattice.values.reserve(2 * lattice.ids.size());
    for (std::size_t i = 0; i < grid.n_lat; ++i) {
        for (std::size_t j = 0; j < grid.n_lon; ++j) {
            lattice.values.push_back(b.south + static_cast<double>(i) * opts.grid_step);
            lattice.values.push_back(b.west + static_cast<double>(j) * opts.grid_step);
        }
    }
    const ForestPrediction pred = predict(forest, lattice);
    grid.nodes.resize(lattice.rows());
    for (std::size_t r = 0; r < lattice.rows(); ++r) {
        GridNode& node = grid.nodes[r];
        node.lat = lattice.at(r, 0);
        node.lon = lattice.at(r, 1);
        node.label = pred.labels[r];
        node.votes.resize(grid.classes.size());
        for (std::size_t c = 0; c < grid.classes.size(); ++c) {
            node.votes[c] = pred.votes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return grid;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw Error(ErrorKind::SchemaMismatch, "partitions differ in length");
    const std::size_t n = a.size();
    if (n < 2) return 1.0;
    std::map<std::pair<int, int>, double> table;
    std::map<int, double> ra, rb;
    for (std::size_t i = 0; i < n; ++i) {
        table[{a[i], b[i]}] += 1.0;
        ra[a[i]] += 1.0;
        rb[b[i]] += 1.0;
    }
    auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
    double index = 0.0, sa = 0.0, sb = 0.0;
    for (const auto& [key, c] : table) index += pairs(c);
    for (const auto& [key, c] : ra) sa += pairs(c);
    for (const auto& [key, c] : rb) sb += pairs(c);
    const double expected = sa * sb / pairs(static_cast<double>(n));
    const double top = 0.5 * (sa + sb);
    if (top == expected) return 1.0;
    return (index - expected) / (top - expected);
}

}  // namespace hydrosig
