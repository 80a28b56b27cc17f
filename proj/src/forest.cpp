#include "hydrosig/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <omp.h>

#include "json.hpp"

#include "hydrosig/error.hpp"
#include "hydrosig/rng.hpp"

namespace hydrosig {

namespace {

using Rng = std::mt19937_64;

std::vector<std::uint32_t> bootstrap_counts(Rng& rng, std::size_t n) {
    std::vector<std::uint32_t> counts(n, 0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n; ++i) ++counts[pick(rng)];
    return counts;
}

std::vector<std::uint32_t> tree_bootstrap(std::uint64_t seed, std::size_t tree, std::size_t n) {
    Rng rng(derive_seed(seed, tree));
    return bootstrap_counts(rng, n);
}

int set_threads(int threads) {
    return threads > 0 ? threads : omp_get_max_threads();
}

// Sum of squared class counts over size; larger is purer.
double purity(const std::vector<std::uint32_t>& counts, std::uint32_t size) {
    double s = 0.0;
    for (auto c : counts) s += static_cast<double>(c) * c;
    return s / size;
}

struct Builder {
    const FeatureMatrix& x;
    const std::vector<std::int32_t>& y;  // class indices
    std::size_t n_classes;
    std::size_t mtry;
    std::size_t min_node;
    ThresholdRule rule;

    Tree tree;
    std::vector<double> importance;

    struct Pending {
        std::int32_t node;
        std::size_t begin, end;
    };

    void grow(std::vector<std::size_t>& samples, Rng& rng) {
        const std::size_t p = x.cols();
        importance.assign(p, 0.0);
        const double n_root = static_cast<double>(samples.size());
        tree.nodes.push_back({});
        std::vector<Pending> stack{{0, 0, samples.size()}};
        std::vector<std::size_t> features(p);
        std::vector<std::pair<double, std::size_t>> column;
        std::vector<std::uint32_t> counts(n_classes), left(n_classes), right(n_classes);

        while (!stack.empty()) {
            const Pending job = stack.back();
            stack.pop_back();
            const auto size = static_cast<std::uint32_t>(job.end - job.begin);
            std::fill(counts.begin(), counts.end(), 0u);
            for (std::size_t i = job.begin; i < job.end; ++i) ++counts[static_cast<std::size_t>(y[samples[i]])];
            TreeNode& node = tree.nodes[static_cast<std::size_t>(job.node)];
            node.size = size;
            node.label = static_cast<std::int32_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());

            const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
            if (pure || size < 2 * min_node) continue;

            const double parent = purity(counts, size);
            double best_gain = 0.0;
            std::int32_t best_feature = -1;
            double best_threshold = 0.0;

            // Candidates in random order; keep drawing past mtry until some
            // feature admits a split.
            std::iota(features.begin(), features.end(), std::size_t{0});
            std::size_t tried = 0;
            for (std::size_t k = 0; k < p; ++k) {
                std::uniform_int_distribution<std::size_t> pick(k, p - 1);
                std::swap(features[k], features[pick(rng)]);
                const std::size_t f = features[k];
                if (tried >= mtry && best_feature >= 0) break;

                column.clear();
                for (std::size_t i = job.begin; i < job.end; ++i) column.emplace_back(x.at(samples[i], f), i);
                std::sort(column.begin(), column.end());
                if (column.front().first == column.back().first) continue;
                ++tried;

                std::fill(left.begin(), left.end(), 0u);
                right = counts;
                double sl = 0.0, sr = 0.0;
                for (std::size_t c = 0; c < n_classes; ++c) sr += static_cast<double>(right[c]) * right[c];
                for (std::size_t j = 0; j + 1 < column.size(); ++j) {
                    const auto c = static_cast<std::size_t>(y[samples[column[j].second]]);
                    sl += 2.0 * left[c] + 1.0;
                    sr -= 2.0 * right[c] - 1.0;
                    ++left[c];
                    --right[c];
                    const double lo = column[j].first, hi = column[j + 1].first;
                    if (lo == hi) continue;
                    const std::size_t nl = j + 1, nr = column.size() - nl;
                    if (nl < min_node || nr < min_node) continue;
                    const double gain = sl / static_cast<double>(nl) + sr / static_cast<double>(nr) - parent;
                    if (gain > best_gain) {
                        best_gain = gain;
                        best_feature = static_cast<std::int32_t>(f);
                        if (rule == ThresholdRule::LowerValue) {
                            best_threshold = lo;
                        } else {
                            const double mid = lo + 0.5 * (hi - lo);
                            best_threshold = mid < hi ? mid : lo;
                        }
                    }
                }
                if (tried >= mtry && best_feature >= 0) break;
            }
            if (best_feature < 0) continue;

            // Weighted impurity decrease equals the purity gain over the root size.
            importance[static_cast<std::size_t>(best_feature)] += best_gain / n_root;

            const auto fcol = static_cast<std::size_t>(best_feature);
            const auto mid_it = std::stable_partition(
                samples.begin() + static_cast<std::ptrdiff_t>(job.begin),
                samples.begin() + static_cast<std::ptrdiff_t>(job.end),
                [&](std::size_t s) { return x.at(s, fcol) <= best_threshold; });
            const auto mid = static_cast<std::size_t>(mid_it - samples.begin());

            const auto li = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes.push_back({});
            tree.nodes.push_back({});
            TreeNode& parent_node = tree.nodes[static_cast<std::size_t>(job.node)];
            parent_node.feature = best_feature;
            parent_node.threshold = best_threshold;
            parent_node.left = li;
            parent_node.right = li + 1;
            stack.push_back({li + 1, mid, job.end});
            stack.push_back({li, job.begin, mid});
        }
    }
};

void check_schema(const Forest& f, const FeatureMatrix& x) {
    if (x.columns != f.features) throw Error(ErrorKind::SchemaMismatch, "columns differ from the training schema");
    if (f.trees.empty()) throw Error(ErrorKind::EmptyMatrix, "forest has no trees");
}

std::vector<std::size_t> leaves(const Tree& t, const FeatureMatrix& x) {
    std::vector<std::size_t> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = t.leaf_of(x.row(r));
    return out;
}

}  // namespace

std::size_t Tree::leaf_of(std::span<const double> row) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        const TreeNode& n = nodes[i];
        i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return i;
}

Forest fit_classifier(const FeatureMatrix& x, const std::vector<int>& y, const ForestOptions& opts) {
    const std::size_t n = x.rows(), p = x.cols();
    if (n == 0 || p == 0) throw Error(ErrorKind::EmptyMatrix, "training matrix is empty");
    if (y.size() != n) throw Error(ErrorKind::SchemaMismatch, "label count differs from row count");
    if (opts.n_trees == 0) throw Error(ErrorKind::InvalidSeries, "n_trees must be positive");
    for (double v : x.values) {
        if (!std::isfinite(v)) throw Error(ErrorKind::Undefined, "training matrix has missing entries");
    }

    Forest f;
    f.features = x.columns;
    f.options = opts;
    f.n_train = n;
    f.classes = y;
    std::sort(f.classes.begin(), f.classes.end());
    f.classes.erase(std::unique(f.classes.begin(), f.classes.end()), f.classes.end());
    if (f.classes.size() < 2) throw Error(ErrorKind::DegenerateLabels, "need at least two classes");
    std::vector<std::int32_t> yi(n);
    for (std::size_t i = 0; i < n; ++i) {
        yi[i] = static_cast<std::int32_t>(std::lower_bound(f.classes.begin(), f.classes.end(), y[i]) -
                                          f.classes.begin());
    }
    f.mtry = opts.mtry > 0 ? std::min(opts.mtry, p)
                           : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p)))));
    const std::size_t min_node = std::max<std::size_t>(1, opts.min_node_size);

    const auto n_trees = static_cast<std::ptrdiff_t>(opts.n_trees);
    f.trees.resize(opts.n_trees);
    std::vector<std::vector<double>> tree_importance(opts.n_trees);

#pragma omp parallel for schedule(dynamic, 1) num_threads(set_threads(opts.threads))
    for (std::ptrdiff_t t = 0; t < n_trees; ++t) {
        Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(t)));
        const auto counts = bootstrap_counts(rng, n);
        std::vector<std::size_t> samples;
        samples.reserve(n);
        for (std::size_t i = 0; i < n; ++i) samples.insert(samples.end(), counts[i], i);
        Builder b{x, yi, f.classes.size(), f.mtry, min_node, opts.threshold, {}, {}};
        b.grow(samples, rng);
        f.trees[static_cast<std::size_t>(t)] = std::move(b.tree);
        tree_importance[static_cast<std::size_t>(t)] = std::move(b.importance);
    }

    f.importance.assign(p, 0.0);
    for (const auto& imp : tree_importance) {
        for (std::size_t j = 0; j < p; ++j) f.importance[j] += imp[j];
    }
    for (double& v : f.importance) v /= static_cast<double>(opts.n_trees);

    // Out-of-bag votes, regenerating each tree's bootstrap from its seed.
    const std::size_t c = f.classes.size();
    std::vector<std::uint32_t> votes(n * c, 0);
    for (std::size_t t = 0; t < opts.n_trees; ++t) {
        const auto counts = tree_bootstrap(opts.seed, t, n);
        const Tree& tree = f.trees[t];
        for (std::size_t i = 0; i < n; ++i) {
            if (counts[i] != 0) continue;
            ++votes[i * c + static_cast<std::size_t>(tree.nodes[tree.leaf_of(x.row(i))].label)];
        }
    }
    std::size_t scored = 0, correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto* v = votes.data() + i * c;
        if (std::accumulate(v, v + c, 0u) == 0) continue;
        ++scored;
        if (static_cast<std::int32_t>(std::max_element(v, v + c) - v) == yi[i]) ++correct;
    }
    f.oob_accuracy = scored == 0 ? std::numeric_limits<double>::quiet_NaN()
                                 : static_cast<double>(correct) / static_cast<double>(scored);
    return f;
}

ForestPrediction predict(const Forest& f, const FeatureMatrix& x) {
    check_schema(f, x);
    const std::size_t n = x.rows(), c = f.classes.size();
    ForestPrediction out;
    out.labels.resize(n);
    out.votes = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c));
    const auto rows = static_cast<std::ptrdiff_t>(n);

#pragma omp parallel for schedule(static) num_threads(set_threads(f.options.threads))
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        std::vector<std::uint32_t> votes(c, 0);
        const auto row = x.row(static_cast<std::size_t>(r));
        for (const Tree& t : f.trees) ++votes[static_cast<std::size_t>(t.nodes[t.leaf_of(row)].label)];
        const auto best = static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
        out.labels[static_cast<std::size_t>(r)] = f.classes[best];
        for (std::size_t k = 0; k < c; ++k) {
            out.votes(r, static_cast<Eigen::Index>(k)) = static_cast<double>(votes[k]) / static_cast<double>(f.trees.size());
        }
    }
    return out;
}

Eigen::MatrixXd proximity(const Forest& f, const FeatureMatrix& x) {
    check_schema(f, x);
    const std::size_t n = x.rows();
    const auto n_trees = static_cast<std::ptrdiff_t>(f.trees.size());
    using Counts = Eigen::Matrix<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic>;
    const int threads = set_threads(f.options.threads);
    std::vector<Counts> partial(static_cast<std::size_t>(threads));

#pragma omp parallel num_threads(threads)
    {
        Counts& acc = partial[static_cast<std::size_t>(omp_get_thread_num())];
        acc = Counts::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        std::vector<std::pair<std::size_t, std::size_t>> by_leaf(n);
#pragma omp for schedule(dynamic, 4)
        for (std::ptrdiff_t t = 0; t < n_trees; ++t) {
            const Tree& tree = f.trees[static_cast<std::size_t>(t)];
            for (std::size_t r = 0; r < n; ++r) by_leaf[r] = {tree.leaf_of(x.row(r)), r};
            std::sort(by_leaf.begin(), by_leaf.end());
            for (std::size_t a = 0; a < n;) {
                std::size_t b = a;
                while (b < n && by_leaf[b].first == by_leaf[a].first) ++b;
                for (std::size_t i = a; i < b; ++i) {
                    for (std::size_t j = i; j < b; ++j) {
                        ++acc(static_cast<Eigen::Index>(by_leaf[i].second), static_cast<Eigen::Index>(by_leaf[j].second));
                    }
                }
                a = b;
            }
        }
    }

    Counts total = Counts::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& p : partial) {
        if (p.size() != 0) total += p;
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const auto n_used = static_cast<double>(f.trees.size());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
            // Only one orientation of each pair was counted.
            out(i, j) = static_cast<double>(i == j ? total(i, i) : total(i, j) + total(j, i)) / n_used;
        }
    }
    return out;
}

Eigen::MatrixXd proximity_serial(const Forest& f, const FeatureMatrix& x) {
    check_schema(f, x);
    const std::size_t n = x.rows();
    std::vector<std::vector<std::size_t>> leaf(f.trees.size());
    for (std::size_t t = 0; t < f.trees.size(); ++t) leaf[t] = leaves(f.trees[t], x);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t same = 0;
            for (const auto& l : leaf) same += l[i] == l[j] ? 1 : 0;
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                static_cast<double>(same) / static_cast<double>(f.trees.size());
        }
    }
    return out;
}

std::vector<FeatureScore> gini_importance(const Forest& f) {
    std::vector<FeatureScore> out;
    for (std::size_t j = 0; j < f.features.size(); ++j) out.push_back({f.features[j], j, f.importance[j]});
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
    return out;
}

ContrastData synthetic_contrast(const FeatureMatrix& x, std::uint64_t seed) {
    const std::size_t n = x.rows(), p = x.cols();
    if (n == 0 || p == 0) throw Error(ErrorKind::EmptyMatrix, "contrast needs a non-empty matrix");
    ContrastData out;
    out.x.columns = x.columns;
    out.x.ids = x.ids;
    out.x.values = x.values;
    out.x.values.resize(2 * n * p);
    out.y.assign(n, 1);
    out.y.resize(2 * n, 2);
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t r = 0; r < n; ++r) {
        out.x.ids.push_back("synthetic_" + std::to_string(r + 1));
        for (std::size_t c = 0; c < p; ++c) out.x.at(n + r, c) = x.at(pick(rng), c);
    }
    return out;
}

namespace {
constexpr int kForestFormatVersion = 1;
}

std::string forest_to_json(const Forest& f) {
    nlohmann::json j;
    j["format"] = "hydrosig-forest";
    j["version"] = kForestFormatVersion;
    j["features"] = f.features;
    j["classes"] = f.classes;
    j["n_trees"] = f.options.n_trees;
    j["mtry"] = f.mtry;
    j["min_node_size"] = f.options.min_node_size;
    j["seed"] = f.options.seed;
    j["threshold_rule"] = f.options.threshold == ThresholdRule::Midpoint ? "midpoint" : "lower";
    j["n_train"] = f.n_train;
    j["importance"] = f.importance;
    j["oob_accuracy"] = std::isfinite(f.oob_accuracy) ? nlohmann::json(f.oob_accuracy) : nlohmann::json();
    auto& trees = j["trees"] = nlohmann::json::array();
    for (const Tree& t : f.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const TreeNode& n : t.nodes) {
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.label, n.size});
        }
        trees.push_back(std::move(nodes));
    }
    return j.dump();
}

Forest forest_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedLine, std::string("forest container: ") + e.what());
    }
    if (j.value("format", "") != "hydrosig-forest" || j.value("version", 0) != kForestFormatVersion) {
        throw Error(ErrorKind::SchemaMismatch, "unsupported forest container");
    }
    try {
        Forest f;
        f.features = j.at("features").get<std::vector<std::string>>();
        f.classes = j.at("classes").get<std::vector<int>>();
        f.options.n_trees = j.at("n_trees").get<std::size_t>();
        f.mtry = j.at("mtry").get<std::size_t>();
        f.options.mtry = f.mtry;
        f.options.min_node_size = j.at("min_node_size").get<std::size_t>();
        f.options.seed = j.at("seed").get<std::uint64_t>();
        f.options.threshold =
            j.at("threshold_rule").get<std::string>() == "midpoint" ? ThresholdRule::Midpoint : ThresholdRule::LowerValue;
        f.n_train = j.at("n_train").get<std::size_t>();
        f.importance = j.at("importance").get<std::vector<double>>();
        f.oob_accuracy = j.at("oob_accuracy").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                        : j.at("oob_accuracy").get<double>();
        for (const auto& nodes : j.at("trees")) {
            Tree t;
            for (const auto& n : nodes) {
                t.nodes.push_back({n.at(0).get<std::int32_t>(), n.at(1).get<double>(), n.at(2).get<std::int32_t>(),
                                   n.at(3).get<std::int32_t>(), n.at(4).get<std::int32_t>(),
                                   n.at(5).get<std::uint32_t>()});
            }
            f.trees.push_back(std::move(t));
        }
        if (f.trees.size() != f.options.n_trees || f.importance.size() != f.features.size()) {
            throw Error(ErrorKind::SchemaMismatch, "forest container is inconsistent");
        }
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SchemaMismatch, std::string("forest container: ") + e.what());
    }
}

}  // namespace hydrosig
