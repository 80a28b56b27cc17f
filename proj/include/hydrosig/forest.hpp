#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hydrosig/extractor.hpp"

namespace hydrosig {

enum class ThresholdRule {
    Midpoint,    // halfway between adjacent sorted values
    LowerValue,  // the lower of the two; partitions then depend on ranks only
};

struct ForestOptions {
    std::size_t n_trees = 5000;
    std::size_t mtry = 0;  // 0: floor(sqrt(p))
    std::size_t min_node_size = 1;
    std::uint64_t seed = 0;
    ThresholdRule threshold = ThresholdRule::Midpoint;
    int threads = 0;  // 0: OpenMP default
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // x <= threshold goes left
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t label = -1;    // leaf: majority class index
    std::uint32_t size = 0;     // training samples reaching the node
};

struct Tree {
    std::vector<TreeNode> nodes;  // root at 0

    [[nodiscard]] std::size_t leaf_of(std::span<const double> row) const;
};

struct Forest {
    std::vector<std::string> features;
    std::vector<int> classes;  // sorted distinct labels
    std::vector<Tree> trees;
    ForestOptions options;
    std::size_t mtry = 0;
    std::size_t n_train = 0;
    std::vector<double> importance;  // mean Gini decrease per feature
    double oob_accuracy = 0.0;        // NaN when no row was ever out of bag
};

struct ForestPrediction {
    std::vector<int> labels;
    Eigen::MatrixXd votes;  // rows x classes, each row sums to 1
};

struct FeatureScore {
    std::string feature;
    std::size_t index = 0;
    double score = 0.0;
};

struct ContrastData {
    FeatureMatrix x;     // real rows followed by synthetic rows
    std::vector<int> y;  // 1 real, 2 synthetic
};

[[nodiscard]] Forest fit_classifier(const FeatureMatrix& x, const std::vector<int>& y, const ForestOptions& opts);

[[nodiscard]] ForestPrediction predict(const Forest& f, const FeatureMatrix& x);

/// Co-leaf frequency over all trees; parallel over trees.
[[nodiscard]] Eigen::MatrixXd proximity(const Forest& f, const FeatureMatrix& x);

/// Pairwise reference implementation of proximity().
[[nodiscard]] Eigen::MatrixXd proximity_serial(const Forest& f, const FeatureMatrix& x);

/// Descending importance; ties keep feature order.
[[nodiscard]] std::vector<FeatureScore> gini_importance(const Forest& f);

/// Real rows plus the same number of rows drawn column-wise from the
/// empirical marginals.
[[nodiscard]] ContrastData synthetic_contrast(const FeatureMatrix& x, std::uint64_t seed);

/// Versioned JSON container.
[[nodiscard]] std::string forest_to_json(const Forest& f);
[[nodiscard]] Forest forest_from_json(std::string_view text);

}  // namespace hydrosig
