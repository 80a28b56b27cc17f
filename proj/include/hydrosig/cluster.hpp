#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hydrosig/extractor.hpp"
#include "hydrosig/forest.hpp"

namespace hydrosig {

struct PamResult {
    std::vector<std::size_t> medoids;  // row indices, in BUILD order
    std::vector<std::size_t> labels;   // index into medoids
    double cost = 0.0;                 // total dissimilarity to assigned medoids
    double build_cost = 0.0;
    std::size_t swaps = 0;
    bool converged = true;  // false when the swap cap was hit
};

/// k-medoids: BUILD then SWAP to a local optimum. Ties go to the lowest index.
[[nodiscard]] PamResult pam(const Eigen::MatrixXd& dissimilarity, std::size_t k, std::size_t max_swaps = 1000);

enum class PartitionMethod { Pam, Hierarchical };

struct ClusterOptions {
    std::size_t k = 5;
    std::size_t n_trees = 5000;
    std::size_t mtry = 0;
    std::uint64_t seed = 0;
    int threads = 0;
    PartitionMethod method = PartitionMethod::Pam;
};

struct ClusterAssignment {
    std::vector<std::string> ids;
    std::vector<int> labels;  // 1..k, numbered by first appearance
    std::vector<std::string> medoid_ids;  // by label; empty for hierarchical
    ClusterOptions options;
    double cost = 0.0;
    bool converged = true;
    double contrast_oob_accuracy = 0.0;
    std::vector<FeatureScore> ranking;  // real-vs-synthetic Gini importance
};

/// Unsupervised forest on real-vs-synthetic rows, then a partition of
/// 1 - proximity over the real rows.
[[nodiscard]] ClusterAssignment unsupervised_cluster(const FeatureMatrix& m, const ClusterOptions& opts);

/// Gini ranking of a fitted contrast forest.
[[nodiscard]] std::vector<FeatureScore> rank_features_for_clustering(const Forest& contrast_forest);

struct StationLabel {
    std::string id;
    double lat = 0.0;
    double lon = 0.0;
    int label = 0;
};

struct BoundingBox {
    double south = 0.0, north = 0.0, west = 0.0, east = 0.0;
};

struct SpatialOptions {
    double grid_step = 0.5;
    double padding = 2.0;
    std::size_t n_trees = 5000;
    std::uint64_t seed = 0;
    int threads = 0;
    std::optional<BoundingBox> bbox;  // default: station hull plus padding
};

struct GridNode {
    double lat = 0.0;
    double lon = 0.0;
    int label = 0;
    std::vector<double> votes;  // by GridPrediction::classes
};

struct GridPrediction {
    BoundingBox bbox;
    double step = 0.0;
    std::size_t n_lat = 0, n_lon = 0;
    std::vector<int> classes;
    std::vector<GridNode> nodes;  // latitude-major, south-west first
};

/// Classification forest on (lat, lon) in raw degrees, evaluated on a
/// regular lattice.
[[nodiscard]] GridPrediction spatial_interpolate(const std::vector<StationLabel>& stations,
                                                 const SpatialOptions& opts);

[[nodiscard]] double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace hydrosig
