#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hydrosig/extractor.hpp"

namespace hydrosig {

struct AutoscaleResult {
    FeatureMatrix matrix;
    std::vector<std::string> dropped;  // zero-variance columns removed before scaling
};

/// Column-wise mean 0 / sd 1 (n-1). Input must be complete.
[[nodiscard]] AutoscaleResult autoscale(const FeatureMatrix& m);

struct PcaResult {
    std::vector<std::string> features;
    Eigen::MatrixXd loadings;           // features x components, orthonormal columns
    Eigen::VectorXd eigenvalues;        // non-increasing
    Eigen::VectorXd variance_explained; // eigenvalues / their sum
    Eigen::MatrixXd contributions;      // 100 * loading^2, each column sums to 100
    Eigen::MatrixXd scores;             // rows x components
};

/// PCA by SVD of the column-centred matrix. Each component's sign makes its
/// largest-magnitude loading positive.
[[nodiscard]] PcaResult pca(const FeatureMatrix& m);

struct CorrelationReport {
    std::vector<std::string> features;
    Eigen::MatrixXd r;
    Eigen::MatrixXd p;               // two-sided t-test p-values, n-2 dof
    std::vector<std::size_t> order;  // complete-linkage leaf order on 1 - r
    double alpha = 0.05;

    [[nodiscard]] bool significant(std::size_t i, std::size_t j) const { return p(i, j) < alpha; }
};

[[nodiscard]] CorrelationReport correlation_report(const FeatureMatrix& m, double alpha = 0.05);

/// Leaf order of complete-linkage agglomerative clustering. Ties merge the
/// pair with the lowest indices; the cluster holding the lower index is
/// placed first.
[[nodiscard]] std::vector<std::size_t> hclust_order(const Eigen::MatrixXd& dissimilarity);

/// Complete-linkage tree cut into k groups; labels 0..k-1 in order of each
/// group's smallest member.
[[nodiscard]] std::vector<std::size_t> hclust_cut(const Eigen::MatrixXd& dissimilarity, std::size_t k);

/// Throws MalformedDissimilarity unless square, symmetric, non-negative
/// with a zero diagonal.
void validate_dissimilarity(const Eigen::MatrixXd& d);

}  // namespace hydrosig
