#include "hydrosig/statlearn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

namespace hydrosig {

namespace {

Eigen::MatrixXd to_eigen(const FeatureMatrix& m) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double v = m.at(r, c);
            if (!std::isfinite(v)) throw Error(ErrorKind::Undefined, "matrix has missing entries; impute first");
            a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }
    return a;
}

}  // namespace

AutoscaleResult autoscale(const FeatureMatrix& m) {
    if (m.rows() < 2) throw Error(ErrorKind::EmptyMatrix, "autoscaling needs two rows");
    AutoscaleResult out;
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        const auto col = m.column(c);
        for (double v : col) {
            if (!std::isfinite(v)) throw Error(ErrorKind::Undefined, "matrix has missing entries; impute first");
        }
        if (is_degenerate(col)) {
            out.dropped.push_back(m.columns[c]);
        } else {
            keep.push_back(c);
        }
    }
    if (keep.empty()) throw Error(ErrorKind::AllConstantColumns, "every column is constant");

    FeatureMatrix& s = out.matrix;
    s.ids = m.ids;
    for (std::size_t c : keep) s.columns.push_back(m.columns[c]);
    s.values.resize(m.rows() * keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
        const auto col = m.column(keep[k]);
        const double mu = mean(col), sd = stddev(col);
        for (std::size_t r = 0; r < m.rows(); ++r) s.at(r, k) = (col[r] - mu) / sd;
    }
    return out;
}

PcaResult pca(const FeatureMatrix& m) {
    if (m.rows() < 2) throw Error(ErrorKind::EmptyMatrix, "PCA needs two rows");
    Eigen::MatrixXd a = to_eigen(m);
    a.rowwise() -= a.colwise().mean();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const Eigen::Index k = sv.size();

    PcaResult res;
    res.features = m.columns;
    res.loadings = svd.matrixV().leftCols(k);
    res.scores = svd.matrixU().leftCols(k) * sv.asDiagonal();
    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::Index arg = 0;
        res.loadings.col(j).cwiseAbs().maxCoeff(&arg);
        if (res.loadings(arg, j) < 0) {
            res.loadings.col(j) *= -1.0;
            res.scores.col(j) *= -1.0;
        }
    }
    res.eigenvalues = sv.array().square() / static_cast<double>(m.rows() - 1);
    const double total = res.eigenvalues.sum();
    if (!(total > 0.0)) throw Error(ErrorKind::RankDeficient, "centred matrix is zero");
    res.variance_explained = res.eigenvalues / total;
    res.contributions = 100.0 * res.loadings.array().square();
    return res;
}

CorrelationReport correlation_report(const FeatureMatrix& m, double alpha) {
    const std::size_t n = m.rows();
    if (n < 4) throw Error(ErrorKind::TooShort, "correlation report needs four rows");
    Eigen::MatrixXd a = to_eigen(m);
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const auto col = m.column(static_cast<std::size_t>(c));
        if (is_degenerate(col)) {
            throw Error(ErrorKind::ZeroVarianceColumn, "column " + m.columns[static_cast<std::size_t>(c)]);
        }
        const double mu = a.col(c).mean();
        a.col(c).array() -= mu;
        a.col(c) /= a.col(c).norm();
    }

    CorrelationReport rep;
    rep.features = m.columns;
    rep.alpha = alpha;
    rep.r = a.transpose() * a;
    const Eigen::Index p = rep.r.rows();
    rep.p.resize(p, p);
    const double dof = static_cast<double>(n - 2);
    boost::math::students_t dist(dof);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            double r = i == j ? 1.0 : std::clamp(rep.r(i, j), -1.0, 1.0);
            if (i != j) r = std::clamp(0.5 * (rep.r(i, j) + rep.r(j, i)), -1.0, 1.0);
            rep.r(i, j) = r;
            if (std::abs(r) >= 1.0) {
                rep.p(i, j) = 0.0;
                continue;
            }
            const double t = std::abs(r) * std::sqrt(dof / (1.0 - r * r));
            rep.p(i, j) = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
        }
    }
    Eigen::MatrixXd dissimilarity = (1.0 - rep.r.array()).matrix();
    dissimilarity.diagonal().setZero();
    rep.order = hclust_order(dissimilarity);
    return rep;
}

void validate_dissimilarity(const Eigen::MatrixXd& d) {
    if (d.rows() != d.cols()) throw Error(ErrorKind::MalformedDissimilarity, "matrix is not square");
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        if (d(i, i) != 0.0) throw Error(ErrorKind::MalformedDissimilarity, "non-zero diagonal");
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
            if (!(d(i, j) >= 0.0) || std::abs(d(i, j) - d(j, i)) > 1e-12 * (1.0 + std::abs(d(i, j)))) {
                throw Error(ErrorKind::MalformedDissimilarity, "matrix must be symmetric and non-negative");
            }
        }
    }
}

namespace {

// Agglomerates until `groups` clusters remain. Active clusters are keyed by
// their smallest member, so ties resolve towards the lowest indices and the
// lower-keyed side of a merge comes first in leaf order.
std::vector<std::vector<std::size_t>> complete_linkage(const Eigen::MatrixXd& d, std::size_t groups) {
    validate_dissimilarity(d);
    const auto n = static_cast<std::size_t>(d.rows());
    std::vector<std::vector<std::size_t>> members(n);
    for (std::size_t i = 0; i < n; ++i) members[i] = {i};
    std::vector<std::size_t> active(n);
    std::iota(active.begin(), active.end(), std::size_t{0});
    Eigen::MatrixXd dist = d;

    while (active.size() > std::max<std::size_t>(groups, 1)) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 1;
        for (std::size_t a = 0; a < active.size(); ++a) {
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                const double v = dist(active[a], active[b]);
                if (v < best) {
                    best = v;
                    bi = a;
                    bj = b;
                }
            }
        }
        const std::size_t keep = active[bi], gone = active[bj];
        for (std::size_t other : active) {
            if (other == keep || other == gone) continue;
            const double v = std::max(dist(keep, other), dist(gone, other));
            dist(keep, other) = dist(other, keep) = v;
        }
        members[keep].insert(members[keep].end(), members[gone].begin(), members[gone].end());
        members[gone].clear();
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t a : active) out.push_back(std::move(members[a]));
    return out;
}

}  // namespace

std::vector<std::size_t> hclust_order(const Eigen::MatrixXd& d) {
    auto groups = complete_linkage(d, 1);
    return groups.empty() ? std::vector<std::size_t>{} : groups.front();
}

std::vector<std::size_t> hclust_cut(const Eigen::MatrixXd& d, std::size_t k) {
    if (k == 0 || k > static_cast<std::size_t>(d.rows())) {
        throw Error(ErrorKind::MalformedDissimilarity, "cluster count out of range");
    }
    const auto groups = complete_linkage(d, k);
    std::vector<std::size_t> labels(static_cast<std::size_t>(d.rows()));
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t i : groups[g]) labels[i] = g;
    }
    return labels;
}

}  // namespace hydrosig
