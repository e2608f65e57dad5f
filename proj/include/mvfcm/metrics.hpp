#pragma once

#include "mvfcm/common.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mvfcm {

/// counts(c, p): objects in cluster c and class p.
struct ContingencyTable {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;

    Index clusters() const { return counts.rows(); }
    Index classes() const { return counts.cols(); }
    std::int64_t total() const { return counts.sum(); }
    std::int64_t cluster_size(Index c) const { return counts.row(c).sum(); }
    std::int64_t class_size(Index p) const { return counts.col(p).sum(); }
};

struct EvaluationReport {
    double accuracy = 0.0;
    double nmi = 0.0;
    double f_measure = 0.0;
    /// matching[c] is the class matched to cluster c, or -1 if it was left unmatched.
    std::vector<int> matching;
};

/// Table sized (max label + 1) x (max truth + 1). Throws InvalidInput on a
/// length mismatch or a negative id.
ContingencyTable contingency(std::span<const int> labels, std::span<const int> truth);

/// Normalized mutual information with natural logs. 0 if either side has a
/// single nonempty group, except that one cluster against one class scores 1.
double nmi(const ContingencyTable& table);

/// Class-size weighted average of the best per-class F score over clusters.
double f_measure(const ContingencyTable& table);

struct AccuracyResult {
    double accuracy = 0.0;
    std::vector<int> matching;
};

/// Fraction of objects covered by the best one-to-one cluster/class matching.
AccuracyResult accuracy(const ContingencyTable& table);

/// Exact minimum-cost perfect matching on a square matrix (Hungarian method,
/// O(n^3)). Returns assignment[row] = column.
std::vector<int> optimal_assignment(const Eigen::MatrixXd& cost);

EvaluationReport evaluate(std::span<const int> labels, std::span<const int> truth);

}  // namespace mvfcm
