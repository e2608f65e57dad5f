#pragma once

#include "mvfcm/common.hpp"
#include "mvfcm/distance.hpp"

#include <vector>

namespace mvfcm {

/// K x N consensus memberships; column i is object i's distribution over clusters.
struct FuzzyPartition {
    Eigen::MatrixXd u;

    Index clusters() const { return u.rows(); }
    Index objects() const { return u.cols(); }
};

/// Per view, a K x D^(p) matrix whose row c is centroid c.
struct CentroidSet {
    std::vector<RowMatrix> views;
};

/// Simplex weights alpha and the exponent gamma; a view's cost is multiplied by alpha^gamma.
struct ViewWeights {
    Eigen::VectorXd alpha;
    double gamma = 0.0;

    Eigen::VectorXd effective() const { return alpha.array().pow(gamma).matrix(); }
};

struct InitialState {
    CentroidSet centroids;
    ViewWeights weights;
};

}  // namespace mvfcm
