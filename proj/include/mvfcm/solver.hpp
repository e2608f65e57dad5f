#pragma once

#include "mvfcm/dataset.hpp"
#include "mvfcm/solver_types.hpp"

#include <functional>
#include <span>
#include <vector>

namespace mvfcm {

struct SolverConfig {
    int k = 2;
    double gamma = 0.5;     ///< in [0, 1)
    double m = 1.5;         ///< fuzzifier, > 1
    double epsilon = 1e-5;  ///< stop once the Frobenius norm of the membership change drops below this
    int max_iter = 100;
    DistanceKind measure = DistanceKind::squared_euclidean;
    /// Worker threads for the per-object and per-(view, cluster) loops.
    /// Results are bitwise independent of this value.
    int threads = 1;

    /// Throws InvalidInput on an out-of-range field.
    void validate() const;
};

struct ClusteringResult {
    std::vector<int> labels;
    FuzzyPartition partition;
    CentroidSet centroids;
    ViewWeights weights;
    Eigen::VectorXd effective_weights;  ///< alpha^gamma
    Eigen::VectorXd per_view_cost;      ///< Q^(p) at the final state
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
    /// Clusters that lost all membership at some point and kept their previous centroid.
    std::vector<int> degenerate_clusters;
};

/// State handed to an observer after each full sweep.
struct IterationSnapshot {
    int iteration;  ///< 1-based
    const FuzzyPartition& partition;
    const CentroidSet& centroids;
    const ViewWeights& weights;
    const Eigen::VectorXd& per_view_cost;
    double objective;
    double change;  ///< Frobenius norm of the membership change in this sweep
};

using IterationObserver = std::function<void(const IterationSnapshot&)>;

/// Q^(p) = sum_c sum_i u_ci^m d(x_i, v_c) for one view.
double view_cost(const FuzzyPartition& partition, const RowMatrix& centroids, const RowMatrix& data, double m,
                 DistanceKind measure);

/// Q^(p) for every view.
Eigen::VectorXd view_costs(const FuzzyPartition& partition, const CentroidSet& centroids,
                           const MultiViewDataset& dataset, const SolverConfig& config);

/// sum_p (alpha^(p))^gamma Q^(p).
double weighted_cost(std::span<const double> alpha, double gamma, std::span<const double> costs);

double objective(const FuzzyPartition& partition, const CentroidSet& centroids, const ViewWeights& weights,
                 const MultiViewDataset& dataset, const SolverConfig& config);

/// Closed-form membership of one object given its weighted distance a_c to
/// every cluster: u_c = 1 / sum_j (a_c / a_j)^(1/(m-1)). When some a_c are
/// zero, those clusters share the membership equally and the rest get 0.
void memberships_from_distances(std::span<const double> distances, double m, std::span<double> out);

/// Membership step with centroids and weights held fixed.
FuzzyPartition update_membership(const CentroidSet& centroids, const ViewWeights& weights,
                                 const MultiViewDataset& dataset, const SolverConfig& config);

struct CentroidUpdate {
    CentroidSet centroids;
    std::vector<int> degenerate;  ///< clusters whose membership mass was zero
};

/// Centroid step: membership^m weighted means per view and cluster. No view
/// weight enters. A cluster with zero mass keeps its centroid from `previous`.
CentroidUpdate update_centroids(const FuzzyPartition& partition, const MultiViewDataset& dataset,
                                const SolverConfig& config, const CentroidSet& previous);

/// Weight step: alpha^(p) = [sum_j (Q^(p)/Q^(j))^(1/(gamma-1))]^-1, with each
/// cost clamped to at least 1e-12. Maximizes the weighted cost over the simplex.
ViewWeights update_view_weights(std::span<const double> per_view_cost, double gamma);

/// Per-object argmax over clusters, lowest index on ties.
std::vector<int> harden(const FuzzyPartition& partition);

/// Alternates membership, centroid and weight updates until the membership
/// change falls below epsilon or max_iter sweeps have run. Throws
/// NumericalError if a non-finite value appears.
ClusteringResult fit(const MultiViewDataset& dataset, const SolverConfig& config, const InitialState& initial,
                     const IterationObserver& observer = {});

}  // namespace mvfcm
