#include "mvfcm/init.hpp"

#include <limits>
#include <string>

namespace mvfcm {

namespace {

/// Sum over all rows j of d(x_i, x_j), for every i, in O(N D).
Eigen::VectorXd total_distances(const RowMatrix& x, DistanceKind measure) {
    const Index n = x.rows();
    const auto count = static_cast<double>(n);
    Eigen::VectorXd totals(n);
    if (measure == DistanceKind::squared_euclidean) {
        // sum_j |x_i - x_j|^2 = N |x_i|^2 - 2 x_i . S + sum_j |x_j|^2
        const Eigen::RowVectorXd column_sums = x.colwise().sum();
        const Eigen::VectorXd norms = x.rowwise().squaredNorm();
        const double norm_total = norms.sum();
        for (Index i = 0; i < n; ++i) {
            totals(i) = count * norms(i) - 2.0 * x.row(i).dot(column_sums) + norm_total;
        }
        return totals;
    }
    // Cosine: 1 - xhat_i . xhat_j for nonzero pairs, 1 whenever either row is zero.
    Eigen::RowVectorXd unit_sum = Eigen::RowVectorXd::Zero(x.cols());
    std::vector<double> norms(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        norms[static_cast<std::size_t>(i)] = x.row(i).norm();
        if (norms[static_cast<std::size_t>(i)] > 0.0) unit_sum += x.row(i) / norms[static_cast<std::size_t>(i)];
    }
    for (Index i = 0; i < n; ++i) {
        const double norm = norms[static_cast<std::size_t>(i)];
        totals(i) = norm > 0.0 ? count - x.row(i).dot(unit_sum) / norm : count;
    }
    return totals;
}

}  // namespace

std::vector<Index> select_initial_indices(const RowMatrix& view, int k, DistanceKind measure) {
    const Index n = view.rows();
    if (k < 1) throw InvalidInput("K must be at least 1");
    if (k > n) throw InvalidInput("K exceeds N (" + std::to_string(k) + " > " + std::to_string(n) + ")");

    // The O(N D) totals only shortlist rows; shortlisted rows are re-summed
    // pairwise so that exact ties resolve to the lowest index.
    const Eigen::VectorXd totals = total_distances(view, measure);
    const double scale = measure == DistanceKind::cosine ? 1.0 : view.rowwise().squaredNorm().maxCoeff();
    const double slack = 1e-13 * static_cast<double>(n + view.cols()) * static_cast<double>(n) * scale;
    const double cutoff = totals.minCoeff() + slack;
    Index first = -1;
    double first_total = 0.0;
    for (Index j = 0; j < n; ++j) {
        if (totals(j) > cutoff) continue;
        double exact = 0.0;
        for (Index i = 0; i < n; ++i) exact += squared_distance_unchecked(row_span(view, j), row_span(view, i), measure);
        if (first < 0 || exact < first_total) {
            first = j;
            first_total = exact;
        }
    }

    std::vector<Index> chosen{first};
    chosen.reserve(static_cast<std::size_t>(k));
    // nearest[i] < 0 marks a chosen row.
    Eigen::VectorXd nearest = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    nearest(first) = -1.0;
    Index last = first;
    while (static_cast<int>(chosen.size()) < k) {
        Index best = -1;
        for (Index i = 0; i < n; ++i) {
            if (nearest(i) < 0.0) continue;
            nearest(i) = std::min(nearest(i), squared_distance_unchecked(row_span(view, i), row_span(view, last), measure));
            if (best < 0 || nearest(i) > nearest(best)) best = i;
        }
        chosen.push_back(best);
        nearest(best) = -1.0;
        last = best;
    }
    return chosen;
}

RowMatrix select_initial_centroids(const RowMatrix& view, int k, DistanceKind measure) {
    const auto indices = select_initial_indices(view, k, measure);
    RowMatrix centroids(k, view.cols());
    for (std::size_t c = 0; c < indices.size(); ++c) {
        centroids.row(static_cast<Index>(c)) = view.row(indices[c]);
    }
    return centroids;
}

ViewWeights init_view_weights(int views, double gamma) {
    if (views < 1) throw InvalidInput("at least one view is required");
    return {Eigen::VectorXd::Constant(views, 1.0 / views), gamma};
}

InitialState make_initial_state(const MultiViewDataset& dataset, int k, double gamma) {
    dataset.validate();
    InitialState state;
    for (const auto& view : dataset.views) {
        state.centroids.views.push_back(select_initial_centroids(view.data, k, dataset.distance));
    }
    state.weights = init_view_weights(dataset.num_views(), gamma);
    return state;
}

}  // namespace mvfcm
