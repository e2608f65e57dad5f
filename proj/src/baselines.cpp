#include "mvfcm/baselines.hpp"

#include <cmath>
#include <string>

namespace mvfcm {

FcmResult fcm_fit(const RowMatrix& data, const SolverConfig& config, const RowMatrix& initial_centroids) {
    config.validate();
    const Index n = data.rows();
    const Index k = config.k;
    if (k > n) throw InvalidInput("K exceeds N (" + std::to_string(k) + " > " + std::to_string(n) + ")");
    if (initial_centroids.rows() != k || initial_centroids.cols() != data.cols()) {
        throw InvalidInput("initial centroids have the wrong shape");
    }

    FcmResult result;
    result.centroids = initial_centroids;
    result.partition.u = Eigen::MatrixXd::Zero(k, n);
    Eigen::MatrixXd previous = result.partition.u;
    Eigen::MatrixXd dist(k, n);
    const double exponent = 1.0 / (config.m - 1.0);

    for (int t = 1; t <= config.max_iter; ++t) {
        for (Index i = 0; i < n; ++i) {
            for (Index c = 0; c < k; ++c) {
                dist(c, i) = squared_distance_unchecked(row_span(data, i), row_span(result.centroids, c), config.measure);
            }
        }
        auto& u = result.partition.u;
        for (Index i = 0; i < n; ++i) {
            const Index zeros = (dist.col(i).array() == 0.0).count();
            for (Index c = 0; c < k; ++c) {
                if (zeros > 0) {
                    u(c, i) = dist(c, i) == 0.0 ? 1.0 / static_cast<double>(zeros) : 0.0;
                    continue;
                }
                double sum = 0.0;
                for (Index j = 0; j < k; ++j) sum += std::pow(dist(c, i) / dist(j, i), exponent);
                u(c, i) = 1.0 / sum;
            }
        }
        if (!u.allFinite()) throw NumericalError("non-finite membership at iteration " + std::to_string(t));
        const double change = (u - previous).norm();

        const Eigen::MatrixXd powered = u.array().pow(config.m).matrix();
        for (Index c = 0; c < k; ++c) {
            const double mass = powered.row(c).sum();
            if (mass > 0.0) result.centroids.row(c) = (powered.row(c) * data) / mass;
        }
        if (!result.centroids.allFinite()) throw NumericalError("non-finite centroid at iteration " + std::to_string(t));

        double cost = 0.0;
        for (Index i = 0; i < n; ++i) {
            for (Index c = 0; c < k; ++c) {
                cost += powered(c, i) *
                        squared_distance_unchecked(row_span(data, i), row_span(result.centroids, c), config.measure);
            }
        }
        result.objective_trace.push_back(cost);
        result.iterations = t;
        if (change < config.epsilon) {
            result.converged = true;
            break;
        }
        previous = u;
    }

    result.labels = harden(result.partition);
    return result;
}

FcmResult fcm_concatenated(const MultiViewDataset& dataset, const SolverConfig& config,
                           const RowMatrix& initial_centroids) {
    return fcm_fit(concatenate_views(dataset).data, config, initial_centroids);
}

}  // namespace mvfcm
