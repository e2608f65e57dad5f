#pragma once

#include "mvfcm/dataset.hpp"
#include "mvfcm/solver.hpp"

#include <vector>

namespace mvfcm {

struct FcmResult {
    std::vector<int> labels;
    FuzzyPartition partition;
    RowMatrix centroids;  ///< K x D
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
};

/// Classical single-view fuzzy c-means with the same stopping rule as fit().
/// config.gamma is ignored.
FcmResult fcm_fit(const RowMatrix& data, const SolverConfig& config, const RowMatrix& initial_centroids);

inline FcmResult fcm_fit(const ViewMatrix& view, const SolverConfig& config, const RowMatrix& initial_centroids) {
    return fcm_fit(view.data, config, initial_centroids);
}

/// FCM on all views stacked side by side.
FcmResult fcm_concatenated(const MultiViewDataset& dataset, const SolverConfig& config,
                           const RowMatrix& initial_centroids);

}  // namespace mvfcm
