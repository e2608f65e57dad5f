#pragma once

#include "mvfcm/dataset.hpp"
#include "mvfcm/solver_types.hpp"

#include <vector>

namespace mvfcm {

/// Farthest-first seeding. The first pick is the row with the smallest total
/// distance to all rows; every later pick is the unchosen row whose distance
/// to its nearest chosen row is largest. Ties go to the lowest row index.
/// Throws InvalidInput unless 1 <= k <= rows.
std::vector<Index> select_initial_indices(const RowMatrix& view, int k, DistanceKind measure);

/// The rows picked by select_initial_indices, copied as a k x D matrix.
RowMatrix select_initial_centroids(const RowMatrix& view, int k, DistanceKind measure);

/// Uniform alpha = 1/P.
ViewWeights init_view_weights(int views, double gamma = 0.0);

/// Seeds every view independently with the dataset's distance and sets alpha uniform.
InitialState make_initial_state(const MultiViewDataset& dataset, int k, double gamma);

}  // namespace mvfcm
