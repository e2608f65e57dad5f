#pragma once

#include <span>
#include <string>
#include <string_view>

namespace mvfcm {

enum class DistanceKind { squared_euclidean, cosine };

/// Dissimilarity that stands in for ||x - v||^2 everywhere in the solver.
///
/// squared_euclidean: sum_d (x_d - v_d)^2.
/// cosine: 1 - x.v / (|x| |v|), and exactly 1 when either vector is all zero.
/// Throws InvalidInput on a dimension mismatch.
double squared_distance(std::span<const double> x, std::span<const double> v, DistanceKind kind);

/// Same as squared_distance without the dimension check, for inner loops.
double squared_distance_unchecked(std::span<const double> x, std::span<const double> v,
                                  DistanceKind kind) noexcept;

std::string to_string(DistanceKind kind);

/// Accepts the manifest spelling ("euclidean", "cosine") as well as "squared_euclidean".
DistanceKind parse_distance(std::string_view text);

}  // namespace mvfcm
