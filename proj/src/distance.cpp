#include "mvfcm/distance.hpp"

#include "mvfcm/common.hpp"

#include <cmath>

namespace mvfcm {

double squared_distance_unchecked(std::span<const double> x, std::span<const double> v,
                                  DistanceKind kind) noexcept {
    const std::size_t n = x.size();
    if (kind == DistanceKind::squared_euclidean) {
        double sum = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
            const double diff = x[d] - v[d];
            sum += diff * diff;
        }
        return sum;
    }

    double dot = 0.0, xx = 0.0, vv = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        dot += x[d] * v[d];
        xx += x[d] * x[d];
        vv += v[d] * v[d];
    }
    if (xx == 0.0 || vv == 0.0) {
        return 1.0;
    }
    // Clamp so rounding never yields a tiny negative distance.
    const double cosine = dot / (std::sqrt(xx) * std::sqrt(vv));
    return std::max(0.0, 1.0 - cosine);
}

double squared_distance(std::span<const double> x, std::span<const double> v, DistanceKind kind) {
    if (x.size() != v.size()) {
        throw InvalidInput("dimension mismatch: " + std::to_string(x.size()) + " vs " +
                           std::to_string(v.size()));
    }
    return squared_distance_unchecked(x, v, kind);
}

std::string to_string(DistanceKind kind) {
    return kind == DistanceKind::cosine ? "cosine" : "euclidean";
}

DistanceKind parse_distance(std::string_view text) {
    if (text == "euclidean" || text == "squared_euclidean") {
        return DistanceKind::squared_euclidean;
    }
    if (text == "cosine") {
        return DistanceKind::cosine;
    }
    throw InvalidInput("unknown distance \"" + std::string(text) + "\"");
}

}  // namespace mvfcm
