#pragma once

#include "mvfcm/dataset.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace mvfcm {

enum class ViewKind { informative, noise, copy };

struct SynthView {
    ViewKind kind = ViewKind::informative;
    int dim = 2;
    int copy_of = -1;  ///< source view index for ViewKind::copy
    Normalization normalization = Normalization::unit_variance_inv_sqrt_dim;
};

struct SynthSpec {
    int n_per_cluster = 100;
    int k = 2;
    double separation = 10.0;  ///< distance between consecutive cluster centers, in units of sigma
    double sigma = 1.0;
    std::vector<SynthView> views;
    std::uint64_t seed = 0;
    DistanceKind distance = DistanceKind::squared_euclidean;

    /// Throws InvalidInput on a malformed spec.
    void validate() const;
};

/// Identifies the random stream; bump it whenever generate() would produce different bytes.
inline constexpr std::string_view kSynthGenerator = "mt19937_64+box-muller/v1";

/// Standard normal draws from mt19937_64 via the Box-Muller transform.
/// Unlike std::normal_distribution, the sequence is identical across standard libraries.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
    double next();

private:
    double uniform();  ///< in [0, 1), 53 random bits

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Objects are stored cluster by cluster with labels 0..K-1. Informative views
/// put cluster c's center at c * separation * sigma along the unit diagonal;
/// noise views draw every object from one N(0, sigma^2 I); copy views
/// duplicate an earlier view.
MultiViewDataset generate(const SynthSpec& spec);

/// Parses "informative:4,noise:2,copy:0" style view lists. A bare kind uses default_dim.
std::vector<SynthView> parse_view_list(std::string_view text, int default_dim);

}  // namespace mvfcm
