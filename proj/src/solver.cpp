#include "mvfcm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mvfcm {

void SolverConfig::validate() const {
    if (k < 1) throw InvalidInput("K must be at least 1");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidInput("gamma must lie in [0, 1)");
    if (!(m > 1.0) || !std::isfinite(m)) throw InvalidInput("fuzzifier m must be greater than 1");
    if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
    if (max_iter < 1) throw InvalidInput("max_iter must be positive");
    if (threads < 1) throw InvalidInput("thread count must be positive");
}

double view_cost(const FuzzyPartition& partition, const RowMatrix& centroids, const RowMatrix& data, double m,
                 DistanceKind measure) {
    double total = 0.0;
    for (Index i = 0; i < data.rows(); ++i) {
        const auto x = row_span(data, i);
        for (Index c = 0; c < partition.clusters(); ++c) {
            const double u = partition.u(c, i);
            if (u == 0.0) continue;
            total += std::pow(u, m) * squared_distance_unchecked(x, row_span(centroids, c), measure);
        }
    }
    return total;
}

Eigen::VectorXd view_costs(const FuzzyPartition& partition, const CentroidSet& centroids,
                           const MultiViewDataset& dataset, const SolverConfig& config) {
    Eigen::VectorXd costs(dataset.num_views());
    for (int p = 0; p < dataset.num_views(); ++p) {
        const auto up = static_cast<std::size_t>(p);
        costs(p) = view_cost(partition, centroids.views[up], dataset.views[up].data, config.m, config.measure);
    }
    return costs;
}

double weighted_cost(std::span<const double> alpha, double gamma, std::span<const double> costs) {
    double total = 0.0;
    for (std::size_t p = 0; p < costs.size(); ++p) total += std::pow(alpha[p], gamma) * costs[p];
    return total;
}

double objective(const FuzzyPartition& partition, const CentroidSet& centroids, const ViewWeights& weights,
                 const MultiViewDataset& dataset, const SolverConfig& config) {
    const Eigen::VectorXd costs = view_costs(partition, centroids, dataset, config);
    return weighted_cost({weights.alpha.data(), static_cast<std::size_t>(weights.alpha.size())}, weights.gamma,
                         {costs.data(), static_cast<std::size_t>(costs.size())});
}

void memberships_from_distances(std::span<const double> distances, double m, std::span<double> out) {
    const std::size_t k = distances.size();
    const double smallest = *std::min_element(distances.begin(), distances.end());
    if (smallest <= 0.0) {
        const auto zeros = static_cast<double>(std::count(distances.begin(), distances.end(), 0.0));
        for (std::size_t c = 0; c < k; ++c) out[c] = distances[c] == 0.0 ? 1.0 / zeros : 0.0;
        return;
    }
    // Dividing through by the smallest distance keeps every ratio in (0, 1].
    const double exponent = 1.0 / (m - 1.0);
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        out[c] = std::pow(smallest / distances[c], exponent);
        total += out[c];
    }
    for (std::size_t c = 0; c < k; ++c) out[c] /= total;
}

FuzzyPartition update_membership(const CentroidSet& centroids, const ViewWeights& weights,
                                 const MultiViewDataset& dataset, const SolverConfig& config) {
    const Index n = dataset.size();
    const int k = config.k;
    const int views = dataset.num_views();
    const Eigen::VectorXd effective = weights.alpha.array().pow(config.gamma).matrix();

    FuzzyPartition partition{Eigen::MatrixXd(k, n)};
    parallel_for(n, config.threads, [&](Index begin, Index end) {
        std::vector<double> a(static_cast<std::size_t>(k));
        for (Index i = begin; i < end; ++i) {
            std::fill(a.begin(), a.end(), 0.0);
            for (int p = 0; p < views; ++p) {
                const auto up = static_cast<std::size_t>(p);
                const auto x = row_span(dataset.views[up].data, i);
                for (int c = 0; c < k; ++c) {
                    a[static_cast<std::size_t>(c)] +=
                        effective(p) * squared_distance_unchecked(x, row_span(centroids.views[up], c), config.measure);
                }
            }
            memberships_from_distances(a, config.m, {partition.u.col(i).data(), static_cast<std::size_t>(k)});
        }
    });
    return partition;
}

CentroidUpdate update_centroids(const FuzzyPartition& partition, const MultiViewDataset& dataset,
                                const SolverConfig& config, const CentroidSet& previous) {
    const Index n = partition.objects();
    const Index k = partition.clusters();
    const int views = dataset.num_views();
    const Eigen::MatrixXd powered = partition.u.array().pow(config.m).matrix();

    CentroidUpdate update;
    update.centroids.views.resize(static_cast<std::size_t>(views));
    for (int p = 0; p < views; ++p) {
        update.centroids.views[static_cast<std::size_t>(p)].resize(k, dataset.views[static_cast<std::size_t>(p)].dim());
    }
    std::vector<char> empty(static_cast<std::size_t>(k * views), 0);

    parallel_for(k * views, config.threads, [&](Index begin, Index end) {
        for (Index job = begin; job < end; ++job) {
            const auto p = static_cast<std::size_t>(job / k);
            const Index c = job % k;
            const RowMatrix& x = dataset.views[p].data;
            auto centroid = update.centroids.views[p].row(c);
            centroid.setZero();
            double mass = 0.0;
            for (Index i = 0; i < n; ++i) {
                const double w = powered(c, i);
                if (w == 0.0) continue;
                centroid += w * x.row(i);
                mass += w;
            }
            if (mass > 0.0) {
                centroid /= mass;
            } else {
                centroid = previous.views[p].row(c);
                empty[static_cast<std::size_t>(job)] = 1;
            }
        }
    });
    for (Index c = 0; c < k; ++c) {
        for (int p = 0; p < views; ++p) {
            if (empty[static_cast<std::size_t>(p * k + c)]) {
                update.degenerate.push_back(static_cast<int>(c));
                break;
            }
        }
    }
    return update;
}

ViewWeights update_view_weights(std::span<const double> per_view_cost, double gamma) {
    if (per_view_cost.empty()) throw InvalidInput("at least one view cost is required");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidInput("gamma must lie in [0, 1)");
    constexpr double floor = 1e-12;
    const std::size_t views = per_view_cost.size();
    std::vector<double> costs(views);
    for (std::size_t p = 0; p < views; ++p) {
        if (per_view_cost[p] < 0.0) throw InvalidInput("view costs must be nonnegative");
        costs[p] = std::max(per_view_cost[p], floor);
    }
    // (Q_p/Q_j)^(1/(gamma-1)) summed over j equals sum_j r_j / r_p with
    // r = (Q / Q_max)^(1/(1-gamma)); scaling by the largest cost keeps r in (0, 1].
    const double largest = *std::max_element(costs.begin(), costs.end());
    const double exponent = 1.0 / (1.0 - gamma);
    ViewWeights weights{Eigen::VectorXd(static_cast<Index>(views)), gamma};
    double total = 0.0;
    for (std::size_t p = 0; p < views; ++p) {
        weights.alpha(static_cast<Index>(p)) = std::pow(costs[p] / largest, exponent);
        total += weights.alpha(static_cast<Index>(p));
    }
    weights.alpha /= total;
    return weights;
}

std::vector<int> harden(const FuzzyPartition& partition) {
    std::vector<int> labels(static_cast<std::size_t>(partition.objects()));
    for (Index i = 0; i < partition.objects(); ++i) {
        Index best = 0;
        for (Index c = 1; c < partition.clusters(); ++c) {
            if (partition.u(c, i) > partition.u(best, i)) best = c;
        }
        labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return labels;
}

namespace {

void check_shapes(const MultiViewDataset& dataset, const SolverConfig& config, const InitialState& initial) {
    config.validate();
    dataset.validate();
    if (config.k > dataset.size()) {
        throw InvalidInput("K exceeds N (" + std::to_string(config.k) + " > " + std::to_string(dataset.size()) + ")");
    }
    if (initial.centroids.views.size() != dataset.views.size()) {
        throw InvalidInput("initial centroids cover " + std::to_string(initial.centroids.views.size()) +
                           " views, dataset has " + std::to_string(dataset.views.size()));
    }
    for (std::size_t p = 0; p < dataset.views.size(); ++p) {
        const auto& v = initial.centroids.views[p];
        if (v.rows() != config.k || v.cols() != dataset.views[p].dim()) {
            throw InvalidInput("initial centroids of view " + std::to_string(p) + " have the wrong shape");
        }
    }
    if (initial.weights.alpha.size() != dataset.num_views()) {
        throw InvalidInput("initial weights do not match the view count");
    }
}

void require_finite(bool ok, const char* quantity, int iteration) {
    if (!ok) {
        throw NumericalError(std::string("non-finite ") + quantity + " at iteration " + std::to_string(iteration));
    }
}

void merge_flags(std::vector<int>& into, const std::vector<int>& flags) {
    for (int c : flags) {
        if (std::find(into.begin(), into.end(), c) == into.end()) into.push_back(c);
    }
    std::sort(into.begin(), into.end());
}

}  // namespace

ClusteringResult fit(const MultiViewDataset& dataset, const SolverConfig& config, const InitialState& initial,
                     const IterationObserver& observer) {
    check_shapes(dataset, config, initial);

    ClusteringResult result;
    result.centroids = initial.centroids;
    result.weights = {initial.weights.alpha, config.gamma};
    FuzzyPartition previous{Eigen::MatrixXd::Zero(config.k, dataset.size())};

    for (int t = 1; t <= config.max_iter; ++t) {
        result.partition = update_membership(result.centroids, result.weights, dataset, config);
        require_finite(result.partition.u.allFinite(), "membership", t);
        const double change = (result.partition.u - previous.u).norm();

        auto centroids = update_centroids(result.partition, dataset, config, result.centroids);
        for (const auto& v : centroids.centroids.views) require_finite(v.allFinite(), "centroid", t);
        result.centroids = std::move(centroids.centroids);
        merge_flags(result.degenerate_clusters, centroids.degenerate);

        result.per_view_cost = view_costs(result.partition, result.centroids, dataset, config);
        require_finite(result.per_view_cost.allFinite(), "view cost", t);
        result.weights = update_view_weights(
            {result.per_view_cost.data(), static_cast<std::size_t>(result.per_view_cost.size())}, config.gamma);
        require_finite(result.weights.alpha.allFinite(), "view weight", t);

        const double value = weighted_cost(
            {result.weights.alpha.data(), static_cast<std::size_t>(result.weights.alpha.size())}, config.gamma,
            {result.per_view_cost.data(), static_cast<std::size_t>(result.per_view_cost.size())});
        result.objective_trace.push_back(value);
        result.iterations = t;
        if (observer) {
            observer({t, result.partition, result.centroids, result.weights, result.per_view_cost, value, change});
        }
        if (change < config.epsilon) {
            result.converged = true;
            break;
        }
        previous.u = result.partition.u;
    }

    result.labels = harden(result.partition);
    result.effective_weights = result.weights.effective();
    return result;
}

}  // namespace mvfcm
