#include "mvfcm/init.hpp"
#include "mvfcm/metrics.hpp"
#include "mvfcm/solver.hpp"
#include "mvfcm/synth.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <random>

using namespace mvfcm;
using testing::view_of;

namespace {

MultiViewDataset dataset_of(std::vector<RowMatrix> views) {
    MultiViewDataset ds;
    for (auto& v : views) ds.views.push_back(view_of(std::move(v)));
    for (auto& v : ds.views) v.applied = true;
    return ds;
}

RowMatrix col(std::initializer_list<double> values) {
    RowMatrix x(static_cast<Index>(values.size()), 1);
    Index i = 0;
    for (double v : values) x(i++, 0) = v;
    return x;
}

FuzzyPartition partition_of(Eigen::MatrixXd u) { return FuzzyPartition{std::move(u)}; }

struct Instance {
    MultiViewDataset data;
    CentroidSet centroids;
    ViewWeights weights;
    SolverConfig config;
};

Instance random_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_dist(3, 20), k_dist(1, 3), p_dist(1, 3), d_dist(1, 4);
    std::uniform_real_distribution<double> u(-2, 2), gamma(0.0, 0.95), m(1.1, 3.0);
    Instance inst;
    const int n = n_dist(rng), k = std::min(k_dist(rng), n), p = p_dist(rng);
    std::vector<RowMatrix> views;
    for (int v = 0; v < p; ++v) {
        RowMatrix x(n, d_dist(rng));
        for (Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
        RowMatrix c(k, x.cols());
        for (Index i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
        views.push_back(std::move(x));
        inst.centroids.views.push_back(std::move(c));
    }
    inst.data = dataset_of(std::move(views));
    inst.config.k = k;
    inst.config.gamma = gamma(rng);
    inst.config.m = m(rng);
    const auto a = oracle::random_simplex(static_cast<std::size_t>(p), rng);
    inst.weights = {Eigen::Map<const Eigen::VectorXd>(a.data(), p), inst.config.gamma};
    return inst;
}

Eigen::MatrixXd random_partition(Index k, Index n, std::mt19937_64& rng) {
    Eigen::MatrixXd u(k, n);
    for (Index i = 0; i < n; ++i) {
        const auto col = oracle::random_simplex(static_cast<std::size_t>(k), rng);
        for (Index c = 0; c < k; ++c) u(c, i) = col[static_cast<std::size_t>(c)];
    }
    return u;
}

}  // namespace

TEST_CASE("view_cost examples") {
    SUBCASE("crisp memberships at the centroids") {
        const RowMatrix x = col({1, 5});
        Eigen::MatrixXd u(2, 2);
        u << 1, 0, 0, 1;
        CHECK(view_cost(partition_of(u), col({1, 5}), x, 2.0, DistanceKind::squared_euclidean) == 0.0);
    }
    SUBCASE("single term") {
        CHECK(view_cost(partition_of(Eigen::MatrixXd::Ones(1, 1)), col({2}), col({0}), 2.0,
                        DistanceKind::squared_euclidean) == 4.0);
    }
    SUBCASE("two by two") {
        // distances [[1,4],[4,1]]: object 0 at 0, object 1 at 3, centroids at 1 and 2
        Eigen::MatrixXd u(2, 2);
        u << 0.8, 0.2, 0.2, 0.8;
        const double q = view_cost(partition_of(u), col({-1, 2}), col({0, 1}), 2.0, DistanceKind::squared_euclidean);
        // object 0 (x=0): d to -1 is 1, to 2 is 4; object 1 (x=1): d to -1 is 4, to 2 is 1
        CHECK(q == doctest::Approx(1.6).epsilon(1e-14));
    }
}

TEST_CASE("weighted objective examples") {
    const std::vector<double> one{1.0}, q1{7.5};
    CHECK(weighted_cost(one, 0.3, q1) == 7.5);
    CHECK(weighted_cost(one, 0.0, q1) == 7.5);
    const std::vector<double> alpha{0.25, 0.75}, q{2, 4};
    CHECK(weighted_cost(alpha, 0.0, q) == 6.0);
    CHECK(weighted_cost(alpha, 0.5, q) == doctest::Approx(0.5 * 2 + std::sqrt(0.75) * 4).epsilon(1e-14));
    CHECK(weighted_cost(alpha, 0.5, q) == doctest::Approx(4.4641).epsilon(1e-5));
}

TEST_CASE("memberships_from_distances") {
    std::vector<double> out(3);
    memberships_from_distances(std::vector<double>{2, 2, 2}, 1.7, out);
    for (double v : out) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-15));

    memberships_from_distances(std::vector<double>{3, 0, 1}, 2.0, out);
    CHECK(out == std::vector<double>{0, 1, 0});

    memberships_from_distances(std::vector<double>{0, 5, 0}, 2.0, out);
    CHECK(out == std::vector<double>{0.5, 0, 0.5});

    std::vector<double> two(2);
    memberships_from_distances(std::vector<double>{1, 4}, 2.0, two);
    CHECK(two[0] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(two[1] == doctest::Approx(0.2).epsilon(1e-15));

    // Extreme ratios with a small fuzzifier must not overflow.
    memberships_from_distances(std::vector<double>{1e-200, 1e200, 1}, 1.01, out);
    CHECK(out[0] == 1.0);
    CHECK(out[1] == 0.0);
}

TEST_CASE("update_membership example") {
    const auto ds = dataset_of({col({0})});
    SolverConfig config;
    config.k = 2;
    config.m = 2.0;
    const CentroidSet centroids{{col({1, 2})}};
    const auto u = update_membership(centroids, init_view_weights(1), ds, config);
    CHECK(u.u(0, 0) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(u.u(1, 0) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("update_centroids examples") {
    SolverConfig config;
    config.k = 2;
    config.m = 2.0;
    const auto ds = dataset_of({col({0, 3, 7})});
    const CentroidSet previous{{col({100, 200})}};

    SUBCASE("one-hot picks the object") {
        Eigen::MatrixXd onehot(2, 3);
        onehot << 0, 1, 0, 1, 0, 1;
        const auto out = update_centroids(partition_of(onehot), ds, config, previous);
        CHECK(out.centroids.views[0](0, 0) == 3.0);
        CHECK(out.degenerate.empty());
    }
    SUBCASE("uniform memberships give the mean") {
        for (double m : {1.3, 2.0, 4.0}) {
            config.m = m;
            const auto out = update_centroids(partition_of(Eigen::MatrixXd::Constant(2, 3, 0.5)), ds, config, previous);
            CHECK(out.centroids.views[0](0, 0) == doctest::Approx(10.0 / 3).epsilon(1e-14));
            CHECK(out.centroids.views[0](1, 0) == doctest::Approx(10.0 / 3).epsilon(1e-14));
        }
    }
    SUBCASE("weighted mean") {
        const auto two = dataset_of({col({0, 3})});
        Eigen::MatrixXd u(2, 2);
        u << 2.0 / 3, 1.0 / 3, 1.0 / 3, 2.0 / 3;
        const auto out = update_centroids(partition_of(u), two, config, previous);
        CHECK(out.centroids.views[0](0, 0) == doctest::Approx(0.6).epsilon(1e-14));
    }
    SUBCASE("empty cluster keeps its previous centroid") {
        Eigen::MatrixXd u(2, 3);
        u << 1, 1, 1, 0, 0, 0;
        const auto out = update_centroids(partition_of(u), ds, config, previous);
        CHECK(out.centroids.views[0](1, 0) == 200.0);
        CHECK(out.degenerate == std::vector<int>{1});
    }
}

TEST_CASE("update_view_weights examples") {
    const auto w = [](std::vector<double> q, double gamma) { return update_view_weights(q, gamma).alpha; };
    CHECK(w({3, 3, 3}, 0.4).isApprox(Eigen::Vector3d::Constant(1.0 / 3), 1e-15));
    const auto a = w({1, 4}, 0.5);
    CHECK(a(0) == doctest::Approx(1.0 / 17).epsilon(1e-14));
    CHECK(a(1) == doctest::Approx(16.0 / 17).epsilon(1e-14));
    CHECK(w({1, 2}, 0.99)(1) > 0.99);
    // gamma = 0 reduces to cost proportions
    const auto flat = w({1, 3}, 0.0);
    CHECK(flat(0) == doctest::Approx(0.25).epsilon(1e-15));
    // zero cost is clamped, not divided by
    const auto clamped = w({0, 2}, 0.5);
    CHECK(clamped.allFinite());
    CHECK(clamped(1) > clamped(0));
    CHECK_THROWS_AS(update_view_weights(std::vector<double>{1, -1}, 0.5), InvalidInput);
    CHECK_THROWS_AS(update_view_weights(std::vector<double>{1, 2}, 1.0), InvalidInput);
}

TEST_CASE("gamma controls how uneven the effective weights are") {
    const std::vector<double> q{1.0, 2.5, 6.0};
    const auto low = update_view_weights(q, 0.01).effective();
    CHECK((low.maxCoeff() - low.minCoeff()) / low.maxCoeff() < 0.05);
    const auto high = update_view_weights(q, 0.99).alpha;
    CHECK(high(2) > 0.99);
    // Larger cost, larger weight.
    const auto mid = update_view_weights(q, 0.5).alpha;
    CHECK(mid(0) < mid(1));
    CHECK(mid(1) < mid(2));
}

TEST_CASE("harden") {
    Eigen::MatrixXd u(3, 3);
    u << 0.7, 0.5, 0.1, 0.3, 0.5, 0.2, 0.0, 0.0, 0.7;
    CHECK(harden(partition_of(u)) == std::vector<int>{0, 0, 2});
}

TEST_CASE("config validation") {
    SolverConfig c;
    c.gamma = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    c.gamma = -0.1;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    c = {};
    c.m = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    c = {};
    c.epsilon = 0;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    c = {};
    c.k = 0;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
}

TEST_CASE("membership step is optimal against random memberships") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        auto inst = random_instance(rng);
        const auto best = update_membership(inst.centroids, inst.weights, inst.data, inst.config);
        const double at_best = objective(best, inst.centroids, inst.weights, inst.data, inst.config);
        for (Index i = 0; i < best.objects(); ++i) {
            CHECK(std::abs(best.u.col(i).sum() - 1.0) < 1e-10);
            CHECK(best.u.col(i).minCoeff() >= 0.0);
            CHECK(best.u.col(i).maxCoeff() <= 1.0);
        }
        for (int r = 0; r < 200; ++r) {
            const FuzzyPartition other{random_partition(inst.config.k, inst.data.size(), rng)};
            CHECK(at_best <= objective(other, inst.centroids, inst.weights, inst.data, inst.config) + 1e-12);
        }
    }
}

TEST_CASE("centroid step is optimal and stays in the hull under Euclidean distance") {
    std::mt19937_64 rng(202);
    std::normal_distribution<double> g(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        auto inst = random_instance(rng);
        const FuzzyPartition u{random_partition(inst.config.k, inst.data.size(), rng)};
        const auto updated = update_centroids(u, inst.data, inst.config, inst.centroids).centroids;
        const double at_best = objective(u, updated, inst.weights, inst.data, inst.config);

        double radius = 0;
        for (const auto& v : inst.data.views) radius = std::max(radius, v.data.rowwise().norm().maxCoeff());
        for (int r = 0; r < 100; ++r) {
            CentroidSet moved = updated;
            for (auto& v : moved.views) {
                RowMatrix delta(v.rows(), v.cols());
                for (Index i = 0; i < delta.size(); ++i) delta.data()[i] = g(rng);
                v += delta * (0.1 * radius * std::uniform_real_distribution<double>(0, 1)(rng) / delta.norm());
            }
            CHECK(at_best <= objective(u, moved, inst.weights, inst.data, inst.config) + 1e-12);
        }

        for (std::size_t p = 0; p < updated.views.size(); ++p) {
            const auto& x = inst.data.views[p].data;
            for (Index j = 0; j < x.cols(); ++j) {
                CHECK(updated.views[p].col(j).minCoeff() >= x.col(j).minCoeff() - 1e-12);
                CHECK(updated.views[p].col(j).maxCoeff() <= x.col(j).maxCoeff() + 1e-12);
            }
        }

        // Same memberships with a different gamma: centroids are bitwise identical.
        SolverConfig other = inst.config;
        other.gamma = inst.config.gamma / 2;
        const auto again = update_centroids(u, inst.data, other, inst.centroids).centroids;
        for (std::size_t p = 0; p < updated.views.size(); ++p) CHECK(again.views[p] == updated.views[p]);
    }
}

TEST_CASE("weight step maximizes the weighted cost") {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> cost(0.0, 10.0), gamma(0.0, 0.99);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t p = 1 + trial % 4;
        std::vector<double> q(p);
        for (auto& v : q) v = cost(rng);
        const double g = gamma(rng);
        const auto w = update_view_weights(q, g);
        CHECK(std::abs(w.alpha.sum() - 1.0) < 1e-12);
        const double best = weighted_cost({w.alpha.data(), p}, g, q);
        for (int r = 0; r < 200; ++r) {
            const auto a = oracle::random_simplex(p, rng);
            CHECK(best >= weighted_cost(a, g, q) - 1e-12);
        }
    }
}

TEST_CASE("fit with one view matches classical FCM") {
    SynthSpec spec;
    spec.n_per_cluster = 30;
    spec.k = 3;
    spec.separation = 3;
    spec.views = {{ViewKind::informative, 2}};
    spec.seed = 9;
    auto ds = apply_normalization(generate(spec));

    SolverConfig config;
    config.k = 3;
    config.m = 2.0;
    config.epsilon = 1e-9;
    config.max_iter = 500;
    const auto initial = make_initial_state(ds, 3, 0.5);
    const auto result = fit(ds, config, initial);

    oracle::Points points, seeds;
    const auto& x = ds.views[0].data;
    for (Index i = 0; i < x.rows(); ++i) points.push_back({x(i, 0), x(i, 1)});
    for (Index c = 0; c < 3; ++c) seeds.push_back({initial.centroids.views[0](c, 0), initial.centroids.views[0](c, 1)});
    const auto expected = oracle::classical_fcm(points, seeds, 2.0, 1e-9, 500);

    CHECK(result.converged);
    CHECK(result.iterations == expected.iterations);
    CHECK(result.labels == expected.labels);
    for (Index c = 0; c < 3; ++c)
        for (Index i = 0; i < x.rows(); ++i) CHECK(std::abs(result.partition.u(c, i) - expected.u[c][i]) < 1e-8);
    CHECK(result.weights.alpha(0) == 1.0);
}

TEST_CASE("identical views keep equal weights") {
    SynthSpec spec;
    spec.n_per_cluster = 20;
    spec.separation = 4;
    spec.views = {{ViewKind::informative, 3}, {ViewKind::copy, 0, 0}};
    auto ds = apply_normalization(generate(spec));
    SolverConfig config;
    config.k = 2;
    int seen = 0;
    const auto result = fit(ds, config, make_initial_state(ds, 2, config.gamma), [&](const IterationSnapshot& s) {
        ++seen;
        CHECK(s.weights.alpha(0) == 0.5);
        CHECK(s.weights.alpha(1) == 0.5);
    });
    CHECK(seen == result.iterations);
    CHECK(result.objective_trace.size() == static_cast<std::size_t>(result.iterations));
}

TEST_CASE("well separated clusters are recovered exactly") {
    SynthSpec spec;
    spec.n_per_cluster = 50;
    spec.separation = 10;
    spec.views = {{ViewKind::informative, 2}, {ViewKind::informative, 3}};
    spec.seed = 17;
    auto ds = apply_normalization(generate(spec));
    SolverConfig config;
    config.k = 2;
    const auto result = fit(ds, config, make_initial_state(ds, 2, config.gamma));
    CHECK(evaluate(result.labels, *ds.labels).accuracy == 1.0);
    CHECK(result.converged);
    CHECK(std::abs(result.weights.alpha.sum() - 1.0) < 1e-12);
    CHECK(result.effective_weights.isApprox(result.weights.alpha.array().pow(0.5).matrix()));
}

TEST_CASE("threaded fit is bitwise identical to single-threaded") {
    SynthSpec spec;
    spec.n_per_cluster = 40;
    spec.k = 3;
    spec.separation = 2;
    spec.views = {{ViewKind::informative, 3}, {ViewKind::noise, 2}, {ViewKind::informative, 4}};
    spec.seed = 5;
    auto ds = apply_normalization(generate(spec));
    SolverConfig config;
    config.k = 3;
    const auto initial = make_initial_state(ds, 3, config.gamma);
    const auto one = fit(ds, config, initial);
    config.threads = 4;
    const auto four = fit(ds, config, initial);
    CHECK(one.partition.u == four.partition.u);
    CHECK(one.weights.alpha == four.weights.alpha);
    CHECK(one.objective_trace == four.objective_trace);
    const auto again = fit(ds, SolverConfig{config.k}, initial);
    CHECK(again.partition.u == one.partition.u);
}

TEST_CASE("fit errors") {
    auto ds = dataset_of({col({0, 1})});
    SolverConfig config;
    config.k = 3;
    InitialState initial{{{col({0, 1, 2})}}, init_view_weights(1)};
    CHECK_THROWS_WITH_AS(fit(ds, config, initial), doctest::Contains("K exceeds N"), InvalidInput);

    auto huge = dataset_of({col({-1e300, 1e300, 0})});
    config.k = 2;
    InitialState far{{{col({-1e300, 1e300})}}, init_view_weights(1)};
    CHECK_THROWS_WITH_AS(fit(huge, config, far), doctest::Contains("iteration 1"), NumericalError);
}
