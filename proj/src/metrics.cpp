#include "mvfcm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mvfcm {

namespace {

// Summing sorted terms makes the metrics independent of how clusters and
// classes are numbered.
double sorted_sum(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    return std::accumulate(terms.begin(), terms.end(), 0.0);
}

}  // namespace

ContingencyTable contingency(std::span<const int> labels, std::span<const int> truth) {
    if (labels.size() != truth.size()) {
        throw InvalidInput("length mismatch: " + std::to_string(labels.size()) + " labels vs " +
                           std::to_string(truth.size()) + " ground-truth entries");
    }
    if (labels.empty()) throw InvalidInput("cannot evaluate an empty labelling");
    const auto negative = [](int v) { return v < 0; };
    if (std::any_of(labels.begin(), labels.end(), negative) || std::any_of(truth.begin(), truth.end(), negative)) {
        throw InvalidInput("cluster and class ids must be nonnegative");
    }
    const int k = *std::max_element(labels.begin(), labels.end()) + 1;
    const int m = *std::max_element(truth.begin(), truth.end()) + 1;
    ContingencyTable table{decltype(ContingencyTable::counts)::Zero(k, m)};
    for (std::size_t i = 0; i < labels.size(); ++i) ++table.counts(labels[i], truth[i]);
    return table;
}

double nmi(const ContingencyTable& table) {
    const auto n = static_cast<double>(table.total());
    std::vector<double> cluster_terms, class_terms, mutual_terms;
    for (Index c = 0; c < table.clusters(); ++c) {
        const auto nc = static_cast<double>(table.cluster_size(c));
        if (nc > 0) cluster_terms.push_back(nc * std::log(nc / n));
    }
    for (Index p = 0; p < table.classes(); ++p) {
        const auto np = static_cast<double>(table.class_size(p));
        if (np > 0) class_terms.push_back(np * std::log(np / n));
    }
    if (cluster_terms.size() <= 1 || class_terms.size() <= 1) {
        return cluster_terms.size() == 1 && class_terms.size() == 1 ? 1.0 : 0.0;
    }
    for (Index c = 0; c < table.clusters(); ++c) {
        const auto nc = static_cast<double>(table.cluster_size(c));
        for (Index p = 0; p < table.classes(); ++p) {
            const auto ncp = static_cast<double>(table.counts(c, p));
            if (ncp == 0) continue;
            const auto np = static_cast<double>(table.class_size(p));
            mutual_terms.push_back(ncp * std::log(n * ncp / (nc * np)));
        }
    }
    const double value = sorted_sum(mutual_terms) / std::sqrt(sorted_sum(cluster_terms) * sorted_sum(class_terms));
    return std::clamp(value, 0.0, 1.0);
}

double f_measure(const ContingencyTable& table) {
    const auto n = static_cast<double>(table.total());
    std::vector<double> weighted;
    for (Index p = 0; p < table.classes(); ++p) {
        const auto np = static_cast<double>(table.class_size(p));
        if (np == 0) continue;
        double best = 0.0;
        for (Index c = 0; c < table.clusters(); ++c) {
            const auto ncp = static_cast<double>(table.counts(c, p));
            if (ncp == 0) continue;
            const double precision = ncp / static_cast<double>(table.cluster_size(c));
            const double recall = ncp / np;
            best = std::max(best, 2.0 * precision * recall / (precision + recall));
        }
        weighted.push_back(np / n * best);
    }
    return sorted_sum(weighted);
}

std::vector<int> optimal_assignment(const Eigen::MatrixXd& cost) {
    const Index size = cost.rows();
    if (cost.cols() != size) throw InvalidInput("assignment needs a square cost matrix");
    // Shortest augmenting paths with row/column potentials, 1-based with a
    // virtual column 0.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> row_pot(static_cast<std::size_t>(size + 1), 0.0), col_pot(static_cast<std::size_t>(size + 1), 0.0);
    std::vector<Index> owner(static_cast<std::size_t>(size + 1), 0), way(static_cast<std::size_t>(size + 1), 0);
    for (Index row = 1; row <= size; ++row) {
        owner[0] = row;
        Index col0 = 0;
        std::vector<double> slack(static_cast<std::size_t>(size + 1), inf);
        std::vector<bool> used(static_cast<std::size_t>(size + 1), false);
        do {
            used[static_cast<std::size_t>(col0)] = true;
            const Index r = owner[static_cast<std::size_t>(col0)];
            double delta = inf;
            Index col1 = 0;
            for (Index j = 1; j <= size; ++j) {
                const auto uj = static_cast<std::size_t>(j);
                if (used[uj]) continue;
                const double reduced = cost(r - 1, j - 1) - row_pot[static_cast<std::size_t>(r)] - col_pot[uj];
                if (reduced < slack[uj]) {
                    slack[uj] = reduced;
                    way[uj] = col0;
                }
                if (slack[uj] < delta) {
                    delta = slack[uj];
                    col1 = j;
                }
            }
            for (Index j = 0; j <= size; ++j) {
                const auto uj = static_cast<std::size_t>(j);
                if (used[uj]) {
                    row_pot[static_cast<std::size_t>(owner[uj])] += delta;
                    col_pot[uj] -= delta;
                } else {
                    slack[uj] -= delta;
                }
            }
            col0 = col1;
        } while (owner[static_cast<std::size_t>(col0)] != 0);
        do {
            const Index prev = way[static_cast<std::size_t>(col0)];
            owner[static_cast<std::size_t>(col0)] = owner[static_cast<std::size_t>(prev)];
            col0 = prev;
        } while (col0 != 0);
    }
    std::vector<int> assignment(static_cast<std::size_t>(size), -1);
    for (Index j = 1; j <= size; ++j) {
        assignment[static_cast<std::size_t>(owner[static_cast<std::size_t>(j)] - 1)] = static_cast<int>(j - 1);
    }
    return assignment;
}

AccuracyResult accuracy(const ContingencyTable& table) {
    const Index size = std::max(table.clusters(), table.classes());
    // Zero-count padding leaves unmatched clusters or classes scoring nothing.
    Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(size, size);
    cost.topLeftCorner(table.clusters(), table.classes()) = -table.counts.cast<double>();
    const auto assignment = optimal_assignment(cost);

    AccuracyResult result;
    std::int64_t matched = 0;
    for (Index c = 0; c < table.clusters(); ++c) {
        const int p = assignment[static_cast<std::size_t>(c)];
        if (p < table.classes()) {
            result.matching.push_back(p);
            matched += table.counts(c, p);
        } else {
            result.matching.push_back(-1);
        }
    }
    result.accuracy = static_cast<double>(matched) / static_cast<double>(table.total());
    return result;
}

EvaluationReport evaluate(std::span<const int> labels, std::span<const int> truth) {
    const auto table = contingency(labels, truth);
    auto acc = accuracy(table);
    return {acc.accuracy, nmi(table), f_measure(table), std::move(acc.matching)};
}

}  // namespace mvfcm
