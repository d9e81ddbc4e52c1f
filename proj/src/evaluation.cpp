#include "cantons/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cantons/error.hpp"

namespace cantons {

namespace {

struct Contingency {
    std::map<std::pair<int, int>, double> cells;
    std::map<int, double> rows, cols;
    double n = 0.0;
};

Contingency contingency(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size())
        throw DomainError("partitions cover different node sets (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + " nodes)");
    Contingency t;
    for (std::size_t i = 0; i < a.size(); ++i) {
        t.cells[{a[i], b[i]}] += 1.0;
        t.rows[a[i]] += 1.0;
        t.cols[b[i]] += 1.0;
    }
    t.n = static_cast<double>(a.size());
    return t;
}

double choose2(double x) { return x * (x - 1.0) / 2.0; }

double entropy(const std::map<int, double>& counts, double n) {
    double h = 0.0;
    for (const auto& [label, c] : counts) {
        const double p = c / n;
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

}  // namespace

std::optional<double> silhouette(std::span<const int> labels, const DistanceMatrix& distances) {
    const std::size_t n = labels.size();
    if (distances.size() != static_cast<Eigen::Index>(n)) throw DomainError("distance matrix does not match labels");
    const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    if (count_labels(labels) < 2 || static_cast<std::size_t>(count_labels(labels)) > n - 1) return std::nullopt;

    std::vector<double> sizes(static_cast<std::size_t>(k), 0.0);
    for (int l : labels) sizes[static_cast<std::size_t>(l)] += 1.0;

    double total = 0.0;
    std::vector<double> sums(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) {
        const auto own = static_cast<std::size_t>(labels[i]);
        if (sizes[own] <= 1.0) continue;
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) sums[static_cast<std::size_t>(labels[j])] += distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        const double a = sums[own] / (sizes[own] - 1.0);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < sums.size(); ++c)
            if (c != own && sizes[c] > 0.0) b = std::min(b, sums[c] / sizes[c]);
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

double wcss(std::span<const int> labels, const Eigen::MatrixXd& features) {
    if (static_cast<Eigen::Index>(labels.size()) != features.rows())
        throw DomainError("labels and features disagree on the number of municipalities");
    const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(k, features.cols());
    std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        centroids.row(labels[i]) += features.row(static_cast<Eigen::Index>(i));
        counts[static_cast<std::size_t>(labels[i])] += 1.0;
    }
    for (int c = 0; c < k; ++c)
        if (counts[static_cast<std::size_t>(c)] > 0) centroids.row(c) /= counts[static_cast<std::size_t>(c)];
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        total += (features.row(static_cast<Eigen::Index>(i)) - centroids.row(labels[i])).squaredNorm();
    return total;
}

double ari(std::span<const int> a, std::span<const int> b) {
    const Contingency t = contingency(a, b);
    double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (const auto& [cell, c] : t.cells) index += choose2(c);
    for (const auto& [label, c] : t.rows) sum_rows += choose2(c);
    for (const auto& [label, c] : t.cols) sum_cols += choose2(c);
    const double pairs = choose2(t.n);
    if (pairs == 0.0) return 1.0;
    const double expected = sum_rows * sum_cols / pairs;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    // Both partitions trivial (all singletons or one cluster) and identical.
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

double nmi(std::span<const int> a, std::span<const int> b) {
    const Contingency t = contingency(a, b);
    if (t.n == 0.0) return 1.0;
    const double ha = entropy(t.rows, t.n), hb = entropy(t.cols, t.n);
    if (ha == 0.0 && hb == 0.0) return 1.0;
    double mi = 0.0;
    for (const auto& [cell, c] : t.cells) {
        const double pij = c / t.n;
        mi += pij * std::log(c * t.n / (t.rows.at(cell.first) * t.cols.at(cell.second)));
    }
    return std::clamp(mi / (0.5 * (ha + hb)), 0.0, 1.0);
}

EvaluationReport evaluate(const Partition& partition, const Eigen::MatrixXd& features,
                          const DistanceMatrix& distances, std::span<const double> voter_weights,
                          const ContiguityGraph& graph, const CostWeights& weights) {
    EvaluationReport report;
    report.silhouette = silhouette(partition.labels, distances);
    report.wcss = wcss(partition.labels, features);
    report.cost = total_cost(partition.labels, features, voter_weights, graph, weights);
    report.population_cv = report.cost.balance;
    report.disconnected_cantons = disconnected_cantons(partition.labels, graph);
    return report;
}

StabilityReport stability_from_partitions(std::span<const Partition> partitions) {
    const auto m = static_cast<Eigen::Index>(partitions.size());
    StabilityReport report;
    report.pairwise_ari = Eigen::MatrixXd::Identity(m, m);
    report.pairwise_nmi = Eigen::MatrixXd::Identity(m, m);
    std::vector<double> aris, nmis;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const auto& pa = partitions[static_cast<std::size_t>(i)].labels;
            const auto& pb = partitions[static_cast<std::size_t>(j)].labels;
            const double x = ari(pa, pb), y = nmi(pa, pb);
            report.pairwise_ari(i, j) = report.pairwise_ari(j, i) = x;
            report.pairwise_nmi(i, j) = report.pairwise_nmi(j, i) = y;
            aris.push_back(x);
            nmis.push_back(y);
        }
    const auto moments = [](const std::vector<double>& v, double& mean, double& std) {
        if (v.empty()) {
            mean = 1.0;
            std = 0.0;
            return;
        }
        mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        std = std::sqrt(var / static_cast<double>(v.size()));
    };
    moments(aris, report.mean_ari, report.std_ari);
    moments(nmis, report.mean_nmi, report.std_nmi);
    return report;
}

}  // namespace cantons
