#include "cantons/objective.hpp"

#include <algorithm>
#include <cmath>

#include "cantons/error.hpp"

namespace cantons {

namespace {

int label_span(std::span<const int> labels) {
    int k = 0;
    for (int l : labels) {
        if (l < 0) throw DomainError("partition is not total");
        k = std::max(k, l + 1);
    }
    return k;
}

}  // namespace

double homogeneity(std::span<const int> labels, const Eigen::MatrixXd& features) {
    if (static_cast<Eigen::Index>(labels.size()) != features.rows())
        throw DomainError("labels and features disagree on the number of municipalities");
    const int k = label_span(labels);
    const Eigen::Index d = features.cols();
    if (labels.empty() || d == 0) return 0.0;

    std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < labels.size(); ++i)
        members[static_cast<std::size_t>(labels[i])].push_back(static_cast<Eigen::Index>(i));

    const double n = static_cast<double>(labels.size());
    double total = 0.0;
    for (std::size_t c = 0; c < members.size(); ++c) {
        const auto& m = members[c];
        if (m.empty()) throw DomainError("canton " + std::to_string(c) + " is empty");
        if (m.size() == 1) continue;
        const double size = static_cast<double>(m.size());
        double var_sum = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            double mean = 0.0;
            for (Eigen::Index i : m) mean += features(i, j);
            mean /= size;
            double var = 0.0;
            for (Eigen::Index i : m) var += (features(i, j) - mean) * (features(i, j) - mean);
            var_sum += var / size;
        }
        total += (size / n) * (var_sum / static_cast<double>(d));
    }
    return total;
}

double balance(std::span<const int> labels, std::span<const double> voter_weights) {
    if (labels.size() != voter_weights.size()) throw DomainError("labels and voter weights differ in length");
    const int k = label_span(labels);
    if (k == 0) throw DomainError("balance of a partition with no cantons");
    std::vector<double> totals(static_cast<std::size_t>(k), 0.0);
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!(voter_weights[i] > 0.0)) throw DomainError("voter weights must be positive");
        totals[static_cast<std::size_t>(labels[i])] += voter_weights[i];
        ++counts[static_cast<std::size_t>(labels[i])];
    }
    if (std::find(counts.begin(), counts.end(), 0) != counts.end()) throw DomainError("empty canton");
    double mean = 0.0;
    for (double t : totals) mean += t;
    mean /= k;
    double var = 0.0;
    for (double t : totals) var += (t - mean) * (t - mean);
    var /= k;
    return std::sqrt(var) / mean;
}

double compactness(std::span<const int> labels, const ContiguityGraph& graph) {
    if (labels.size() != graph.node_count()) throw DomainError("partition does not cover the graph");
    std::size_t assigned = 0, cut = 0;
    for (const Edge& e : graph.edges()) {
        if (labels[e.u] < 0 || labels[e.v] < 0) continue;
        ++assigned;
        if (labels[e.u] != labels[e.v]) ++cut;
    }
    return assigned == 0 ? 0.0 : static_cast<double>(cut) / static_cast<double>(assigned);
}

PartitionCost total_cost(std::span<const int> labels, const Eigen::MatrixXd& features,
                         std::span<const double> voter_weights, const ContiguityGraph& graph,
                         const CostWeights& weights) {
    PartitionCost c;
    c.homogeneity = homogeneity(labels, features);
    c.balance = balance(labels, voter_weights);
    c.compactness = compactness(labels, graph);
    c.total = weights.alpha * c.homogeneity + weights.beta * c.balance + weights.gamma * c.compactness;
    return c;
}

// ---------------------------------------------------------------------------

CostTracker::CostTracker(std::vector<int> labels, const Eigen::MatrixXd& features,
                         std::span<const double> voter_weights, const ContiguityGraph& graph,
                         const CostWeights& weights)
    : labels_(std::move(labels)), features_(features), weights_(voter_weights), graph_(graph),
      cost_weights_(weights) {
    const int k = label_span(labels_);
    if (k == 0) throw DomainError("cost of an empty partition");
    const Eigen::Index d = features.cols();
    counts_.assign(static_cast<std::size_t>(k), 0);
    sums_ = Eigen::MatrixXd::Zero(k, d);
    sum_sqs_ = Eigen::MatrixXd::Zero(k, d);
    totals_.assign(static_cast<std::size_t>(k), 0.0);
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        const int c = labels_[i];
        ++counts_[static_cast<std::size_t>(c)];
        const auto row = features.row(static_cast<Eigen::Index>(i));
        sums_.row(c) += row;
        sum_sqs_.row(c) += row.cwiseAbs2();
        totals_[static_cast<std::size_t>(c)] += voter_weights[i];
    }
    if (std::find(counts_.begin(), counts_.end(), 0) != counts_.end()) throw DomainError("empty canton");
    scatter_.resize(counts_.size());
    for (std::size_t c = 0; c < counts_.size(); ++c) {
        scatter_[c] = canton_scatter(c);
        scatter_total_ += scatter_[c];
    }
    for (const Edge& e : graph.edges())
        if (labels_[e.u] != labels_[e.v]) ++cut_;
}

double CostTracker::canton_scatter(std::size_t c) const {
    const int m = counts_[c];
    if (m <= 1) return 0.0;
    const auto row = static_cast<Eigen::Index>(c);
    return std::max(0.0, (sum_sqs_.row(row) - sums_.row(row).cwiseAbs2() / m).sum());
}

double CostTracker::canton_scatter_with(std::size_t c, std::size_t node, double sign) const {
    const int m = counts_[c] + static_cast<int>(sign);
    if (m <= 1) return 0.0;
    const auto row = static_cast<Eigen::Index>(c);
    const auto f = features_.row(static_cast<Eigen::Index>(node));
    const Eigen::RowVectorXd s = sums_.row(row) + sign * f;
    const Eigen::RowVectorXd q = sum_sqs_.row(row) + sign * f.cwiseAbs2();
    return std::max(0.0, (q - s.cwiseAbs2() / m).sum());
}

double CostTracker::balance_with(std::size_t from, std::size_t dest, double moved) const {
    const double k = static_cast<double>(totals_.size());
    const auto total = [&](std::size_t c) {
        double t = totals_[c];
        if (c == from) t -= moved;
        if (c == dest) t += moved;
        return t;
    };
    double mean = 0.0;
    for (std::size_t c = 0; c < totals_.size(); ++c) mean += total(c);
    mean /= k;
    double var = 0.0;
    for (std::size_t c = 0; c < totals_.size(); ++c) var += (total(c) - mean) * (total(c) - mean);
    return std::sqrt(var / k) / mean;
}

PartitionCost CostTracker::combine(double scatter_total, double bal, double cut) const {
    PartitionCost c;
    const double n = static_cast<double>(labels_.size());
    const double d = static_cast<double>(features_.cols());
    c.homogeneity = d > 0 ? scatter_total / (n * d) : 0.0;
    c.balance = bal;
    c.compactness = graph_.edge_count() == 0 ? 0.0 : cut / static_cast<double>(graph_.edge_count());
    c.total = cost_weights_.alpha * c.homogeneity + cost_weights_.beta * c.balance +
              cost_weights_.gamma * c.compactness;
    return c;
}

PartitionCost CostTracker::cost() const {
    return combine(scatter_total_, balance_with(0, 0, 0.0), static_cast<double>(cut_));
}

PartitionCost CostTracker::cost_after_move(std::size_t node, int to) const {
    const auto from = static_cast<std::size_t>(labels_[node]);
    const auto dest = static_cast<std::size_t>(to);
    if (from == dest) return cost();

    const double scatter = scatter_total_ - scatter_[from] - scatter_[dest] +
                           canton_scatter_with(from, node, -1.0) + canton_scatter_with(dest, node, +1.0);

    long long cut = static_cast<long long>(cut_);
    for (const std::size_t v : graph_.neighbors(node)) {
        const auto lv = static_cast<std::size_t>(labels_[v]);
        if (lv == from) ++cut;
        if (lv == dest) --cut;
    }
    return combine(scatter, balance_with(from, dest, weights_[node]), static_cast<double>(cut));
}

void CostTracker::apply_move(std::size_t node, int to) {
    const auto from = static_cast<std::size_t>(labels_[node]);
    const auto dest = static_cast<std::size_t>(to);
    if (from == dest) return;

    for (const std::size_t v : graph_.neighbors(node)) {
        const auto lv = static_cast<std::size_t>(labels_[v]);
        if (lv == from) ++cut_;
        if (lv == dest) --cut_;
    }

    const auto f = features_.row(static_cast<Eigen::Index>(node));
    sums_.row(static_cast<Eigen::Index>(from)) -= f;
    sum_sqs_.row(static_cast<Eigen::Index>(from)) -= f.cwiseAbs2();
    sums_.row(static_cast<Eigen::Index>(dest)) += f;
    sum_sqs_.row(static_cast<Eigen::Index>(dest)) += f.cwiseAbs2();
    --counts_[from];
    ++counts_[dest];

    totals_[from] -= weights_[node];
    totals_[dest] += weights_[node];

    scatter_total_ -= scatter_[from] + scatter_[dest];
    scatter_[from] = canton_scatter(from);
    scatter_[dest] = canton_scatter(dest);
    scatter_total_ += scatter_[from] + scatter_[dest];

    labels_[node] = to;
}

}  // namespace cantons
