#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "cantons/geograph.hpp"

namespace cantons {

struct CostWeights {
    double alpha = 0.4;  // homogeneity
    double beta = 0.4;   // balance
    double gamma = 0.2;  // compactness
};

struct PartitionCost {
    double homogeneity = 0.0;
    double balance = 0.0;
    double compactness = 0.0;
    double total = 0.0;
};

// Labels are canton ids 0..K-1 in graph node order. A label in 0..max that
// has no members is an empty canton.

/// sum_k |C_k|/n * mean over dimensions of the within-canton population
/// variance. Throws DomainError on an empty canton or unassigned node.
double homogeneity(std::span<const int> labels, const Eigen::MatrixXd& features);

/// Population std of canton voter totals over their mean.
double balance(std::span<const int> labels, std::span<const double> voter_weights);

/// Cut edges over edges with both endpoints assigned (label >= 0); 0 when
/// there are none.
double compactness(std::span<const int> labels, const ContiguityGraph& graph);

PartitionCost total_cost(std::span<const int> labels, const Eigen::MatrixXd& features,
                         std::span<const double> voter_weights, const ContiguityGraph& graph,
                         const CostWeights& weights = {});

/// Incrementally maintained cost of a total partition, for local search.
/// Move deltas match full recomputation to within 1e-9.
class CostTracker {
public:
    CostTracker(std::vector<int> labels, const Eigen::MatrixXd& features, std::span<const double> voter_weights,
                const ContiguityGraph& graph, const CostWeights& weights);

    const std::vector<int>& labels() const { return labels_; }
    int canton_size(int canton) const { return counts_[static_cast<std::size_t>(canton)]; }
    int canton_count() const { return static_cast<int>(counts_.size()); }

    PartitionCost cost() const;
    /// Cost after moving `node` to canton `to`, without applying it.
    PartitionCost cost_after_move(std::size_t node, int to) const;
    void apply_move(std::size_t node, int to);

private:
    double canton_scatter(std::size_t canton) const;
    double canton_scatter_with(std::size_t canton, std::size_t node, double sign) const;
    double balance_with(std::size_t from, std::size_t dest, double moved) const;
    PartitionCost combine(double scatter_total, double balance, double cut) const;

    std::vector<int> labels_;
    const Eigen::MatrixXd& features_;
    std::span<const double> weights_;
    const ContiguityGraph& graph_;
    CostWeights cost_weights_;

    std::vector<int> counts_;
    Eigen::MatrixXd sums_;     // K x d
    Eigen::MatrixXd sum_sqs_;  // K x d
    std::vector<double> totals_;
    std::vector<double> scatter_;  // per canton sum_j (sumsq - sum^2/m)
    double scatter_total_ = 0.0;
    std::size_t cut_ = 0;
};

}  // namespace cantons
