#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "cantons/distances.hpp"
#include "cantons/geograph.hpp"
#include "cantons/objective.hpp"
#include "cantons/partition.hpp"

namespace cantons {

/// Mean silhouette under a precomputed distance matrix. Points in singleton
/// cantons score 0, and so does a point with a = b = 0. Undefined (nullopt)
/// unless 2 <= number of cantons <= n - 1.
std::optional<double> silhouette(std::span<const int> labels, const DistanceMatrix& distances);

/// Sum of squared Euclidean deviations from canton centroids.
double wcss(std::span<const int> labels, const Eigen::MatrixXd& features);

/// Adjusted Rand Index from the contingency table. Throws DomainError when
/// the label vectors differ in length.
double ari(std::span<const int> a, std::span<const int> b);

/// Mutual information over the arithmetic mean of the two entropies. Two
/// single-cluster partitions score 1.
double nmi(std::span<const int> a, std::span<const int> b);

struct EvaluationReport {
    std::optional<double> silhouette;
    double wcss = 0.0;
    double population_cv = 0.0;
    int disconnected_cantons = 0;
    PartitionCost cost;
};

/// `features` should be the standardized matrix; `distances` the matrix of
/// the configured metric.
EvaluationReport evaluate(const Partition& partition, const Eigen::MatrixXd& features,
                          const DistanceMatrix& distances, std::span<const double> voter_weights,
                          const ContiguityGraph& graph, const CostWeights& weights = {});

struct StabilityReport {
    Eigen::MatrixXd pairwise_ari;  // symmetric, unit diagonal
    Eigen::MatrixXd pairwise_nmi;
    double mean_ari = 0.0, std_ari = 0.0;
    double mean_nmi = 0.0, std_nmi = 0.0;  // population std over distinct pairs
};

/// Pairwise agreement between per-election partitions of the same node set.
StabilityReport stability_from_partitions(std::span<const Partition> partitions);

}  // namespace cantons
