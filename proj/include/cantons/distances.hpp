#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cantons/features.hpp"

namespace cantons {

enum class Metric { Euclidean, Cosine, JensenShannon };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view text);

/// Political dissimilarity between two feature vectors.
///
/// Euclidean is the L2 norm of p - q. Cosine is 1 - cos(p, q) and rejects a
/// zero vector. JensenShannon renormalizes both inputs to unit sum and
/// returns the square root of the base-2 divergence, so the value lies in
/// [0, 1]; negative entries and zero-sum inputs are rejected.
double distance(Metric metric, std::span<const double> p, std::span<const double> q);

struct DistanceMatrix {
    Metric metric = Metric::Euclidean;
    std::vector<std::string> row_ids;
    Eigen::MatrixXd values;  // symmetric, zero diagonal

    Eigen::Index size() const { return values.rows(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return values(i, j); }
};

DistanceMatrix pairwise_matrix(Metric metric, const FeatureMatrix& features);
DistanceMatrix pairwise_matrix(Metric metric, const Eigen::MatrixXd& rows,
                               std::vector<std::string> row_ids = {});

}  // namespace cantons
