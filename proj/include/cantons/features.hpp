#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cantons/ingest.hpp"

namespace cantons {

enum class Representation { BlocShares, RawParty, PCA5, NMF5 };

std::string_view to_string(Representation rep);
/// Accepts the display names and lowercase forms (`blocshares`, `pca_5`, `pca5`, ...).
Representation parse_representation(std::string_view text);

/// n x d municipality feature matrix for one representation.
struct FeatureMatrix {
    Representation representation = Representation::BlocShares;
    std::vector<std::string> row_ids;
    std::vector<std::string> column_names;
    Eigen::MatrixXd values;

    bool standardized = false;
    Eigen::VectorXd column_means;
    Eigen::VectorXd column_stds;
    std::vector<bool> degenerate_columns;  // zero variance at standardization time

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

/// Columns: mean share per bloc, population std of the share per bloc, mean
/// eligible voters. Always 11 columns.
FeatureMatrix bloc_shares_features(const AlignedPanel& panel, const BlocMapping& mapping);

/// Party vote shares averaged over the panel's elections. Columns are the
/// union of party symbols (sorted); a party absent from an election counts
/// as share 0 there.
FeatureMatrix raw_party_features(const AlignedPanel& panel);

struct PcaModel {
    Eigen::VectorXd mean;                // d
    Eigen::MatrixXd components;          // d x k, orthonormal columns
    Eigen::VectorXd explained_variance;  // k, non-increasing
};

/// Exact PCA from the eigendecomposition of the population covariance.
/// Each component's largest-magnitude loading is made positive.
PcaModel fit_pca(const Eigen::MatrixXd& data, Eigen::Index k);
Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& data);
Eigen::MatrixXd pca_reconstruct(const PcaModel& model, const Eigen::MatrixXd& scores);

FeatureMatrix pca_features(const FeatureMatrix& raw, Eigen::Index k = 5);

struct NmfOptions {
    Eigen::Index k = 5;
    std::uint64_t seed = 0;
    int max_iter = 500;
    double tol = 1e-5;
};

struct NmfResult {
    Eigen::MatrixXd w;  // n x k
    Eigen::MatrixXd h;  // k x d
    /// Squared Frobenius error after initialization and after every iteration.
    std::vector<double> objective;
    int iterations = 0;

    /// ||X - WH||_F / ||X||_F for the final factors.
    double relative_error(const Eigen::MatrixXd& data) const;
};

/// Lee-Seung multiplicative updates for min ||X - WH||_F^2, W, H >= 0.
/// Throws DomainError on a negative entry.
NmfResult fit_nmf(const Eigen::MatrixXd& data, const NmfOptions& options);

FeatureMatrix nmf_features(const FeatureMatrix& raw, const NmfOptions& options = {});

/// Zero mean, unit population std per column. Constant columns become 0
/// and are flagged in `degenerate_columns`.
FeatureMatrix standardize(const FeatureMatrix& matrix);

/// Builds the unstandardized matrix for a representation from a panel.
FeatureMatrix build_representation(Representation rep, const AlignedPanel& panel, const BlocMapping& mapping,
                                   std::uint64_t seed = 0);

/// `municipality,<col>...` delimited text.
std::string to_csv(const FeatureMatrix& matrix);

}  // namespace cantons
