#include "cantons/features.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "cantons/error.hpp"
#include "csv.hpp"

namespace cantons {

namespace {

std::string lower(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '_' || c == '-' || c == ' ') continue;
        out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    }
    return out;
}

void require_finite(const Eigen::MatrixXd& m, std::string_view what) {
    if (!m.allFinite()) throw DomainError(std::string(what) + " contains non-finite values");
}

}  // namespace

std::string_view to_string(Representation rep) {
    switch (rep) {
        case Representation::BlocShares: return "BlocShares";
        case Representation::RawParty: return "RawParty";
        case Representation::PCA5: return "PCA_5";
        case Representation::NMF5: return "NMF_5";
    }
    return "BlocShares";
}

Representation parse_representation(std::string_view text) {
    const std::string key = lower(text);
    if (key == "blocshares" || key == "bloc") return Representation::BlocShares;
    if (key == "rawparty" || key == "raw") return Representation::RawParty;
    if (key == "pca5" || key == "pca") return Representation::PCA5;
    if (key == "nmf5" || key == "nmf") return Representation::NMF5;
    throw ParseError("unknown representation '" + std::string(text) + "'", 0);
}

// ---------------------------------------------------------------------------

FeatureMatrix bloc_shares_features(const AlignedPanel& panel, const BlocMapping& mapping) {
    const auto n = static_cast<Eigen::Index>(panel.size());
    const std::size_t elections = panel.election_count();
    if (elections == 0) throw ValidationError("panel has no elections");

    std::vector<std::vector<BlocVector>> per_election;
    for (const int id : panel.election_ids) per_election.push_back(bloc_vote_shares(panel, mapping, id));

    FeatureMatrix fm;
    fm.representation = Representation::BlocShares;
    fm.row_ids = panel.municipality_ids;
    for (std::size_t b = 0; b < kNumBlocs; ++b)
        fm.column_names.push_back("mean_" + std::string(to_string(static_cast<Bloc>(b))));
    for (std::size_t b = 0; b < kNumBlocs; ++b)
        fm.column_names.push_back("std_" + std::string(to_string(static_cast<Bloc>(b))));
    fm.column_names.push_back("avg_voters");

    fm.values = Eigen::MatrixXd::Zero(n, 2 * kNumBlocs + 1);
    const double count = static_cast<double>(elections);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = static_cast<std::size_t>(i);
        for (std::size_t b = 0; b < kNumBlocs; ++b) {
            double mean = 0.0;
            for (const auto& shares : per_election) mean += shares[row][b];
            mean /= count;
            double var = 0.0;
            for (const auto& shares : per_election) var += (shares[row][b] - mean) * (shares[row][b] - mean);
            var /= count;
            fm.values(i, static_cast<Eigen::Index>(b)) = mean;
            fm.values(i, static_cast<Eigen::Index>(kNumBlocs + b)) = std::sqrt(var);
        }
        fm.values(i, 2 * kNumBlocs) = panel.voter_weight[row];
    }
    return fm;
}

FeatureMatrix raw_party_features(const AlignedPanel& panel) {
    std::set<std::string> all_parties;
    for (const auto& list : panel.parties) all_parties.insert(list.begin(), list.end());

    FeatureMatrix fm;
    fm.representation = Representation::RawParty;
    fm.row_ids = panel.municipality_ids;
    fm.column_names.assign(all_parties.begin(), all_parties.end());
    const auto n = static_cast<Eigen::Index>(panel.size());
    const auto d = static_cast<Eigen::Index>(fm.column_names.size());
    fm.values = Eigen::MatrixXd::Zero(n, d);
    if (panel.election_count() == 0) return fm;

    const double elections = static_cast<double>(panel.election_count());
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = static_cast<std::size_t>(i);
        for (std::size_t e = 0; e < panel.election_count(); ++e) {
            const VoteCount denominator = panel.party_vote_total(row, e);
            if (denominator == 0)
                throw ValidationError("municipality '" + panel.municipality_ids[row] +
                                      "' has zero votes in election " + std::to_string(panel.election_ids[e]));
            for (Eigen::Index c = 0; c < d; ++c) {
                const auto& votes = panel.votes[row][e];
                const auto it = votes.find(fm.column_names[static_cast<std::size_t>(c)]);
                if (it != votes.end())
                    fm.values(i, c) += static_cast<double>(it->second) / static_cast<double>(denominator);
            }
        }
    }
    fm.values /= elections;
    return fm;
}

// ---------------------------------------------------------------------------
// PCA

PcaModel fit_pca(const Eigen::MatrixXd& data, Eigen::Index k) {
    const Eigen::Index n = data.rows(), d = data.cols();
    if (k < 1 || k > std::min(n, d))
        throw DomainError("PCA needs 1 <= k <= min(n, d); k=" + std::to_string(k) + ", n=" + std::to_string(n) +
                          ", d=" + std::to_string(d));
    require_finite(data, "PCA input");

    PcaModel model;
    model.mean = data.colwise().mean().transpose();
    const Eigen::MatrixXd centered = data.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw DomainError("covariance eigendecomposition failed");

    // Eigen returns ascending eigenvalues.
    model.components.resize(d, k);
    model.explained_variance.resize(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const Eigen::Index src = d - 1 - c;
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        Eigen::Index pivot = 0;
        v.cwiseAbs().maxCoeff(&pivot);
        if (v(pivot) < 0) v = -v;
        model.components.col(c) = v;
        model.explained_variance(c) = std::max(0.0, solver.eigenvalues()(src));
    }
    return model;
}

Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& data) {
    return (data.rowwise() - model.mean.transpose()) * model.components;
}

Eigen::MatrixXd pca_reconstruct(const PcaModel& model, const Eigen::MatrixXd& scores) {
    return (scores * model.components.transpose()).rowwise() + model.mean.transpose();
}

FeatureMatrix pca_features(const FeatureMatrix& raw, Eigen::Index k) {
    const PcaModel model = fit_pca(raw.values, k);
    FeatureMatrix fm;
    fm.representation = Representation::PCA5;
    fm.row_ids = raw.row_ids;
    for (Eigen::Index c = 0; c < k; ++c) fm.column_names.push_back("pc" + std::to_string(c + 1));
    fm.values = pca_transform(model, raw.values);
    return fm;
}

// ---------------------------------------------------------------------------
// NMF

double NmfResult::relative_error(const Eigen::MatrixXd& data) const {
    const double norm = data.norm();
    const double err = (data - w * h).norm();
    return norm > 0 ? err / norm : err;
}

NmfResult fit_nmf(const Eigen::MatrixXd& data, const NmfOptions& options) {
    if (options.k < 1) throw DomainError("NMF rank must be >= 1");
    if (options.max_iter < 0) throw DomainError("NMF max_iter must be >= 0");
    require_finite(data, "NMF input");
    if ((data.array() < 0.0).any()) throw DomainError("NMF input has a negative entry");

    const Eigen::Index n = data.rows(), d = data.cols(), k = options.k;
    const double mean = data.size() > 0 ? data.mean() : 0.0;
    const double scale = std::sqrt(mean / static_cast<double>(k));

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    NmfResult result;
    result.w.resize(n, k);
    result.h.resize(k, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < k; ++j) result.w(i, j) = scale * unit(rng);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < d; ++j) result.h(i, j) = scale * unit(rng);

    auto& w = result.w;
    auto& h = result.h;
    const auto objective = [&] { return (data - w * h).squaredNorm(); };
    const auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };

    result.objective.push_back(objective());
    for (int it = 0; it < options.max_iter; ++it) {
        const Eigen::MatrixXd h_num = w.transpose() * data;
        const Eigen::MatrixXd h_den = (w.transpose() * w) * h;
        h = h.cwiseProduct(h_num.binaryExpr(h_den, ratio));

        const Eigen::MatrixXd w_num = data * h.transpose();
        const Eigen::MatrixXd w_den = w * (h * h.transpose());
        w = w.cwiseProduct(w_num.binaryExpr(w_den, ratio));

        const double prev = std::sqrt(result.objective.back());
        result.objective.push_back(objective());
        result.iterations = it + 1;
        const double cur = std::sqrt(result.objective.back());
        if (prev <= 0.0 || (prev - cur) / prev < options.tol) break;
    }
    return result;
}

FeatureMatrix nmf_features(const FeatureMatrix& raw, const NmfOptions& options) {
    const NmfResult result = fit_nmf(raw.values, options);
    FeatureMatrix fm;
    fm.representation = Representation::NMF5;
    fm.row_ids = raw.row_ids;
    for (Eigen::Index c = 0; c < options.k; ++c) fm.column_names.push_back("nmf" + std::to_string(c + 1));
    fm.values = result.w;
    return fm;
}

// ---------------------------------------------------------------------------

FeatureMatrix standardize(const FeatureMatrix& matrix) {
    FeatureMatrix out = matrix;
    const Eigen::Index n = matrix.rows(), d = matrix.cols();
    out.standardized = true;
    out.column_means = Eigen::VectorXd::Zero(d);
    out.column_stds = Eigen::VectorXd::Zero(d);
    out.degenerate_columns.assign(static_cast<std::size_t>(d), false);
    if (n == 0) return out;

    for (Eigen::Index c = 0; c < d; ++c) {
        const auto col = matrix.values.col(c);
        const double mean = col.mean();
        const double std = std::sqrt((col.array() - mean).square().mean());
        out.column_means(c) = mean;
        out.column_stds(c) = std;
        const double scale = std::max(1.0, col.cwiseAbs().maxCoeff());
        if (!(std > 1e-12 * scale)) {
            out.values.col(c).setZero();
            out.degenerate_columns[static_cast<std::size_t>(c)] = true;
        } else {
            out.values.col(c) = (col.array() - mean) / std;
        }
    }
    return out;
}

FeatureMatrix build_representation(Representation rep, const AlignedPanel& panel, const BlocMapping& mapping,
                                   std::uint64_t seed) {
    switch (rep) {
        case Representation::BlocShares: return bloc_shares_features(panel, mapping);
        case Representation::RawParty: return raw_party_features(panel);
        case Representation::PCA5: return pca_features(raw_party_features(panel), 5);
        case Representation::NMF5: {
            NmfOptions options;
            options.seed = seed;
            return nmf_features(raw_party_features(panel), options);
        }
    }
    throw DomainError("unknown representation");
}

std::string to_csv(const FeatureMatrix& matrix) {
    std::ostringstream out;
    out.precision(17);
    out << "municipality";
    for (const auto& name : matrix.column_names) out << ',' << detail::csv_escape(name);
    out << '\n';
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        out << detail::csv_escape(matrix.row_ids[static_cast<std::size_t>(i)]);
        for (Eigen::Index c = 0; c < matrix.cols(); ++c) out << ',' << matrix.values(i, c);
        out << '\n';
    }
    return out.str();
}

}  // namespace cantons
