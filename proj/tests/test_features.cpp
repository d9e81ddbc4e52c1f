#include <doctest.h>

#include <random>

#include "cantons/dataset.hpp"
#include "cantons/error.hpp"
#include "cantons/features.hpp"
#include "helpers.hpp"

using namespace cantons;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d, bool nonnegative) {
    Eigen::MatrixXd m(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = nonnegative ? testing::unit(rng) : 2.0 * testing::unit(rng) - 1.0;
    return m;
}

const Dataset& fixture() {
    static const Dataset data = load_dataset(testing::fixture_dir());
    return data;
}

}  // namespace

TEST_CASE("bloc share features have 11 columns") {
    const auto f = bloc_shares_features(fixture().panel, fixture().mapping);
    CHECK(f.cols() == 11);
    CHECK(f.rows() == 229);
    CHECK(f.column_names.size() == 11);
    CHECK(f.row_ids == fixture().panel.municipality_ids);
    const auto shares = mean_bloc_shares(fixture().panel, fixture().mapping);
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
        for (int b = 0; b < 5; ++b) CHECK(f.values(i, b) == doctest::Approx(shares[static_cast<std::size_t>(i)][b]));
        for (int b = 5; b < 10; ++b) CHECK(f.values(i, b) >= 0.0);
        CHECK(f.values(i, 10) == doctest::Approx(fixture().panel.voter_weight[static_cast<std::size_t>(i)]));
    }
}

TEST_CASE("raw party features average shares over elections") {
    const auto f = raw_party_features(fixture().panel);
    CHECK(f.rows() == 229);
    CHECK(std::is_sorted(f.column_names.begin(), f.column_names.end()));
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
        CHECK(f.values.row(i).minCoeff() >= 0.0);
        CHECK(f.values.row(i).sum() <= 1.0 + 1e-9);
    }
}

TEST_CASE("standardize gives zero mean and unit population std") {
    std::mt19937_64 rng(5);
    FeatureMatrix m;
    m.values = random_matrix(rng, 40, 4, false);
    m.values.col(2).setConstant(3.0);
    const auto s = standardize(m);
    CHECK(s.standardized);
    CHECK(s.degenerate_columns == std::vector<bool>{false, false, true, false});
    for (Eigen::Index j = 0; j < 4; ++j) {
        const double mean = s.values.col(j).mean();
        const double var = (s.values.col(j).array() - mean).square().mean();
        CHECK(std::abs(mean) < 1e-12);
        if (j != 2) CHECK(var == doctest::Approx(1.0));
        else CHECK(s.values.col(j).isZero());
    }
}

TEST_CASE("PCA components are orthonormal and variances non-increasing") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index d = 5 + static_cast<Eigen::Index>(rng() % 8);
        const Eigen::MatrixXd x = random_matrix(rng, 30 + static_cast<Eigen::Index>(rng() % 30), d, false);
        const auto model = fit_pca(x, 5);
        const Eigen::MatrixXd gram = model.components.transpose() * model.components;
        CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
        for (Eigen::Index k = 1; k < 5; ++k) CHECK(model.explained_variance(k) <= model.explained_variance(k - 1) + 1e-12);
        // Scores carry exactly the explained variance.
        const Eigen::MatrixXd scores = pca_transform(model, x);
        for (Eigen::Index k = 0; k < 5; ++k) {
            const double var = (scores.col(k).array() - scores.col(k).mean()).square().mean();
            CHECK(var == doctest::Approx(model.explained_variance(k)).epsilon(1e-9));
        }
    }
}

TEST_CASE("PCA with full rank reconstructs exactly") {
    std::mt19937_64 rng(2);
    const Eigen::MatrixXd x = random_matrix(rng, 25, 5, false);
    const auto model = fit_pca(x, 5);
    const Eigen::MatrixXd back = pca_reconstruct(model, pca_transform(model, x));
    CHECK((back - x).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("NMF objective is monotone and factors non-negative") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd x = random_matrix(rng, 40, 8, true);
        NmfOptions opt;
        opt.seed = rng();
        const auto r = fit_nmf(x, opt);
        CHECK(r.w.minCoeff() >= 0.0);
        CHECK(r.h.minCoeff() >= 0.0);
        CHECK(r.w.cols() == 5);
        CHECK(r.h.rows() == 5);
        for (std::size_t i = 1; i < r.objective.size(); ++i)
            CHECK(r.objective[i] <= r.objective[i - 1] * (1.0 + 1e-12) + 1e-15);
        CHECK(r.iterations <= 500);
        CHECK(r.relative_error(x) < 1.0);
    }
}

TEST_CASE("NMF recovers a planted low-rank factorization") {
    std::mt19937_64 rng(29);
    const Eigen::MatrixXd w = random_matrix(rng, 50, 3, true);
    const Eigen::MatrixXd h = random_matrix(rng, 3, 10, true);
    NmfOptions opt;
    opt.k = 3;
    opt.max_iter = 5000;
    opt.tol = 1e-12;
    const auto r = fit_nmf(w * h, opt);
    CHECK(r.relative_error(w * h) < 0.05);
}

TEST_CASE("NMF rejects negative input and is seeded") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Ones(6, 6);
    x(2, 3) = -0.1;
    CHECK_THROWS_AS(fit_nmf(x, {}), DomainError);
    std::mt19937_64 rng(31);
    const Eigen::MatrixXd y = random_matrix(rng, 20, 6, true);
    NmfOptions opt;
    opt.seed = 9;
    CHECK(fit_nmf(y, opt).w == fit_nmf(y, opt).w);
}

TEST_CASE("representations on the fixture") {
    for (auto rep : {Representation::BlocShares, Representation::RawParty, Representation::PCA5, Representation::NMF5}) {
        const auto f = build_representation(rep, fixture().panel, fixture().mapping);
        CHECK(f.rows() == 229);
        CHECK(f.representation == rep);
        CHECK(f.values.allFinite());
        if (rep == Representation::PCA5 || rep == Representation::NMF5) CHECK(f.cols() == 5);
        if (rep == Representation::NMF5) CHECK(f.values.minCoeff() >= 0.0);
    }
}

TEST_CASE("representation names") {
    CHECK(parse_representation("BlocShares") == Representation::BlocShares);
    CHECK(parse_representation("pca5") == Representation::PCA5);
    CHECK(parse_representation("NMF_5") == Representation::NMF5);
    CHECK(to_string(Representation::RawParty) == "RawParty");
    CHECK_THROWS(parse_representation("tsne"));
}

TEST_CASE("feature CSV export") {
    FeatureMatrix m;
    m.row_ids = {"a", "b"};
    m.column_names = {"x", "y"};
    m.values = Eigen::MatrixXd::Identity(2, 2);
    const auto text = to_csv(m);
    CHECK(text.rfind("municipality,x,y\n", 0) == 0);
    CHECK(text.find("\na,1,0\n") != std::string::npos);
}
