#include <doctest.h>

#include <random>

#include "cantons/distances.hpp"
#include "cantons/error.hpp"
#include "cantons/features.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace cantons;

namespace {

std::vector<double> simplex_point(std::mt19937_64& rng, std::size_t d, bool sparse) {
    std::vector<double> p(d);
    for (auto& v : p) v = (sparse && testing::unit(rng) < 0.3) ? 0.0 : testing::unit(rng);
    if (std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; })) p[0] = 1.0;
    return p;
}

}  // namespace

TEST_CASE("jensen-shannon matches the KL definition") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 500; ++i) {
        const std::size_t d = 2 + rng() % 10;
        const auto p = simplex_point(rng, d, true);
        const auto q = simplex_point(rng, d, true);
        CHECK(distance(Metric::JensenShannon, p, q) == doctest::Approx(oracle::jsd(p, q)).epsilon(1e-12));
    }
}

TEST_CASE("jensen-shannon is a bounded metric") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 500; ++i) {
        const auto p = simplex_point(rng, 6, true), q = simplex_point(rng, 6, true), r = simplex_point(rng, 6, true);
        const double pq = distance(Metric::JensenShannon, p, q);
        CHECK(pq >= 0.0);
        CHECK(pq <= 1.0 + 1e-12);
        CHECK(distance(Metric::JensenShannon, p, p) <= 1e-12);
        CHECK(pq == doctest::Approx(distance(Metric::JensenShannon, q, p)).epsilon(1e-12));
        CHECK(distance(Metric::JensenShannon, p, r) <= pq + distance(Metric::JensenShannon, q, r) + 1e-12);
    }
    const std::vector<double> a{1, 0}, b{0, 1};
    CHECK(distance(Metric::JensenShannon, a, b) == doctest::Approx(1.0));
}

TEST_CASE("jensen-shannon renormalizes and rejects invalid input") {
    const std::vector<double> p{1, 2, 3}, p2{2, 4, 6}, q{3, 2, 1};
    CHECK(distance(Metric::JensenShannon, p, q) == doctest::Approx(distance(Metric::JensenShannon, p2, q)));
    const std::vector<double> neg{1, -1, 1}, zero{0, 0, 0};
    CHECK_THROWS_AS(distance(Metric::JensenShannon, neg, q), DomainError);
    CHECK_THROWS_AS(distance(Metric::JensenShannon, zero, q), DomainError);
}

TEST_CASE("euclidean and cosine") {
    const std::vector<double> a{3, 0}, b{0, 4}, c{6, 0};
    CHECK(distance(Metric::Euclidean, a, b) == doctest::Approx(5.0));
    CHECK(distance(Metric::Cosine, a, b) == doctest::Approx(1.0));
    CHECK(distance(Metric::Cosine, a, c) == doctest::Approx(0.0));
    CHECK(distance(Metric::Cosine, a, a) == 0.0);
    const std::vector<double> z{0, 0};
    CHECK_THROWS_AS(distance(Metric::Cosine, a, z), DomainError);
    const std::vector<double> three{1, 2, 3};
    CHECK_THROWS(distance(Metric::Euclidean, a, three));
}

TEST_CASE("pairwise matrix is symmetric with zero diagonal") {
    std::mt19937_64 rng(47);
    Eigen::MatrixXd x(15, 4);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = testing::unit(rng) + 0.01;
    for (auto metric : {Metric::Euclidean, Metric::Cosine, Metric::JensenShannon}) {
        const auto dm = pairwise_matrix(metric, x);
        CHECK(dm.size() == 15);
        CHECK((dm.values - dm.values.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(dm.values.diagonal().cwiseAbs().maxCoeff() <= 1e-12);
        Eigen::RowVectorXd a = x.row(2), b = x.row(9);
        CHECK(dm(2, 9) == doctest::Approx(distance(metric, std::span<const double>(a.data(), 4),
                                                   std::span<const double>(b.data(), 4))));
    }
}

TEST_CASE("metric names") {
    CHECK(parse_metric("JSD") == Metric::JensenShannon);
    CHECK(parse_metric("cosine") == Metric::Cosine);
    CHECK(to_string(Metric::Euclidean) == "Euclidean");
    CHECK_THROWS(parse_metric("manhattan"));
}
