#include <doctest.h>

#include <random>

#include "cantons/distances.hpp"
#include "cantons/error.hpp"
#include "cantons/evaluation.hpp"
#include "cantons/geograph.hpp"
#include "cantons/partition.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace cantons;

namespace {

std::vector<int> random_labels(std::mt19937_64& rng, std::size_t n, int k) {
    std::vector<int> l(n);
    for (auto& v : l) v = static_cast<int>(rng() % static_cast<std::uint64_t>(k));
    return l;
}

Eigen::MatrixXd random_points(std::mt19937_64& rng, std::size_t n, Eigen::Index d) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), d);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = testing::unit(rng);
    return x;
}

}  // namespace

TEST_CASE("silhouette matches the reference") {
    std::mt19937_64 rng(201);
    int defined = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 11;
        const auto labels = random_labels(rng, n, 1 + static_cast<int>(rng() % n));
        const auto dm = pairwise_matrix(Metric::Euclidean, random_points(rng, n, 3));
        const auto got = silhouette(labels, dm);
        const auto want = oracle::silhouette(labels, dm.values);
        REQUIRE(got.has_value() == want.has_value());
        if (got) {
            ++defined;
            CHECK(std::abs(*got - *want) < 1e-9);
        }
    }
    CHECK(defined > 100);
}

TEST_CASE("silhouette edge cases") {
    Eigen::MatrixXd x(4, 1);
    x << 0, 0.1, 5, 5.1;
    const auto dm = pairwise_matrix(Metric::Euclidean, x);
    const std::vector<int> all_one{0, 0, 0, 0}, all_single{0, 1, 2, 3}, good{0, 0, 1, 1};
    CHECK_FALSE(silhouette(all_one, dm).has_value());
    CHECK_FALSE(silhouette(all_single, dm).has_value());
    CHECK(*silhouette(good, dm) > 0.9);
    // Identical points: a = b = 0 scores 0.
    const auto flat = pairwise_matrix(Metric::Euclidean, Eigen::MatrixXd::Zero(4, 1));
    CHECK(*silhouette(good, flat) == 0.0);
}

TEST_CASE("ARI and NMI match the references") {
    std::mt19937_64 rng(203);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        const auto a = random_labels(rng, n, 1 + static_cast<int>(rng() % 5));
        const auto b = random_labels(rng, n, 1 + static_cast<int>(rng() % 5));
        CHECK(std::abs(ari(a, b) - oracle::ari(a, b)) < 1e-9);
        CHECK(std::abs(nmi(a, b) - oracle::nmi(a, b)) < 1e-9);
    }
}

TEST_CASE("ARI and NMI properties") {
    std::mt19937_64 rng(207);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 40;
        const auto a = random_labels(rng, n, 2 + static_cast<int>(rng() % 4));
        const auto b = random_labels(rng, n, 2 + static_cast<int>(rng() % 4));
        CHECK(ari(a, a) == doctest::Approx(1.0));
        CHECK(nmi(a, a) == doctest::Approx(1.0));
        CHECK(ari(a, b) == doctest::Approx(ari(b, a)));
        CHECK(nmi(a, b) == doctest::Approx(nmi(b, a)));
        CHECK(nmi(a, b) >= -1e-12);
        CHECK(nmi(a, b) <= 1.0 + 1e-12);
        // Label permutation does not matter.
        std::vector<int> perm = a;
        for (auto& v : perm) v = 10 - v;
        CHECK(ari(perm, b) == doctest::Approx(ari(a, b)));
        CHECK(nmi(perm, b) == doctest::Approx(nmi(a, b)));
    }
    const std::vector<int> x{0, 1}, y{0, 0, 1};
    CHECK_THROWS_AS(ari(x, y), DomainError);
    const std::vector<int> one{0, 0, 0}, other{4, 4, 4};
    CHECK(nmi(one, other) == 1.0);
    CHECK(ari(one, other) == 1.0);
}

TEST_CASE("WCSS matches the reference") {
    std::mt19937_64 rng(211);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 11;
        auto labels = random_labels(rng, n, 3);
        labels = canonical_labels(labels);
        const auto x = random_points(rng, n, 2);
        CHECK(wcss(labels, x) == doctest::Approx(oracle::wcss(labels, x)).epsilon(1e-12));
    }
}

TEST_CASE("disconnected cantons match flood fill") {
    std::mt19937_64 rng(213);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 11;
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
        ContiguityGraph g(ids);
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = u + 1; v < n; ++v)
                if (testing::unit(rng) < 0.3) {
                    g.add_edge(u, v, EdgeKind::Boundary);
                    edges.emplace_back(u, v);
                }
        const auto labels = random_labels(rng, n, 3);
        CHECK(disconnected_cantons(labels, g) == oracle::disconnected(labels, edges));
    }
}

TEST_CASE("evaluate combines the measures") {
    ContiguityGraph g({"a", "b", "c", "d"});
    g.add_edge(0, 1, EdgeKind::Boundary);
    g.add_edge(1, 2, EdgeKind::Boundary);
    g.add_edge(2, 3, EdgeKind::Boundary);
    Eigen::MatrixXd x(4, 1);
    x << 0, 0.1, 5, 5.1;
    const std::vector<double> w{1, 1, 1, 3};
    const std::vector<int> labels{0, 0, 1, 1};
    const auto p = Partition::from_labels(labels, 2);
    const auto r = evaluate(p, x, pairwise_matrix(Metric::Euclidean, x), w, g);
    CHECK(r.disconnected_cantons == 0);
    CHECK(r.population_cv == doctest::Approx(1.0 / 3.0));
    CHECK(r.wcss == doctest::Approx(0.01));
    CHECK(r.cost.compactness == doctest::Approx(1.0 / 3.0));
    CHECK(r.silhouette.has_value());
}

TEST_CASE("stability from identical and unrelated partitions") {
    const auto same = Partition::from_labels(std::vector<int>{0, 0, 1, 1, 2, 2}, 3);
    std::vector<Partition> ps(3, same);
    const auto r = stability_from_partitions(ps);
    CHECK(r.mean_ari == doctest::Approx(1.0));
    CHECK(r.std_ari == doctest::Approx(0.0));
    CHECK(r.pairwise_ari.rows() == 3);
    CHECK(r.pairwise_nmi(0, 1) == doctest::Approx(1.0));

    std::vector<Partition> mixed{same, Partition::from_labels(std::vector<int>{0, 1, 2, 0, 1, 2}, 3), same};
    const auto m = stability_from_partitions(mixed);
    const double a = ari(mixed[0].labels, mixed[1].labels);
    const double mean = (a + a + 1.0) / 3.0;
    const double pop_std = std::sqrt(((a - mean) * (a - mean) * 2 + (1 - mean) * (1 - mean)) / 3.0);
    CHECK(m.mean_ari == doctest::Approx(mean));
    CHECK(m.std_ari == doctest::Approx(pop_std));
    CHECK(m.pairwise_ari(0, 0) == 1.0);
}

TEST_CASE("partition relabelling") {
    const auto p = Partition::from_labels(std::vector<int>{7, 7, 3, 9}, 4);
    CHECK(p.labels == std::vector<int>{0, 0, 1, 2});
    CHECK(p.achieved_k == 3);
    CHECK(p.k == 4);
    CHECK(canonical_labels(std::vector<int>{-1, 5, 2, 5}) == std::vector<int>{-1, 0, 1, 0});
    CHECK(count_labels(std::vector<int>{-1, 5, 2, 5}) == 2);
}
