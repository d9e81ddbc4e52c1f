#include <doctest.h>

#include <map>
#include <numeric>
#include <random>

#include "cantons/error.hpp"
#include "cantons/evaluation.hpp"
#include "cantons/experiments.hpp"
#include "cantons/fixtures.hpp"
#include "cantons/partitioners.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace cantons;

namespace {

struct Problem {
    ContiguityGraph graph;
    Eigen::MatrixXd x;
    std::vector<double> w;
    std::vector<BlocVector> shares;
};

Problem lattice_problem() {
    const auto lat = planted_lattice(6, 4, 3);
    const Workspace ws(lat.panel, lat.mapping, lat.graph);
    return {ws.graph(), ws.standardized(Representation::BlocShares).values, ws.panel().voter_weight, ws.bloc_shares()};
}

// The same problem with nodes listed in `order`.
Problem permuted(const Problem& p, const std::vector<std::size_t>& order) {
    Problem out;
    std::vector<std::string> ids;
    std::vector<std::size_t> where(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        ids.push_back(p.graph.nodes()[order[i]]);
        where[order[i]] = i;
    }
    out.graph = ContiguityGraph(ids);
    for (const auto& e : p.graph.edges()) out.graph.add_edge(where[e.u], where[e.v], e.kind, e.weight);
    out.x.resize(p.x.rows(), p.x.cols());
    for (std::size_t i = 0; i < order.size(); ++i) {
        out.x.row(static_cast<Eigen::Index>(i)) = p.x.row(static_cast<Eigen::Index>(order[i]));
        out.w.push_back(p.w[order[i]]);
        out.shares.push_back(p.shares[order[i]]);
    }
    return out;
}

std::map<std::string, int> by_id(const ContiguityGraph& g, const Partition& p) {
    std::map<std::string, int> m;
    for (std::size_t i = 0; i < p.size(); ++i) m[g.nodes()[i]] = p.labels[i];
    return m;
}

// Labels in sorted-id order, relabelled by first appearance.
std::vector<int> canonical_by_id(const ContiguityGraph& g, const Partition& p) {
    std::vector<int> labels;
    for (const auto& [id, l] : by_id(g, p)) labels.push_back(l);
    return canonical_labels(labels);
}

ContiguityGraph random_connected_graph(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("v" + std::to_string(i));
    ContiguityGraph g(ids);
    for (std::size_t v = 1; v < n; ++v) g.add_edge(rng() % v, v, EdgeKind::Boundary);  // random tree
    for (std::size_t extra = 0; extra < n; ++extra) {
        const std::size_t u = rng() % n, v = rng() % n;
        if (u != v) g.add_edge(u, v, EdgeKind::Boundary);
    }
    return g;
}

Problem random_problem(std::mt19937_64& rng, std::size_t n) {
    Problem p;
    p.graph = random_connected_graph(rng, n);
    p.x.resize(static_cast<Eigen::Index>(n), 3);
    for (std::size_t i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) p.x(static_cast<Eigen::Index>(i), j) = testing::unit(rng);
        p.w.push_back(500.0 + 1000.0 * testing::unit(rng));
        BlocVector s{};
        double rest = 1.0;
        for (std::size_t b = 0; b < kNumBlocs; ++b) rest -= (s[b] = rest * testing::unit(rng));
        p.shares.push_back(s);
    }
    return p;
}

}  // namespace

TEST_CASE("SA contract on random graphs") {
    std::mt19937_64 rng(301);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 8 + rng() % 40;
        const auto p = random_problem(rng, n);
        const int k = 2 + static_cast<int>(rng() % 6);
        SAParams params;
        params.iterations = 2000;
        params.seed = rng();
        const auto r = anneal(p.graph, p.x, p.w, p.shares, k, params);
        CHECK(r.partition.achieved_k == k);
        CHECK(r.partition.k == k);
        CHECK(disconnected_cantons(r.partition.labels, p.graph) == 0);
        CHECK(r.best_cost.total <= r.initial_cost.total + 1e-12);
        CHECK(r.moves.size() == 2000);
        CHECK(r.seeds.size() == static_cast<std::size_t>(k));
        const auto recomputed = total_cost(r.partition.labels, p.x, p.w, p.graph, params.cost_weights);
        CHECK(std::abs(recomputed.total - r.best_cost.total) < 1e-9);
    }
}

TEST_CASE("SA is reproducible and handles the extremes") {
    const auto p = lattice_problem();
    SAParams params;
    params.iterations = 3000;
    params.seed = 4;
    CHECK(sa_partition(p.graph, p.x, p.w, p.shares, 3, params) == sa_partition(p.graph, p.x, p.w, p.shares, 3, params));
    const auto one = sa_partition(p.graph, p.x, p.w, p.shares, 1, params);
    CHECK(one.achieved_k == 1);
    const auto all = sa_partition(p.graph, p.x, p.w, p.shares, 24, params);
    CHECK(all.achieved_k == 24);
    CHECK_THROWS_AS(sa_partition(p.graph, p.x, p.w, p.shares, 25, params), DomainError);
    CHECK_THROWS_AS(sa_partition(p.graph, p.x, p.w, p.shares, 0, params), DomainError);

    ContiguityGraph split({"a", "b", "c", "d"});
    split.add_edge(0, 1, EdgeKind::Boundary);
    split.add_edge(2, 3, EdgeKind::Boundary);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 2);
    const std::vector<double> w(4, 1.0);
    const std::vector<BlocVector> s(4, BlocVector{0.2, 0.2, 0.2, 0.2, 0.2});
    CHECK_THROWS_AS(sa_partition(split, x, w, s, 2, params), GraphError);
}

TEST_CASE("SA rarely accepts worse moves once cold") {
    const auto p = lattice_problem();
    for (std::uint64_t seed : {1, 2, 3}) {
        SAParams params;
        params.iterations = 50000;
        params.seed = seed;
        const auto r = anneal(p.graph, p.x, p.w, p.shares, 3, params);
        const std::size_t tail = r.moves.size() / 10;
        const auto worse = std::count(r.moves.end() - static_cast<std::ptrdiff_t>(tail), r.moves.end(),
                                      MoveOutcome::AcceptedWorse);
        CHECK(static_cast<double>(worse) / static_cast<double>(tail) < 0.01);
    }
}

TEST_CASE("region growing covers the graph with connected regions") {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 5 + rng() % 40;
        const auto p = random_problem(rng, n);
        const int k = 1 + static_cast<int>(rng() % std::min<std::size_t>(n, 8));
        const auto seeds = sa_seeds(p.graph, p.x, p.shares, k);
        CHECK(std::set<std::size_t>(seeds.begin(), seeds.end()).size() == seeds.size());
        const auto labels = grow_regions(p.graph, p.x, seeds);
        CHECK(std::find(labels.begin(), labels.end(), -1) == labels.end());
        CHECK(count_labels(labels) == k);
        CHECK(disconnected_cantons(labels, p.graph) == 0);
    }
}

TEST_CASE("graph partitioners ignore input node order") {
    const auto base = lattice_problem();
    std::vector<std::size_t> order(base.graph.node_count());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(305);
    for (int trial = 0; trial < 3; ++trial) {
        std::shuffle(order.begin(), order.end(), rng);
        const auto p = permuted(base, order);
        for (int k : {2, 3, 5}) {
            SAParams params;
            params.iterations = 2000;
            params.seed = 8;
            CHECK(canonical_by_id(p.graph, sa_partition(p.graph, p.x, p.w, p.shares, k, params)) ==
                  canonical_by_id(base.graph, sa_partition(base.graph, base.x, base.w, base.shares, k, params)));

            const auto dm_base = pairwise_matrix(Metric::Euclidean, base.x, base.graph.nodes());
            const auto dm_perm = pairwise_matrix(Metric::Euclidean, p.x, p.graph.nodes());
            CHECK(canonical_by_id(p.graph, agglomerative_partition(p.graph, dm_perm, k)) ==
                  canonical_by_id(base.graph, agglomerative_partition(base.graph, dm_base, k)));

            LouvainParams lp;
            lp.seed = 3;
            CHECK(canonical_by_id(p.graph, louvain_partition(edge_similarity_weights(p.graph, dm_perm), k, lp)) ==
                  canonical_by_id(base.graph, louvain_partition(edge_similarity_weights(base.graph, dm_base), k, lp)));
        }
    }
}

TEST_CASE("agglomerative merges adjacent clusters only") {
    std::mt19937_64 rng(307);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 4 + rng() % 30;
        const auto p = random_problem(rng, n);
        const auto dm = pairwise_matrix(Metric::Euclidean, p.x, p.graph.nodes());
        const int k = 1 + static_cast<int>(rng() % n);
        const auto r = agglomerate(p.graph, dm, k);
        CHECK(r.partition.achieved_k == k);
        CHECK(r.merges.size() == n - static_cast<std::size_t>(k));
        CHECK(disconnected_cantons(r.partition.labels, p.graph) == 0);
    }
    // Two well separated groups on a path.
    ContiguityGraph path({"a", "b", "c", "d", "e"});
    for (std::size_t i = 0; i + 1 < 5; ++i) path.add_edge(i, i + 1, EdgeKind::Boundary);
    Eigen::MatrixXd x(5, 1);
    x << 0, 0.1, 0.2, 10, 10.1;
    const auto part = agglomerative_partition(path, pairwise_matrix(Metric::Euclidean, x, path.nodes()), 2);
    CHECK(part.labels == std::vector<int>{0, 0, 0, 1, 1});
    const auto r = agglomerate(path, pairwise_matrix(Metric::Euclidean, x, path.nodes()), 1);
    CHECK(r.merges.back().distance == doctest::Approx((9.8 + 9.9 + 10.0 + 9.9 + 10.0 + 10.1) / 6.0));
}

TEST_CASE("agglomerative refuses a disconnected graph") {
    ContiguityGraph g({"a", "b", "c"});
    g.add_edge(0, 1, EdgeKind::Boundary);
    const auto dm = pairwise_matrix(Metric::Euclidean, Eigen::MatrixXd::Identity(3, 3), g.nodes());
    CHECK_THROWS_AS(agglomerative_partition(g, dm, 1), GraphError);
    CHECK(agglomerative_partition(g, dm, 2).achieved_k == 2);
}

TEST_CASE("Louvain beats the singleton partition") {
    std::mt19937_64 rng(309);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 5 + rng() % 40;
        const auto p = random_problem(rng, n);
        const auto g = edge_similarity_weights(p.graph, pairwise_matrix(Metric::Euclidean, p.x, p.graph.nodes()));
        std::vector<int> singletons(n);
        std::iota(singletons.begin(), singletons.end(), 0);
        for (double r : {0.5, 1.0, 2.0}) {
            const auto labels = louvain_communities(g, r, 1);
            CHECK(modularity(g, labels, r) >= modularity(g, singletons, r) - 1e-12);
            CHECK(disconnected_cantons(labels, g) == 0);
        }
    }
}

TEST_CASE("modularity examples") {
    // Two triangles joined by one edge.
    ContiguityGraph g({"a", "b", "c", "d", "e", "f"});
    for (auto [u, v] : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}})
        g.add_edge(static_cast<std::size_t>(u), static_cast<std::size_t>(v), EdgeKind::Boundary);
    const std::vector<int> halves{0, 0, 0, 1, 1, 1};
    // in_c = 6 each (3 edges both directions), tot_c = 7, 2m = 14.
    CHECK(modularity(g, halves, 1.0) == doctest::Approx(2 * (6.0 / 14 - 0.25)));
    CHECK(louvain_communities(g, 1.0, 0) == halves);
    const std::vector<int> one(6, 0);
    CHECK(modularity(g, one, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("Louvain resolution search reaches the target") {
    const auto lat = planted_lattice(6, 4, 3);
    const Workspace ws(lat.panel, lat.mapping, lat.graph);
    const auto g =
        edge_similarity_weights(ws.graph(), ws.distances(Representation::BlocShares, Metric::Euclidean));
    for (int k : {2, 3, 4}) {
        const auto r = louvain_search(g, k);
        CHECK(std::abs(r.partition.achieved_k - k) <= 1);
        CHECK(r.search_iterations <= 30);
        CHECK(r.probes.size() == static_cast<std::size_t>(r.search_iterations));
    }
    ContiguityGraph flat({"a", "b"});
    flat.add_edge(0, 1, EdgeKind::Boundary, 0.0);
    CHECK_THROWS_AS(louvain_search(flat, 2), DomainError);
}

TEST_CASE("K-Means history is monotone and WCSS matches the reference") {
    std::mt19937_64 rng(311);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 10 + rng() % 50;
        Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 2);
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < 2; ++j) x(i, j) = testing::unit(rng) + static_cast<double>(i % 3) * 2.0;
        KMeansParams params;
        params.seed = rng();
        const int k = 2 + static_cast<int>(rng() % 5);
        const auto r = kmeans(x, k, params);
        for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1] + 1e-9);
        CHECK(r.wcss == doctest::Approx(oracle::wcss(r.partition.labels, x)));
        CHECK(r.partition.achieved_k == k);
        CHECK(kmeans_partition(x, k, params) == r.partition);
    }
}
