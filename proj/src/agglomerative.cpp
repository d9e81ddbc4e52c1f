#include <algorithm>
#include <queue>
#include <tuple>

#include "canonical.hpp"
#include "cantons/error.hpp"
#include "cantons/partitioners.hpp"

namespace cantons {

namespace {

struct Candidate {
    double average;
    std::size_t a;  // representatives, a < b
    std::size_t b;
    unsigned stamp_a;
    unsigned stamp_b;

    // Min-heap order: smallest average, then smallest representative pair.
    bool operator>(const Candidate& o) const {
        return std::tie(average, a, b) > std::tie(o.average, o.a, o.b);
    }
};

AgglomerativeResult agglomerate_canonical(const ContiguityGraph& graph, const DistanceMatrix& dm, int k) {
    const std::size_t n = graph.node_count();
    // Cluster state is indexed by representative = smallest member index.
    std::vector<char> alive(n, 1);
    std::vector<double> size(n, 1.0);
    std::vector<unsigned> stamp(n, 0);
    std::vector<int> owner(n);
    for (std::size_t i = 0; i < n; ++i) owner[i] = static_cast<int>(i);
    Eigen::MatrixXd sums = dm.values;  // pairwise distance sums between clusters
    std::vector<std::vector<char>> adjacent(n, std::vector<char>(n, 0));
    for (const Edge& e : graph.edges()) adjacent[e.u][e.v] = adjacent[e.v][e.u] = 1;

    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap;
    const auto push = [&](std::size_t x, std::size_t y) {
        const std::size_t a = std::min(x, y), b = std::max(x, y);
        const double avg = sums(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) / (size[a] * size[b]);
        heap.push({avg, a, b, stamp[a], stamp[b]});
    };
    for (const Edge& e : graph.edges()) push(e.u, e.v);

    AgglomerativeResult result;
    std::size_t clusters = n;
    while (clusters > static_cast<std::size_t>(k)) {
        if (heap.empty())
            throw GraphError("cannot reach " + std::to_string(k) +
                             " cantons: remaining clusters are not adjacent (graph disconnected)");
        const Candidate top = heap.top();
        heap.pop();
        if (!alive[top.a] || !alive[top.b] || stamp[top.a] != top.stamp_a || stamp[top.b] != top.stamp_b)
            continue;

        const std::size_t keep = top.a, gone = top.b;
        result.merges.push_back({static_cast<int>(keep), static_cast<int>(gone), top.average});
        alive[gone] = 0;
        size[keep] += size[gone];
        ++stamp[keep];
        for (std::size_t c = 0; c < n; ++c) {
            if (!alive[c] || c == keep) continue;
            const auto ic = static_cast<Eigen::Index>(c);
            sums(static_cast<Eigen::Index>(keep), ic) += sums(static_cast<Eigen::Index>(gone), ic);
            sums(ic, static_cast<Eigen::Index>(keep)) = sums(static_cast<Eigen::Index>(keep), ic);
            adjacent[keep][c] = adjacent[c][keep] = adjacent[keep][c] || adjacent[gone][c];
        }
        for (std::size_t i = 0; i < n; ++i)
            if (owner[i] == static_cast<int>(gone)) owner[i] = static_cast<int>(keep);
        for (std::size_t c = 0; c < n; ++c)
            if (alive[c] && c != keep && adjacent[keep][c]) push(keep, c);
        --clusters;
    }

    result.partition = Partition::from_labels(owner, k);
    return result;
}

}  // namespace

AgglomerativeResult agglomerate(const ContiguityGraph& graph, const DistanceMatrix& distances, int k) {
    const std::size_t n = graph.node_count();
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw DomainError("canton count " + std::to_string(k) + " outside 1.." + std::to_string(n));
    if (distances.size() != static_cast<Eigen::Index>(n))
        throw DomainError("distance matrix does not match the graph");

    const detail::CanonicalOrder canon(graph);
    if (canon.identity()) return agglomerate_canonical(graph, distances, k);

    AgglomerativeResult result = agglomerate_canonical(canon.graph(graph), canon.distances(distances), k);
    result.partition.labels = canon.restore(result.partition.labels);
    for (auto& m : result.merges) {
        m.left = static_cast<int>(canon.to_original(static_cast<std::size_t>(m.left)));
        m.right = static_cast<int>(canon.to_original(static_cast<std::size_t>(m.right)));
    }
    return result;
}

Partition agglomerative_partition(const ContiguityGraph& graph, const DistanceMatrix& distances, int k) {
    return agglomerate(graph, distances, k).partition;
}

}  // namespace cantons
