#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <random>

#include "canonical.hpp"
#include "cantons/error.hpp"
#include "cantons/partitioners.hpp"

namespace cantons {

namespace {

// Weighted graph for one Louvain level. Self-loop weight holds the internal
// weight of an aggregated node (each internal edge counted once).
struct LevelGraph {
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency;
    std::vector<double> self_loop;
    std::vector<double> strength;  // 2*self_loop + incident weights
    double total_weight = 0.0;     // m

    std::size_t size() const { return adjacency.size(); }
};

LevelGraph level_from(const ContiguityGraph& g) {
    LevelGraph lg;
    const std::size_t n = g.node_count();
    lg.adjacency.resize(n);
    lg.self_loop.assign(n, 0.0);
    lg.strength.assign(n, 0.0);
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edges()[k];
        const double w = g.weight_or_one(k);
        lg.adjacency[e.u].emplace_back(e.v, w);
        lg.adjacency[e.v].emplace_back(e.u, w);
        lg.strength[e.u] += w;
        lg.strength[e.v] += w;
        lg.total_weight += w;
    }
    for (auto& adj : lg.adjacency) std::sort(adj.begin(), adj.end());
    return lg;
}

// One round of local moves; returns true when any node moved.
bool local_moves(const LevelGraph& g, double resolution, std::vector<std::size_t>& community, std::mt19937_64& rng) {
    const std::size_t n = g.size();
    const double m2 = 2.0 * g.total_weight;
    std::vector<double> community_strength(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) community_strength[community[i]] += g.strength[i];

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);

    std::vector<double> link(n, 0.0);
    std::vector<std::size_t> touched;
    bool any_move = false;
    bool improved = true;
    while (improved) {
        improved = false;
        for (const std::size_t node : order) {
            const std::size_t own = community[node];
            const double k_i = g.strength[node];

            touched.clear();
            for (const auto& [nbr, w] : g.adjacency[node]) {
                const std::size_t c = community[nbr];
                if (link[c] == 0.0 && std::find(touched.begin(), touched.end(), c) == touched.end())
                    touched.push_back(c);
                link[c] += w;
            }
            community_strength[own] -= k_i;
            const auto gain = [&](std::size_t c) { return link[c] - resolution * community_strength[c] * k_i / m2; };

            std::size_t best = own;
            double best_gain = gain(own);
            std::sort(touched.begin(), touched.end());
            for (const std::size_t c : touched) {
                const double value = gain(c);
                if (value > best_gain + 1e-12) {
                    best_gain = value;
                    best = c;
                }
            }
            community_strength[best] += k_i;
            if (best != own) {
                community[node] = best;
                improved = true;
                any_move = true;
            }
            for (const std::size_t c : touched) link[c] = 0.0;
            link[own] = 0.0;
        }
    }
    return any_move;
}

// Renumbers communities 0..c-1 in order of first appearance.
std::size_t compact(std::vector<std::size_t>& community) {
    std::map<std::size_t, std::size_t> remap;
    for (auto& c : community) {
        const auto [it, inserted] = remap.emplace(c, remap.size());
        c = it->second;
    }
    return remap.size();
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::size_t>& community, std::size_t count) {
    LevelGraph out;
    out.adjacency.resize(count);
    out.self_loop.assign(count, 0.0);
    out.strength.assign(count, 0.0);
    out.total_weight = g.total_weight;
    std::vector<std::map<std::size_t, double>> links(count);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t ci = community[i];
        out.self_loop[ci] += g.self_loop[i];
        out.strength[ci] += g.strength[i];
        for (const auto& [j, w] : g.adjacency[i]) {
            const std::size_t cj = community[j];
            if (ci == cj) {
                if (i < j) out.self_loop[ci] += w;
            } else {
                links[ci][cj] += w;
            }
        }
    }
    for (std::size_t c = 0; c < count; ++c)
        for (const auto& [d, w] : links[c]) out.adjacency[c].emplace_back(d, w);
    return out;
}

// Splits every community into its connected pieces in the original graph.
std::vector<int> split_disconnected(const ContiguityGraph& g, const std::vector<std::size_t>& community) {
    const std::size_t n = g.node_count();
    std::vector<int> labels(n, -1);
    int next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (labels[s] >= 0) continue;
        labels[s] = next;
        stack.assign(1, s);
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (const std::size_t v : g.neighbors(u))
                if (labels[v] < 0 && community[v] == community[s]) {
                    labels[v] = next;
                    stack.push_back(v);
                }
        }
        ++next;
    }
    return labels;
}

std::vector<int> louvain_canonical(const ContiguityGraph& graph, double resolution, std::uint64_t seed) {
    const std::size_t n = graph.node_count();
    std::mt19937_64 rng(seed);
    LevelGraph level = level_from(graph);
    std::vector<std::size_t> membership(n);
    std::iota(membership.begin(), membership.end(), 0);

    while (true) {
        std::vector<std::size_t> community(level.size());
        std::iota(community.begin(), community.end(), 0);
        const bool moved = local_moves(level, resolution, community, rng);
        const std::size_t count = compact(community);
        for (auto& m : membership) m = community[m];
        if (!moved || count == level.size()) break;
        level = aggregate(level, community, count);
    }
    return split_disconnected(graph, membership);
}

}  // namespace

double modularity(const ContiguityGraph& graph, std::span<const int> labels, double resolution) {
    if (labels.size() != graph.node_count()) throw DomainError("partition does not cover the graph");
    double m = 0.0;
    for (std::size_t k = 0; k < graph.edge_count(); ++k) m += graph.weight_or_one(k);
    if (m <= 0.0) return 0.0;
    const int count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<double> internal(static_cast<std::size_t>(count), 0.0), degree(static_cast<std::size_t>(count), 0.0);
    for (std::size_t k = 0; k < graph.edge_count(); ++k) {
        const Edge& e = graph.edges()[k];
        const double w = graph.weight_or_one(k);
        degree[static_cast<std::size_t>(labels[e.u])] += w;
        degree[static_cast<std::size_t>(labels[e.v])] += w;
        if (labels[e.u] == labels[e.v]) internal[static_cast<std::size_t>(labels[e.u])] += w;
    }
    double q = 0.0;
    for (std::size_t c = 0; c < internal.size(); ++c)
        q += internal[c] / m - resolution * (degree[c] / (2.0 * m)) * (degree[c] / (2.0 * m));
    return q;
}

std::vector<int> louvain_communities(const ContiguityGraph& graph, double resolution, std::uint64_t seed) {
    const detail::CanonicalOrder canon(graph);
    if (canon.identity()) return canonical_labels(louvain_canonical(graph, resolution, seed));
    return canon.restore(louvain_canonical(canon.graph(graph), resolution, seed));
}

LouvainResult louvain_search(const ContiguityGraph& weighted_graph, int k, const LouvainParams& params) {
    const std::size_t n = weighted_graph.node_count();
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw DomainError("canton count " + std::to_string(k) + " outside 1.." + std::to_string(n));
    if (!(params.resolution_min > 0.0 && params.resolution_min < params.resolution_max))
        throw DomainError("resolution range must be positive and ordered");
    bool positive = false;
    for (std::size_t e = 0; e < weighted_graph.edge_count() && !positive; ++e)
        positive = weighted_graph.weight_or_one(e) > 0.0;
    if (!positive) throw DomainError("Louvain needs at least one positive-weight edge");

    const detail::CanonicalOrder canon(weighted_graph);
    const ContiguityGraph g = canon.graph(weighted_graph);

    LouvainResult result;
    std::vector<int> best;
    int best_count = -1;
    double lo = params.resolution_min, hi = params.resolution_max;
    for (int it = 1; it <= params.max_search_iterations; ++it) {
        const double r = 0.5 * (lo + hi);
        std::vector<int> labels = canonical_labels(louvain_canonical(g, r, params.seed));
        const int count = count_labels(labels);
        result.probes.push_back({r, count});
        result.search_iterations = it;

        const bool closer = best_count < 0 || std::abs(count - k) < std::abs(best_count - k) ||
                            (std::abs(count - k) == std::abs(best_count - k) && count < best_count);
        if (closer) {
            best = std::move(labels);
            best_count = count;
            result.resolution = r;
        }
        if (count == k) break;
        if (count < k) lo = r;
        else hi = r;
        if (hi - lo < params.tolerance) break;
    }

    result.partition = Partition::from_labels(canon.restore(best), k);
    return result;
}

Partition louvain_partition(const ContiguityGraph& weighted_graph, int k, const LouvainParams& params) {
    return louvain_search(weighted_graph, k, params).partition;
}

}  // namespace cantons
