#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "canonical.hpp"
#include "cantons/error.hpp"
#include "cantons/partitioners.hpp"

namespace cantons {

namespace {

double row_distance(const Eigen::MatrixXd& f, std::size_t a, std::size_t b) {
    return (f.row(static_cast<Eigen::Index>(a)) - f.row(static_cast<Eigen::Index>(b))).norm();
}

// Uniform index in [0, size) from a 64-bit engine, independent of the
// standard library's distribution implementation.
std::size_t pick(std::mt19937_64& rng, std::size_t size) {
    return static_cast<std::size_t>(rng() % size);
}

double unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class BorderSet {
public:
    explicit BorderSet(std::size_t n) : position_(n, npos) {}

    void set(std::size_t u, bool border) {
        if (border && position_[u] == npos) {
            position_[u] = nodes_.size();
            nodes_.push_back(u);
        } else if (!border && position_[u] != npos) {
            const std::size_t last = nodes_.back();
            nodes_[position_[u]] = last;
            position_[last] = position_[u];
            nodes_.pop_back();
            position_[u] = npos;
        }
    }
    bool empty() const { return nodes_.empty(); }
    std::size_t size() const { return nodes_.size(); }
    std::size_t at(std::size_t i) const { return nodes_[i]; }

private:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> nodes_;
    std::vector<std::size_t> position_;
};

bool is_border(const ContiguityGraph& g, const std::vector<int>& labels, std::size_t u) {
    for (const std::size_t v : g.neighbors(u))
        if (labels[v] != labels[u]) return true;
    return false;
}

// Whether canton labels[u] stays connected once u leaves it.
bool stays_connected(const ContiguityGraph& g, const std::vector<int>& labels, std::size_t u, int canton_size,
                     std::vector<std::size_t>& stack, std::vector<unsigned>& mark, unsigned& stamp) {
    const int canton = labels[u];
    std::size_t start = u;
    for (const std::size_t v : g.neighbors(u))
        if (labels[v] == canton) {
            start = v;
            break;
        }
    if (start == u) return false;

    ++stamp;
    mark[u] = stamp;
    mark[start] = stamp;
    stack.assign(1, start);
    int reached = 1;
    while (!stack.empty()) {
        const std::size_t x = stack.back();
        stack.pop_back();
        for (const std::size_t y : g.neighbors(x))
            if (labels[y] == canton && mark[y] != stamp) {
                mark[y] = stamp;
                ++reached;
                stack.push_back(y);
            }
    }
    return reached == canton_size - 1;
}

SAResult anneal_canonical(const ContiguityGraph& graph, const Eigen::MatrixXd& features,
                          std::span<const double> weights, std::span<const BlocVector> blocs, int k,
                          const SAParams& params) {
    const std::size_t n = graph.node_count();
    SAResult result;
    result.seeds = sa_seeds(graph, features, blocs, k);
    std::vector<int> labels = grow_regions(graph, features, result.seeds);

    CostTracker tracker(labels, features, weights, graph, params.cost_weights);
    PartitionCost current = tracker.cost();
    result.initial_cost = current;
    result.best_cost = current;
    std::vector<int> best = labels;

    BorderSet border(n);
    for (std::size_t u = 0; u < n; ++u) border.set(u, is_border(graph, labels, u));

    std::mt19937_64 rng(params.seed);
    std::vector<std::size_t> stack;
    std::vector<unsigned> mark(n, 0);
    unsigned stamp = 0;
    std::vector<int> targets;
    double temperature = params.initial_temperature;
    result.moves.reserve(static_cast<std::size_t>(params.iterations));

    for (int it = 0; it < params.iterations; ++it, temperature *= params.cooling_rate) {
        if (border.empty()) {
            result.moves.push_back(MoveOutcome::NoCandidate);
            continue;
        }
        const std::size_t u = border.at(pick(rng, border.size()));
        const auto& cur_labels = tracker.labels();
        targets.clear();
        for (const std::size_t v : graph.neighbors(u))
            if (cur_labels[v] != cur_labels[u]) targets.push_back(cur_labels[v]);
        std::sort(targets.begin(), targets.end());
        targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
        const int to = targets[pick(rng, targets.size())];

        const int from_size = tracker.canton_size(cur_labels[u]);
        if (from_size <= 1) {
            result.moves.push_back(MoveOutcome::RejectedEmpty);
            continue;
        }
        if (!stays_connected(graph, cur_labels, u, from_size, stack, mark, stamp)) {
            result.moves.push_back(MoveOutcome::RejectedSplit);
            continue;
        }

        const PartitionCost proposed = tracker.cost_after_move(u, to);
        const double delta = proposed.total - current.total;
        MoveOutcome outcome = MoveOutcome::AcceptedBetter;
        if (delta > 0.0) {
            const bool accept = temperature > 0.0 && unit(rng) < std::exp(-delta / temperature);
            outcome = accept ? MoveOutcome::AcceptedWorse : MoveOutcome::RejectedMetropolis;
        }
        result.moves.push_back(outcome);
        if (outcome == MoveOutcome::RejectedMetropolis) continue;

        tracker.apply_move(u, to);
        current = proposed;
        const auto& updated = tracker.labels();
        border.set(u, is_border(graph, updated, u));
        for (const std::size_t v : graph.neighbors(u)) border.set(v, is_border(graph, updated, v));

        if (current.total < result.best_cost.total) {
            result.best_cost = current;
            best = updated;
        }
    }

    result.partition = Partition::from_labels(best, k);
    return result;
}

}  // namespace

std::vector<std::size_t> sa_seeds(const ContiguityGraph& graph, const Eigen::MatrixXd& features,
                                  std::span<const BlocVector> bloc_shares, int k) {
    const std::size_t n = graph.node_count();
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw DomainError("canton count " + std::to_string(k) + " outside 1.." + std::to_string(n));
    const auto& ids = graph.nodes();
    std::vector<char> chosen(n, 0);
    std::vector<std::size_t> seeds;

    const auto better = [&](double value, std::size_t node, double best_value, std::size_t best_node) {
        return value > best_value || (value == best_value && ids[node] < ids[best_node]);
    };

    const std::size_t bloc_seeds = std::min<std::size_t>(static_cast<std::size_t>(k), kNumBlocs);
    for (std::size_t b = 0; b < bloc_seeds; ++b) {
        std::size_t best = n;
        for (std::size_t u = 0; u < n; ++u) {
            if (chosen[u]) continue;
            if (best == n || better(bloc_shares[u][b], u, bloc_shares[best][b], best)) best = u;
        }
        chosen[best] = 1;
        seeds.push_back(best);
    }

    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    for (std::size_t u = 0; u < n; ++u)
        for (const std::size_t s : seeds) nearest[u] = std::min(nearest[u], row_distance(features, u, s));
    while (seeds.size() < static_cast<std::size_t>(k)) {
        std::size_t best = n;
        for (std::size_t u = 0; u < n; ++u) {
            if (chosen[u]) continue;
            if (best == n || better(nearest[u], u, nearest[best], best)) best = u;
        }
        chosen[best] = 1;
        seeds.push_back(best);
        for (std::size_t u = 0; u < n; ++u) nearest[u] = std::min(nearest[u], row_distance(features, u, best));
    }
    return seeds;
}

std::vector<int> grow_regions(const ContiguityGraph& graph, const Eigen::MatrixXd& features,
                              std::span<const std::size_t> seeds) {
    const std::size_t n = graph.node_count();
    std::vector<int> labels(n, -1);
    std::vector<std::set<std::size_t>> frontier(seeds.size());
    std::size_t unassigned = n;

    const auto claim = [&](std::size_t node, std::size_t canton) {
        labels[node] = static_cast<int>(canton);
        --unassigned;
        for (auto& f : frontier) f.erase(node);
        for (const std::size_t v : graph.neighbors(node))
            if (labels[v] < 0) frontier[canton].insert(v);
    };
    for (std::size_t c = 0; c < seeds.size(); ++c) {
        if (labels[seeds[c]] >= 0) throw DomainError("duplicate canton seed");
        claim(seeds[c], c);
    }

    while (unassigned > 0) {
        bool progress = false;
        for (std::size_t c = 0; c < seeds.size() && unassigned > 0; ++c) {
            if (frontier[c].empty()) continue;
            std::size_t best = n;
            double best_d = std::numeric_limits<double>::infinity();
            for (const std::size_t v : frontier[c]) {
                const double d = row_distance(features, v, seeds[c]);
                if (d < best_d) {
                    best_d = d;
                    best = v;
                }
            }
            claim(best, c);
            progress = true;
        }
        if (!progress) throw GraphError("region growing cannot reach every node: graph is disconnected");
    }
    return labels;
}

SAResult anneal(const ContiguityGraph& graph, const Eigen::MatrixXd& features, std::span<const double> voter_weights,
                std::span<const BlocVector> bloc_shares, int k, const SAParams& params) {
    const std::size_t n = graph.node_count();
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw DomainError("canton count " + std::to_string(k) + " outside 1.." + std::to_string(n));
    if (static_cast<std::size_t>(features.rows()) != n || voter_weights.size() != n || bloc_shares.size() != n)
        throw DomainError("features, voter weights and bloc shares must have one row per graph node");
    if (!graph.is_connected()) throw GraphError("simulated annealing needs a connected graph");
    if (!(params.cooling_rate > 0.0 && params.cooling_rate < 1.0)) throw DomainError("cooling rate must be in (0, 1)");
    if (params.iterations < 1) throw DomainError("iterations must be >= 1");

    const detail::CanonicalOrder canon(graph);
    if (canon.identity()) return anneal_canonical(graph, features, voter_weights, bloc_shares, k, params);

    const ContiguityGraph g = canon.graph(graph);
    const Eigen::MatrixXd f = canon.rows(features);
    const auto w = canon.items(voter_weights);
    const auto b = canon.items(bloc_shares);
    SAResult result = anneal_canonical(g, f, w, b, k, params);
    result.partition.labels = canon.restore(result.partition.labels);
    for (auto& s : result.seeds) s = canon.to_original(s);
    return result;
}

Partition sa_partition(const ContiguityGraph& graph, const Eigen::MatrixXd& features,
                       std::span<const double> voter_weights, std::span<const BlocVector> bloc_shares, int k,
                       const SAParams& params) {
    return anneal(graph, features, voter_weights, bloc_shares, k, params).partition;
}

}  // namespace cantons
