#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "cantons/distances.hpp"
#include "cantons/geograph.hpp"
#include "cantons/objective.hpp"
#include "cantons/partition.hpp"

namespace cantons {

// All graph-based partitioners run on a canonical node order (sorted by id),
// so their output as an id -> canton map does not depend on input order.

// ---------------------------------------------------------------------------
// Simulated annealing

struct SAParams {
    double initial_temperature = 1.0;
    double cooling_rate = 0.9995;  // per iteration
    int iterations = 5000;
    std::uint64_t seed = 0;
    CostWeights cost_weights;
};

enum class MoveOutcome : std::uint8_t {
    NoCandidate,       // no border node or K = n
    RejectedEmpty,     // would empty the source canton
    RejectedSplit,     // would disconnect the source canton
    RejectedMetropolis,
    AcceptedBetter,    // delta <= 0
    AcceptedWorse,
};

struct SAResult {
    Partition partition;  // best-cost partition seen
    PartitionCost initial_cost;
    PartitionCost best_cost;
    std::vector<std::size_t> seeds;  // in input node order
    std::vector<MoveOutcome> moves;  // one entry per iteration
};

/// Canton seeds: the argmax municipality of each bloc's share for the first
/// min(K, 5) blocs, then farthest-first in feature space. Indices refer to
/// the graph node order.
std::vector<std::size_t> sa_seeds(const ContiguityGraph& graph, const Eigen::MatrixXd& features,
                                  std::span<const BlocVector> bloc_shares, int k);

/// Multi-source region growing: cantons take turns claiming the unassigned
/// neighbour closest (in feature space) to their seed.
std::vector<int> grow_regions(const ContiguityGraph& graph, const Eigen::MatrixXd& features,
                              std::span<const std::size_t> seeds);

/// Metropolis annealing over border-node reassignments that keep every
/// canton connected and nonempty. `features` must be standardized.
/// Throws DomainError for K outside 1..n and GraphError for a disconnected graph.
SAResult anneal(const ContiguityGraph& graph, const Eigen::MatrixXd& features,
                std::span<const double> voter_weights, std::span<const BlocVector> bloc_shares, int k,
                const SAParams& params = {});

Partition sa_partition(const ContiguityGraph& graph, const Eigen::MatrixXd& features,
                       std::span<const double> voter_weights, std::span<const BlocVector> bloc_shares, int k,
                       const SAParams& params = {});

// ---------------------------------------------------------------------------
// Contiguity-constrained average linkage

struct MergeStep {
    int left = 0;   // cluster ids: the smallest node index in the cluster
    int right = 0;
    double distance = 0.0;  // average pairwise distance at merge time
};

struct AgglomerativeResult {
    Partition partition;
    std::vector<MergeStep> merges;
};

AgglomerativeResult agglomerate(const ContiguityGraph& graph, const DistanceMatrix& distances, int k);
Partition agglomerative_partition(const ContiguityGraph& graph, const DistanceMatrix& distances, int k);

// ---------------------------------------------------------------------------
// Louvain with resolution search

struct LouvainParams {
    double resolution_min = 0.01;
    double resolution_max = 10.0;
    int max_search_iterations = 30;
    double tolerance = 1e-6;
    std::uint64_t seed = 0;
};

struct ResolutionProbe {
    double resolution = 0.0;
    int communities = 0;
};

struct LouvainResult {
    Partition partition;
    double resolution = 0.0;
    int search_iterations = 0;
    std::vector<ResolutionProbe> probes;
};

/// Modularity with resolution: sum_c [ in_c / 2m - r (tot_c / 2m)^2 ].
/// Unweighted edges count as weight 1.
double modularity(const ContiguityGraph& graph, std::span<const int> labels, double resolution);

/// Multi-level Louvain at a fixed resolution. Communities that end up
/// disconnected are split into their connected pieces.
std::vector<int> louvain_communities(const ContiguityGraph& graph, double resolution, std::uint64_t seed);

/// Bisection on the resolution to hit `k` communities. Throws DomainError
/// when no edge has positive weight.
LouvainResult louvain_search(const ContiguityGraph& weighted_graph, int k, const LouvainParams& params = {});
Partition louvain_partition(const ContiguityGraph& weighted_graph, int k, const LouvainParams& params = {});

// ---------------------------------------------------------------------------
// K-Means baseline (no geography)

struct KMeansParams {
    std::uint64_t seed = 0;
    int n_init = 10;
    int max_iter = 300;
};

struct KMeansResult {
    Partition partition;
    double wcss = 0.0;
    Eigen::MatrixXd centroids;
    std::vector<double> history;  // WCSS after each Lloyd iteration of the kept run
};

KMeansResult kmeans(const Eigen::MatrixXd& features, int k, const KMeansParams& params = {});
Partition kmeans_partition(const Eigen::MatrixXd& features, int k, const KMeansParams& params = {});

}  // namespace cantons
