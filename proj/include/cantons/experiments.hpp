#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cantons/dataset.hpp"
#include "cantons/distances.hpp"
#include "cantons/evaluation.hpp"
#include "cantons/features.hpp"
#include "cantons/geograph.hpp"
#include "cantons/ingest.hpp"
#include "cantons/partitioners.hpp"

namespace cantons {

enum class Algorithm { SA, Agglomerative, Louvain, KMeans };

std::string_view to_string(Algorithm algo);
Algorithm parse_algorithm(std::string_view text);

inline constexpr std::array<int, 6> kGridK{3, 5, 7, 10, 15, 20};

struct ExperimentConfig {
    Representation representation = Representation::BlocShares;
    Metric metric = Metric::Euclidean;
    Algorithm algorithm = Algorithm::SA;
    int k = 5;
    std::uint64_t seed = 0;

    /// PCA_5 produces negative values, which Jensen-Shannon rejects.
    bool is_valid() const;
    /// `BlocShares_Euclidean_SA_K5`; unique per grid cell.
    std::string key() const;
    bool operator==(const ExperimentConfig&) const = default;
};

/// FNV-1a hash of (representation, metric, algorithm, K).
std::uint64_t derive_seed(Representation rep, Metric metric, Algorithm algo, int k);
ExperimentConfig make_config(Representation rep, Metric metric, Algorithm algo, int k);

/// Valid grid cells in (representation, metric, algorithm, K) order.
std::vector<ExperimentConfig> enumerate_grid();
std::size_t excluded_grid_count();

// ---------------------------------------------------------------------------

/// Everything a grid run needs, precomputed once and shared read-only
/// between worker threads. Graph nodes follow the panel order.
class Workspace {
public:
    Workspace(AlignedPanel panel, BlocMapping mapping, const ContiguityGraph& graph, std::uint64_t nmf_seed = 0);

    const AlignedPanel& panel() const { return panel_; }
    const BlocMapping& mapping() const { return mapping_; }
    const ContiguityGraph& graph() const { return graph_; }
    const std::vector<BlocVector>& bloc_shares() const { return bloc_shares_; }

    const FeatureMatrix& raw(Representation rep) const;
    const FeatureMatrix& standardized(Representation rep) const;
    /// Euclidean and Cosine use standardized features; Jensen-Shannon the raw
    /// non-negative ones. Throws the captured DomainError for invalid pairs.
    const DistanceMatrix& distances(Representation rep, Metric metric) const;

private:
    AlignedPanel panel_;
    BlocMapping mapping_;
    ContiguityGraph graph_;
    std::vector<BlocVector> bloc_shares_;
    std::map<Representation, FeatureMatrix> raw_;
    std::map<Representation, FeatureMatrix> standardized_;
    std::map<Representation, std::string> representation_errors_;
    std::map<std::pair<Representation, Metric>, DistanceMatrix> distances_;
    std::map<std::pair<Representation, Metric>, std::string> distance_errors_;
};

struct RunOptions {
    CostWeights cost_weights;
    std::optional<int> sa_iterations;  // default SAParams::iterations
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<std::string> municipality_ids;
    Partition partition;
    EvaluationReport report;
    double runtime_s = 0.0;
    bool ok = false;
    std::string failure;  // reason when !ok

    bool operator==(const ExperimentResult& o) const;
};

/// Builds the weighted graph / distances the algorithm needs, runs it and
/// evaluates. Never throws: failures are captured in the result.
ExperimentResult run_config(const ExperimentConfig& config, const Workspace& workspace,
                            const RunOptions& options = {});

/// Partition only, without evaluation. Throws on failure.
Partition partition_for(const ExperimentConfig& config, const Workspace& workspace, const RunOptions& options = {});

std::string result_to_json(const ExperimentResult& result);
ExperimentResult result_from_json(const std::string& line);

inline constexpr std::string_view kSummaryHeader =
    "repr,metric,algorithm,K,silhouette,wcss,pop_cv,disconnected,cost_total,runtime_s,status";
std::string summary_row(const ExperimentResult& result);

struct GridOptions {
    std::filesystem::path out_dir;  // empty: no persistence
    int parallelism = 1;
    std::vector<ExperimentConfig> configs;  // empty: full grid
    RunOptions run;
};

/// Runs every config on a bounded worker pool. Results are appended to
/// `results.jsonl` as they finish; configs already recorded as ok there are
/// skipped. `summary.csv` is rewritten in grid order at the end. Returned
/// results follow the config order.
std::vector<ExperimentResult> run_grid(const Workspace& workspace, const GridOptions& options);

/// Data directory loaded, graph prepared, workspace built.
struct Pipeline {
    Dataset data;
    PreparedGraph graph;
    std::unique_ptr<Workspace> workspace;
};

/// Throws ValidationError when there is no geography to build a graph from.
Pipeline load_pipeline(const std::filesystem::path& dir, const std::optional<std::filesystem::path>& geo = {});

// ---------------------------------------------------------------------------
// Stability

struct StabilityConfig {
    Representation representation;
    Metric metric;
    Algorithm algorithm;
    int k = 5;
};

/// The six configurations of the cross-election stability table.
std::vector<StabilityConfig> stability_preset(std::string_view name);

struct StabilityRun {
    StabilityConfig config;
    std::vector<int> election_ids;
    std::vector<Partition> partitions;
    StabilityReport report;
};

/// Clusters each single-election panel independently on the shared graph
/// and compares the partitions pairwise.
StabilityRun stability_analysis(const StabilityConfig& config, const std::vector<AlignedPanel>& per_election,
                                const ContiguityGraph& graph, const BlocMapping& mapping,
                                const RunOptions& options = {});

/// Splits a multi-election panel into single-election panels.
std::vector<AlignedPanel> split_elections(const AlignedPanel& panel);

std::string stability_to_json(const StabilityRun& run);

// ---------------------------------------------------------------------------
// SA seed sensitivity

struct Moments {
    double mean = 0.0, std = 0.0, min = 0.0, max = 0.0;
};

struct SweepSummary {
    ExperimentConfig config;
    int n_seeds = 0;
    int iterations = 0;
    Moments silhouette;
    Moments population_cv;
};

SweepSummary sa_seed_sweep(const ExperimentConfig& config, const Workspace& workspace, int n_seeds = 30,
                           int iterations = 50000, const CostWeights& weights = {});

Moments moments(const std::vector<double>& values);  // population std

// ---------------------------------------------------------------------------
// Export

struct CantonProfile {
    int canton = 0;
    int municipalities = 0;
    BlocVector mean_share_pct{};  // unweighted mean of municipality bloc shares, percent
    double voters = 0.0;
};

std::vector<CantonProfile> canton_profiles(const Partition& partition, std::span<const BlocVector> bloc_shares,
                                           std::span<const double> voter_weights);

struct PartitionExport {
    std::string geojson;   // FeatureCollection with name, canton, bloc_means
    std::string profiles;  // JSON sidecar: config, report, canton rows
};

/// Throws ValidationError listing municipalities without a polygon.
PartitionExport export_partition_geojson(const ExperimentResult& result, std::span<const BoundaryPolygon> polygons,
                                         const Workspace& workspace);

}  // namespace cantons
