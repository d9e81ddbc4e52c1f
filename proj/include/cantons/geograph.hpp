#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cantons/distances.hpp"
#include "cantons/features.hpp"
#include "cantons/ingest.hpp"

namespace cantons {

struct GeoPoint {
    double lon = 0.0;
    double lat = 0.0;
};

using Ring = std::vector<GeoPoint>;

/// Boundary of one (already dissolved) municipality: one entry in `parts`
/// per polygon, each an outer ring followed by its holes. Rings are closed.
struct BoundaryPolygon {
    std::string municipality_id;  // normalized name
    std::string name;             // as found in the source file
    std::vector<std::vector<Ring>> parts;
};

/// Reads a GeoJSON FeatureCollection of Polygon / MultiPolygon features.
/// Each feature's `name` property is passed through `normalizer` to obtain
/// the municipality id.
std::vector<BoundaryPolygon> parse_geojson_polygons(std::string_view text, const NameNormalizer& normalizer = {});

enum class EdgeKind { Boundary, Virtual, Enclave, Bridge };

std::string_view to_string(EdgeKind kind);
EdgeKind parse_edge_kind(std::string_view text);

struct Edge {
    std::size_t u = 0;  // u < v
    std::size_t v = 0;
    EdgeKind kind = EdgeKind::Boundary;
    std::optional<double> weight;
};

/// Undirected simple graph over municipality ids. Edges are stored once
/// with u < v; adjacency lists are kept sorted.
class ContiguityGraph {
public:
    ContiguityGraph() = default;
    /// Throws GraphError on duplicate ids.
    explicit ContiguityGraph(std::vector<std::string> nodes);

    /// Adds {u, v}; returns false when the edge already exists. Self-loops
    /// and out-of-range indices throw GraphError.
    bool add_edge(std::size_t u, std::size_t v, EdgeKind kind, std::optional<double> weight = std::nullopt);

    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    std::size_t count(EdgeKind kind) const;

    const std::vector<std::size_t>& neighbors(std::size_t u) const { return adjacency_[u]; }
    std::size_t degree(std::size_t u) const { return adjacency_[u].size(); }
    bool has_edge(std::size_t u, std::size_t v) const;
    std::optional<std::size_t> find_edge(std::size_t u, std::size_t v) const;
    std::optional<std::size_t> index_of(const std::string& id) const;

    void set_weight(std::size_t edge_index, double weight) { edges_[edge_index].weight = weight; }
    /// Weight of an edge, 1.0 when unweighted.
    double weight_or_one(std::size_t edge_index) const { return edges_[edge_index].weight.value_or(1.0); }

    /// Component label per node, numbered in order of smallest member index.
    std::vector<std::size_t> component_labels() const;
    std::size_t component_count() const;
    bool is_connected() const { return component_count() <= 1; }

private:
    static std::uint64_t key(std::size_t u, std::size_t v);

    std::vector<std::string> nodes_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> adjacency_;
    std::unordered_map<std::uint64_t, std::size_t> edge_index_;
};

/// Boundary edges between polygons that share a boundary segment of positive
/// length after snapping coordinates to a 1e-6 degree grid. Point contact
/// does not count. Nodes are ordered by municipality id.
ContiguityGraph build_adjacency(std::span<const BoundaryPolygon> polygons);

/// Induced subgraph on `ids` (kept in the given order). Unknown ids throw.
ContiguityGraph subset_graph(const ContiguityGraph& graph, std::span<const std::string> ids);

struct AugmentOptions {
    double dominance_threshold = 0.70;
    std::size_t knn = 3;
    Metric bridge_metric = Metric::Euclidean;
};

/// Makes the graph connected in three ordered steps:
///  1. every isolated node gets `knn` virtual edges to its nearest
///     non-isolated nodes in feature space (Euclidean);
///  2. nodes whose mean share of one bloc exceeds the threshold are joined
///     pairwise with enclave edges, one clique per bloc;
///  3. every other component is bridged to the largest one through its
///     closest cross pair under `bridge_metric`.
/// `features` rows and `bloc_shares` follow the graph's node order.
ContiguityGraph augment_graph(const ContiguityGraph& graph, const FeatureMatrix& features,
                              std::span<const BlocVector> bloc_shares, const AugmentOptions& options = {});

/// Annotates every edge with 1 - d/d_max, d_max being the largest distance
/// over graph edges (all weights 1 when d_max is 0).
ContiguityGraph edge_similarity_weights(const ContiguityGraph& graph, const DistanceMatrix& distances);

/// `{nodes:[...], edges:[{u,v,kind,weight}]}` with u, v as node ids.
std::string graph_to_json(const ContiguityGraph& graph);
ContiguityGraph graph_from_json(std::string_view text);

}  // namespace cantons
