#include "cantons/geograph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include <json.hpp>

#include "cantons/error.hpp"

namespace cantons {

using nlohmann::json;

namespace {

constexpr double kSnapScale = 1e6;  // 1e-6 degree grid

struct SnappedPoint {
    std::int64_t x = 0;
    std::int64_t y = 0;
    bool operator==(const SnappedPoint&) const = default;
};

struct Segment {
    SnappedPoint a, b;
    std::int64_t xmin, xmax, ymin, ymax;
    std::size_t owner;
};

SnappedPoint snap(const GeoPoint& p) {
    return {static_cast<std::int64_t>(std::llround(p.lon * kSnapScale)),
            static_cast<std::int64_t>(std::llround(p.lat * kSnapScale))};
}

std::int64_t cross(const SnappedPoint& o, const SnappedPoint& a, const SnappedPoint& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::int64_t dot(const SnappedPoint& o, const SnappedPoint& a, const SnappedPoint& b) {
    return (a.x - o.x) * (b.x - o.x) + (a.y - o.y) * (b.y - o.y);
}

// True when the two segments are collinear and overlap on an interval of
// positive length. Coordinates are exact integers, so the test is exact.
bool overlaps(const Segment& s, const Segment& t) {
    if (cross(s.a, s.b, t.a) != 0 || cross(s.a, s.b, t.b) != 0) return false;
    // Project on the direction of s: parameter of a point p is dot(s.a, s.b, p).
    const std::int64_t s_end = dot(s.a, s.b, s.b);
    std::int64_t t0 = dot(s.a, s.b, t.a);
    std::int64_t t1 = dot(s.a, s.b, t.b);
    if (t0 > t1) std::swap(t0, t1);
    const std::int64_t lo = std::max<std::int64_t>(0, t0);
    const std::int64_t hi = std::min<std::int64_t>(s_end, t1);
    return hi > lo;
}

std::vector<Ring> parse_polygon_coordinates(const json& polygon) {
    std::vector<Ring> rings;
    for (const auto& ring_json : polygon) {
        Ring ring;
        for (const auto& pt : ring_json) {
            if (!pt.is_array() || pt.size() < 2) throw ParseError("GeoJSON position needs 2 coordinates", 0);
            ring.push_back({pt[0].get<double>(), pt[1].get<double>()});
        }
        if (ring.size() < 4) throw ParseError("GeoJSON ring needs at least 4 positions", 0);
        if (ring.front().lon != ring.back().lon || ring.front().lat != ring.back().lat)
            throw ParseError("GeoJSON ring is not closed", 0);
        rings.push_back(std::move(ring));
    }
    return rings;
}

double euclidean_rows(const Eigen::MatrixXd& m, std::size_t i, std::size_t j) {
    return (m.row(static_cast<Eigen::Index>(i)) - m.row(static_cast<Eigen::Index>(j))).norm();
}

double metric_rows(Metric metric, const Eigen::MatrixXd& m, std::size_t i, std::size_t j) {
    const Eigen::VectorXd a = m.row(static_cast<Eigen::Index>(i)).transpose();
    const Eigen::VectorXd b = m.row(static_cast<Eigen::Index>(j)).transpose();
    return distance(metric, std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                    std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

}  // namespace

std::string_view to_string(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::Boundary: return "boundary";
        case EdgeKind::Virtual: return "virtual";
        case EdgeKind::Enclave: return "enclave";
        case EdgeKind::Bridge: return "bridge";
    }
    return "boundary";
}

EdgeKind parse_edge_kind(std::string_view text) {
    for (auto kind : {EdgeKind::Boundary, EdgeKind::Virtual, EdgeKind::Enclave, EdgeKind::Bridge})
        if (to_string(kind) == text) return kind;
    throw ParseError("unknown edge kind '" + std::string(text) + "'", 0);
}

// ---------------------------------------------------------------------------
// ContiguityGraph

ContiguityGraph::ContiguityGraph(std::vector<std::string> nodes) : nodes_(std::move(nodes)) {
    adjacency_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (!index_.emplace(nodes_[i], i).second) throw GraphError("duplicate node id '" + nodes_[i] + "'");
}

std::uint64_t ContiguityGraph::key(std::size_t u, std::size_t v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
}

bool ContiguityGraph::add_edge(std::size_t u, std::size_t v, EdgeKind kind, std::optional<double> weight) {
    if (u >= nodes_.size() || v >= nodes_.size()) throw GraphError("edge endpoint out of range");
    if (u == v) throw GraphError("self-loop on '" + nodes_[u] + "'");
    if (u > v) std::swap(u, v);
    const auto [it, inserted] = edge_index_.emplace(key(u, v), edges_.size());
    if (!inserted) return false;
    edges_.push_back({u, v, kind, weight});
    auto& au = adjacency_[u];
    au.insert(std::lower_bound(au.begin(), au.end(), v), v);
    auto& av = adjacency_[v];
    av.insert(std::lower_bound(av.begin(), av.end(), u), u);
    return true;
}

std::size_t ContiguityGraph::count(EdgeKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(edges_.begin(), edges_.end(), [kind](const Edge& e) { return e.kind == kind; }));
}

bool ContiguityGraph::has_edge(std::size_t u, std::size_t v) const {
    return u != v && edge_index_.count(key(u, v)) > 0;
}

std::optional<std::size_t> ContiguityGraph::find_edge(std::size_t u, std::size_t v) const {
    if (u == v) return std::nullopt;
    const auto it = edge_index_.find(key(u, v));
    if (it == edge_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> ContiguityGraph::index_of(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::size_t> ContiguityGraph::component_labels() const {
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> label(nodes_.size(), unset);
    std::size_t next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < nodes_.size(); ++s) {
        if (label[s] != unset) continue;
        label[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (const std::size_t v : adjacency_[u])
                if (label[v] == unset) {
                    label[v] = next;
                    stack.push_back(v);
                }
        }
        ++next;
    }
    return label;
}

std::size_t ContiguityGraph::component_count() const {
    const auto labels = component_labels();
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

// ---------------------------------------------------------------------------
// GeoJSON

std::vector<BoundaryPolygon> parse_geojson_polygons(std::string_view text, const NameNormalizer& normalizer) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid GeoJSON: ") + e.what(), 0);
    }
    if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features"))
        throw ParseError("GeoJSON root must be a FeatureCollection", 0);

    std::vector<BoundaryPolygon> polygons;
    for (const auto& feature : doc["features"]) {
        const auto& props = feature.value("properties", json::object());
        if (!props.contains("name") || !props["name"].is_string())
            throw ParseError("GeoJSON feature without a string 'name' property", 0);
        BoundaryPolygon poly;
        poly.name = props["name"].get<std::string>();
        poly.municipality_id = normalizer(poly.name);
        const auto& geom = feature.at("geometry");
        const std::string type = geom.value("type", "");
        if (type == "Polygon") {
            poly.parts.push_back(parse_polygon_coordinates(geom.at("coordinates")));
        } else if (type == "MultiPolygon") {
            for (const auto& part : geom.at("coordinates")) poly.parts.push_back(parse_polygon_coordinates(part));
        } else {
            throw ParseError("unsupported geometry type '" + type + "' for '" + poly.name + "'", 0);
        }
        polygons.push_back(std::move(poly));
    }
    return polygons;
}

// ---------------------------------------------------------------------------
// Construction

ContiguityGraph build_adjacency(std::span<const BoundaryPolygon> polygons) {
    if (polygons.empty()) throw GraphError("no polygons");

    std::vector<std::size_t> order(polygons.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return polygons[a].municipality_id < polygons[b].municipality_id;
    });
    std::vector<std::string> ids;
    for (std::size_t i : order) ids.push_back(polygons[i].municipality_id);
    ContiguityGraph graph(ids);  // throws on duplicates

    std::vector<Segment> segments;
    for (std::size_t node = 0; node < order.size(); ++node) {
        for (const auto& part : polygons[order[node]].parts)
            for (const Ring& ring : part)
                for (std::size_t k = 0; k + 1 < ring.size(); ++k) {
                    const SnappedPoint a = snap(ring[k]), b = snap(ring[k + 1]);
                    if (a == b) continue;
                    segments.push_back({a, b, std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y),
                                        std::max(a.y, b.y), node});
                }
    }
    std::sort(segments.begin(), segments.end(), [](const Segment& s, const Segment& t) {
        return s.xmin != t.xmin ? s.xmin < t.xmin : s.owner < t.owner;
    });

    for (std::size_t i = 0; i < segments.size(); ++i) {
        const Segment& s = segments[i];
        for (std::size_t j = i + 1; j < segments.size() && segments[j].xmin <= s.xmax; ++j) {
            const Segment& t = segments[j];
            if (t.owner == s.owner || t.ymin > s.ymax || t.ymax < s.ymin) continue;
            if (graph.has_edge(s.owner, t.owner)) continue;
            if (overlaps(s, t)) graph.add_edge(s.owner, t.owner, EdgeKind::Boundary);
        }
    }
    return graph;
}

ContiguityGraph subset_graph(const ContiguityGraph& graph, std::span<const std::string> ids) {
    std::vector<std::size_t> source;
    for (const auto& id : ids) {
        const auto idx = graph.index_of(id);
        if (!idx) throw GraphError("unknown node '" + id + "'");
        source.push_back(*idx);
    }
    ContiguityGraph out(std::vector<std::string>(ids.begin(), ids.end()));
    std::unordered_map<std::size_t, std::size_t> remap;
    for (std::size_t i = 0; i < source.size(); ++i) remap[source[i]] = i;
    for (const Edge& e : graph.edges()) {
        const auto u = remap.find(e.u), v = remap.find(e.v);
        if (u != remap.end() && v != remap.end()) out.add_edge(u->second, v->second, e.kind, e.weight);
    }
    return out;
}

ContiguityGraph augment_graph(const ContiguityGraph& graph, const FeatureMatrix& features,
                              std::span<const BlocVector> bloc_shares, const AugmentOptions& options) {
    const std::size_t n = graph.node_count();
    if (n < 2) return graph;
    if (static_cast<std::size_t>(features.rows()) != n || bloc_shares.size() != n)
        throw GraphError("features and bloc shares must have one row per graph node");
    if (!features.row_ids.empty() && features.row_ids != graph.nodes())
        throw GraphError("feature rows are not in graph node order");

    ContiguityGraph out = graph;
    const Eigen::MatrixXd& f = features.values;

    // 1. Isolates.
    std::vector<std::size_t> isolates, connected;
    for (std::size_t u = 0; u < n; ++u) (graph.degree(u) == 0 ? isolates : connected).push_back(u);
    for (const std::size_t u : isolates) {
        std::vector<std::size_t> pool = connected;
        if (pool.size() < options.knn) {
            pool.clear();
            for (std::size_t v = 0; v < n; ++v)
                if (v != u) pool.push_back(v);
        }
        std::vector<std::pair<double, std::size_t>> ranked;
        for (const std::size_t v : pool) ranked.emplace_back(euclidean_rows(f, u, v), v);
        const std::size_t take = std::min(options.knn, ranked.size());
        std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end());
        for (std::size_t k = 0; k < take; ++k) out.add_edge(u, ranked[k].second, EdgeKind::Virtual);
    }

    // 2. Same-bloc enclaves.
    for (std::size_t b = 0; b < kNumBlocs; ++b) {
        std::vector<std::size_t> dominant;
        for (std::size_t u = 0; u < n; ++u)
            if (bloc_shares[u][b] > options.dominance_threshold) dominant.push_back(u);
        for (std::size_t i = 0; i < dominant.size(); ++i)
            for (std::size_t j = i + 1; j < dominant.size(); ++j)
                out.add_edge(dominant[i], dominant[j], EdgeKind::Enclave);
    }

    // 3. Bridges to the largest component.
    const auto labels = out.component_labels();
    const std::size_t components = *std::max_element(labels.begin(), labels.end()) + 1;
    if (components > 1) {
        std::vector<std::vector<std::size_t>> members(components);
        for (std::size_t u = 0; u < n; ++u) members[labels[u]].push_back(u);
        std::size_t largest = 0;
        for (std::size_t c = 1; c < components; ++c)
            if (members[c].size() > members[largest].size()) largest = c;
        for (std::size_t c = 0; c < components; ++c) {
            if (c == largest) continue;
            double best = std::numeric_limits<double>::infinity();
            std::pair<std::size_t, std::size_t> pair{0, 0};
            for (const std::size_t u : members[c])
                for (const std::size_t v : members[largest]) {
                    const double d = metric_rows(options.bridge_metric, f, u, v);
                    if (d < best) {
                        best = d;
                        pair = {u, v};
                    }
                }
            out.add_edge(pair.first, pair.second, EdgeKind::Bridge);
        }
    }
    return out;
}

ContiguityGraph edge_similarity_weights(const ContiguityGraph& graph, const DistanceMatrix& distances) {
    if (distances.size() != static_cast<Eigen::Index>(graph.node_count()))
        throw GraphError("distance matrix does not cover the graph nodes");
    ContiguityGraph out = graph;
    double d_max = 0.0;
    for (const Edge& e : graph.edges())
        d_max = std::max(d_max, distances(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)));
    for (std::size_t k = 0; k < graph.edge_count(); ++k) {
        const Edge& e = graph.edges()[k];
        const double d = distances(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v));
        out.set_weight(k, d_max > 0.0 ? std::clamp(1.0 - d / d_max, 0.0, 1.0) : 1.0);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string graph_to_json(const ContiguityGraph& graph) {
    json doc;
    doc["nodes"] = graph.nodes();
    json edges = json::array();
    for (const Edge& e : graph.edges()) {
        json je = {{"u", graph.nodes()[e.u]}, {"v", graph.nodes()[e.v]}, {"kind", std::string(to_string(e.kind))}};
        je["weight"] = e.weight ? json(*e.weight) : json(nullptr);
        edges.push_back(std::move(je));
    }
    doc["edges"] = std::move(edges);
    return doc.dump();
}

ContiguityGraph graph_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid graph JSON: ") + e.what(), 0);
    }
    ContiguityGraph graph(doc.at("nodes").get<std::vector<std::string>>());
    for (const auto& je : doc.at("edges")) {
        const auto u = graph.index_of(je.at("u").get<std::string>());
        const auto v = graph.index_of(je.at("v").get<std::string>());
        if (!u || !v) throw GraphError("edge references an unknown node");
        std::optional<double> weight;
        if (je.contains("weight") && !je["weight"].is_null()) weight = je["weight"].get<double>();
        graph.add_edge(*u, *v, parse_edge_kind(je.at("kind").get<std::string>()), weight);
    }
    return graph;
}

}  // namespace cantons
