#include "canonical.hpp"

#include <algorithm>
#include <numeric>

#include "cantons/partition.hpp"

namespace cantons::detail {

CanonicalOrder::CanonicalOrder(const ContiguityGraph& graph) {
    const auto& ids = graph.nodes();
    order_.resize(ids.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    position_.resize(ids.size());
    for (std::size_t c = 0; c < order_.size(); ++c) {
        position_[order_[c]] = c;
        if (order_[c] != c) identity_ = false;
    }
}

ContiguityGraph CanonicalOrder::graph(const ContiguityGraph& g) const {
    if (identity_) return g;
    std::vector<std::string> ids;
    for (std::size_t i : order_) ids.push_back(g.nodes()[i]);
    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) {
        Edge c = e;
        c.u = std::min(position_[e.u], position_[e.v]);
        c.v = std::max(position_[e.u], position_[e.v]);
        edges.push_back(c);
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
    ContiguityGraph out(std::move(ids));
    for (const Edge& e : edges) out.add_edge(e.u, e.v, e.kind, e.weight);
    return out;
}

Eigen::MatrixXd CanonicalOrder::rows(const Eigen::MatrixXd& m) const {
    if (identity_) return m;
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t c = 0; c < order_.size(); ++c)
        out.row(static_cast<Eigen::Index>(c)) = m.row(static_cast<Eigen::Index>(order_[c]));
    return out;
}

DistanceMatrix CanonicalOrder::distances(const DistanceMatrix& dm) const {
    if (identity_) return dm;
    DistanceMatrix out;
    out.metric = dm.metric;
    if (!dm.row_ids.empty())
        for (std::size_t i : order_) out.row_ids.push_back(dm.row_ids[i]);
    const auto n = static_cast<Eigen::Index>(order_.size());
    out.values.resize(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
            out.values(a, b) = dm.values(static_cast<Eigen::Index>(order_[static_cast<std::size_t>(a)]),
                                         static_cast<Eigen::Index>(order_[static_cast<std::size_t>(b)]));
    return out;
}

std::vector<int> CanonicalOrder::restore(std::span<const int> canonical) const {
    const std::vector<int> relabeled = canonical_labels(canonical);
    std::vector<int> out(relabeled.size());
    for (std::size_t c = 0; c < order_.size(); ++c) out[order_[c]] = relabeled[c];
    return out;
}

}  // namespace cantons::detail
