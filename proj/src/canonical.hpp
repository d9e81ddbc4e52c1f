#pragma once

// Permutation of graph nodes into sorted-id order, used by the partitioners
// so results do not depend on the caller's node order.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "cantons/distances.hpp"
#include "cantons/geograph.hpp"

namespace cantons::detail {

class CanonicalOrder {
public:
    explicit CanonicalOrder(const ContiguityGraph& graph);

    bool identity() const { return identity_; }
    std::size_t to_original(std::size_t canonical) const { return order_[canonical]; }

    ContiguityGraph graph(const ContiguityGraph& graph) const;
    Eigen::MatrixXd rows(const Eigen::MatrixXd& m) const;
    DistanceMatrix distances(const DistanceMatrix& dm) const;

    template <class T>
    std::vector<T> items(std::span<const T> values) const {
        std::vector<T> out;
        out.reserve(order_.size());
        for (std::size_t i : order_) out.push_back(values[i]);
        return out;
    }

    /// Canonicalizes labels in sorted-id order, then returns them in the
    /// original node order.
    std::vector<int> restore(std::span<const int> canonical_labels) const;

private:
    std::vector<std::size_t> order_;     // canonical position -> original index
    std::vector<std::size_t> position_;  // original index -> canonical position
    bool identity_ = true;
};

}  // namespace cantons::detail
