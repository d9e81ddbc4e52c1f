#pragma once

#include <span>
#include <string>
#include <vector>

namespace cantons {

class ContiguityGraph;

/// Total assignment of the graph's nodes (in node order) to canton labels
/// 0..achieved_k-1.
struct Partition {
    std::vector<int> labels;
    int k = 0;           // requested canton count
    int achieved_k = 0;  // distinct labels

    /// Relabels by order of first appearance so labels are 0..m-1.
    static Partition from_labels(std::span<const int> labels, int requested_k);

    std::size_t size() const { return labels.size(); }
    bool operator==(const Partition&) const = default;
};

/// Relabels by first appearance; negative labels (unassigned) are kept.
std::vector<int> canonical_labels(std::span<const int> labels);

/// Number of distinct non-negative labels.
int count_labels(std::span<const int> labels);

/// Number of cantons whose induced subgraph has more than one component.
int disconnected_cantons(std::span<const int> labels, const ContiguityGraph& graph);

}  // namespace cantons
