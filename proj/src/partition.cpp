#include "cantons/partition.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cantons/error.hpp"
#include "cantons/geograph.hpp"

namespace cantons {

std::vector<int> canonical_labels(std::span<const int> labels) {
    std::map<int, int> remap;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) {
            out[i] = labels[i];
            continue;
        }
        const auto [it, inserted] = remap.emplace(labels[i], static_cast<int>(remap.size()));
        out[i] = it->second;
    }
    return out;
}

int count_labels(std::span<const int> labels) {
    std::set<int> distinct;
    for (int l : labels)
        if (l >= 0) distinct.insert(l);
    return static_cast<int>(distinct.size());
}

Partition Partition::from_labels(std::span<const int> labels, int requested_k) {
    Partition p;
    p.labels = canonical_labels(labels);
    if (std::any_of(p.labels.begin(), p.labels.end(), [](int l) { return l < 0; }))
        throw DomainError("partition is not total");
    p.k = requested_k;
    p.achieved_k = count_labels(p.labels);
    return p;
}

int disconnected_cantons(std::span<const int> labels, const ContiguityGraph& graph) {
    if (labels.size() != graph.node_count()) throw DomainError("partition does not cover the graph");
    const int cantons = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<int> components(static_cast<std::size_t>(std::max(cantons, 0)), 0);
    std::vector<char> seen(labels.size(), 0);
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < labels.size(); ++s) {
        if (seen[s] || labels[s] < 0) continue;
        ++components[static_cast<std::size_t>(labels[s])];
        seen[s] = 1;
        stack.push_back(s);
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (const std::size_t v : graph.neighbors(u))
                if (!seen[v] && labels[v] == labels[s]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
        }
    }
    return static_cast<int>(std::count_if(components.begin(), components.end(), [](int c) { return c > 1; }));
}

}  // namespace cantons
