#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sift/common.hpp"

namespace sift {

/// Directed metric-to-metric dependency across two components.
struct DependencyEdge {
    std::string src_component;
    std::string src_metric;
    std::string dst_component;
    std::string dst_metric;
    std::int64_t lag_ms = 0;
    double p_value = 1.0;
    double q_value = 1.0;  ///< FDR-adjusted p-value; equals p_value when FDR control is off

    [[nodiscard]] MetricKey src() const { return {src_component, src_metric}; }
    [[nodiscard]] MetricKey dst() const { return {dst_component, dst_metric}; }
    [[nodiscard]] auto sort_key() const {
        return std::tie(src_component, src_metric, dst_component, dst_metric);
    }
    bool operator==(const DependencyEdge&) const = default;
};

struct DependencyGraph {
    std::vector<DependencyEdge> edges;  ///< sorted by (src_component, src_metric, dst_component, dst_metric)

    void sort();
    [[nodiscard]] bool empty() const noexcept { return edges.empty(); }
    /// Directed component pairs carrying at least one edge.
    [[nodiscard]] std::set<std::pair<std::string, std::string>> component_pairs() const;

    bool operator==(const DependencyGraph&) const = default;
};

}  // namespace sift
