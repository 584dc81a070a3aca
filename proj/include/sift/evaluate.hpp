#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sift/clustering.hpp"
#include "sift/depgraph.hpp"

namespace sift::evaluate {

/// Item -> cluster label.
using LabelAssignment = std::map<std::string, int>;

/// Adjusted mutual information with the arithmetic-mean normalizer and the
/// hypergeometric expected MI. Throws when the item sets differ.
[[nodiscard]] double ami(const LabelAssignment& a, const LabelAssignment& b);
[[nodiscard]] double ami(std::span<const int> a, std::span<const int> b);

/// Labels of a cluster model keyed by metric.
[[nodiscard]] LabelAssignment labels_of(const clustering::ClusterModel& model);

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Set precision/recall over directed component pairs. Empty inferred -> precision 0.
[[nodiscard]] Prf edge_prf(const DependencyGraph& truth, const DependencyGraph& inferred);

/// Total metrics / total representatives.
[[nodiscard]] double reduction_ratio(std::size_t metrics, std::size_t representatives);
[[nodiscard]] double reduction_ratio(const std::map<std::string, std::set<std::string>>& catalog,
                                     std::span<const clustering::ClusterModel> models);

}  // namespace sift::evaluate
