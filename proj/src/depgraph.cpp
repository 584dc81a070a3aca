#include "sift/depgraph.hpp"

#include <algorithm>

namespace sift {

void DependencyGraph::sort() {
    std::sort(edges.begin(), edges.end(),
              [](const DependencyEdge& a, const DependencyEdge& b) { return a.sort_key() < b.sort_key(); });
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](const DependencyEdge& a, const DependencyEdge& b) { return a.sort_key() == b.sort_key(); }),
                edges.end());
}

std::set<std::pair<std::string, std::string>> DependencyGraph::component_pairs() const {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& e : edges) out.emplace(e.src_component, e.dst_component);
    return out;
}

}  // namespace sift
