#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "sift/clustering.hpp"
#include "sift/depgraph.hpp"
#include "sift/preprocess.hpp"

namespace sift::rca {

/// Analysis state of one application version.
struct VersionSnapshot {
    std::string label;                                     ///< "C" or "F"
    std::map<std::string, std::set<std::string>> catalog;  ///< metric names per component
    std::vector<clustering::ClusterModel> models;
    DependencyGraph depgraph;

    [[nodiscard]] const clustering::ClusterModel* model(const std::string& component) const;
    /// Throws if a model member is missing from the catalog.
    void validate() const;
};

/// Builds a snapshot from pipeline outputs. Catalog includes dropped (low-variance) metrics.
[[nodiscard]] VersionSnapshot make_snapshot(std::string label, const preprocess::PreparedCatalog& prepared,
                                            std::vector<clustering::ClusterModel> models, DependencyGraph depgraph);

/// Loads prepared.json, clusters.json and depgraph.json from a run directory.
[[nodiscard]] VersionSnapshot load_snapshot(const std::filesystem::path& dir, std::string label);

struct RcaConfig {
    double similarity_threshold = 0.5;
    int novelty_threshold = 1;  ///< a cluster is novel with at least this many new/discarded metrics

    void validate() const;
};

struct ComponentDiff {
    std::set<std::string> added;      ///< F \ C
    std::set<std::string> discarded;  ///< C \ F
};

[[nodiscard]] std::map<std::string, ComponentDiff> metric_diff(const VersionSnapshot& c, const VersionSnapshot& f);

struct NoveltyScore {
    int new_count = 0;
    int discarded_count = 0;
    int total = 0;

    friend bool operator==(const NoveltyScore&, const NoveltyScore&) = default;
};

[[nodiscard]] NoveltyScore make_novelty(int new_count, int discarded_count);

struct RankedComponent {
    std::string component;
    NoveltyScore novelty;
};

/// Total desc, then new desc, then name asc.
[[nodiscard]] std::vector<RankedComponent> rank_novelty(const std::map<std::string, NoveltyScore>& scores);
[[nodiscard]] std::vector<RankedComponent> rank_novelty(const std::map<std::string, ComponentDiff>& diff);

/// |mc ∩ mf| / |mc|. Throws on empty mc.
[[nodiscard]] double cluster_similarity(const std::set<std::string>& mc, const std::set<std::string>& mf);

struct ClusterMatch {
    int c_cluster = -1;
    int f_cluster = -1;
    double similarity = 0.0;
};

/// Greedy one-to-one matching by descending similarity; ties by (c id, f id).
[[nodiscard]] std::vector<ClusterMatch> match_clusters(const clustering::ClusterModel& c,
                                                       const clustering::ClusterModel& f, const RcaConfig& cfg);

enum class EventKind { NovelClusterEdge, EdgeChurn, LagChange };

[[nodiscard]] std::string to_string(EventKind kind);
[[nodiscard]] EventKind event_kind_from_string(const std::string& s);

struct EdgeEvent {
    EventKind kind = EventKind::NovelClusterEdge;
    std::string version;  ///< "C", "F" or "C,F" for lag changes
    DependencyEdge edge;
    std::int64_t other_lag_ms = 0;  ///< lag in the faulty version for LAG_CHANGE

    [[nodiscard]] auto key() const { return std::tie(kind, version, edge.src_component, edge.src_metric,
                                                     edge.dst_component, edge.dst_metric); }
};

/// Per-component matchings, keyed by component.
using Matching = std::map<std::string, std::vector<ClusterMatch>>;

[[nodiscard]] Matching match_all(const VersionSnapshot& c, const VersionSnapshot& f, const RcaConfig& cfg);

[[nodiscard]] std::vector<EdgeEvent> edge_filter(const VersionSnapshot& c, const VersionSnapshot& f,
                                                 const Matching& mapping, const RcaConfig& cfg);

struct ReportEntry {
    std::string component;
    int rank = 0;
    NoveltyScore novelty;
    std::vector<std::string> metric_list;
    std::vector<EdgeEvent> evidence;
};

struct RcaReport {
    std::vector<ReportEntry> ranked;

    [[nodiscard]] std::size_t metric_count() const;
};

[[nodiscard]] RcaReport rca_report(const VersionSnapshot& c, const VersionSnapshot& f, const RcaConfig& cfg);

/// Fixed-width text table: rank, component, novelty n/d, #metrics, event kinds.
[[nodiscard]] std::string format_table(const RcaReport& report);

}  // namespace sift::rca
