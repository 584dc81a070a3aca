#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sift/common.hpp"

namespace sift::ingest {

struct RawSample {
    std::int64_t timestamp_ms = 0;
    double value = 0.0;

    bool operator==(const RawSample&) const = default;
};

/// Raw samples of one metric, strictly increasing in time.
struct MetricSeries {
    std::string component;
    std::string metric;
    std::vector<RawSample> samples;

    [[nodiscard]] MetricKey key() const { return {component, metric}; }
    bool operator==(const MetricSeries&) const = default;
};

/// Immutable collection of validated series, sorted by (component, metric).
class MetricCatalog {
public:
    MetricCatalog() = default;

    /// Validates every series (>= 2 samples, strictly increasing, finite, unique keys).
    explicit MetricCatalog(std::vector<MetricSeries> series);

    [[nodiscard]] const std::vector<MetricSeries>& series() const noexcept { return series_; }
    [[nodiscard]] const std::set<std::string>& components() const noexcept { return components_; }
    [[nodiscard]] std::size_t size() const noexcept { return series_.size(); }

    /// nullptr when absent.
    [[nodiscard]] const MetricSeries* find(const MetricKey& key) const;

    /// Metric names per component.
    [[nodiscard]] std::map<std::string, std::set<std::string>> metric_names() const;

    bool operator==(const MetricCatalog&) const = default;

private:
    std::vector<MetricSeries> series_;
    std::set<std::string> components_;
};

struct CommEvent {
    std::int64_t timestamp_ms = 0;
    std::string caller;
    std::string callee;
};

/// Directed component graph; edges point from caller to callee.
struct CallGraph {
    std::set<std::string> nodes;
    std::map<std::pair<std::string, std::string>, std::uint64_t> edges;  ///< (caller, callee) -> count
    std::uint64_t self_calls_dropped = 0;

    [[nodiscard]] bool has_edge(const std::string& a, const std::string& b) const {
        return edges.contains({a, b});
    }
    /// True when a and b are adjacent in either direction.
    [[nodiscard]] bool adjacent(const std::string& a, const std::string& b) const {
        return has_edge(a, b) || has_edge(b, a);
    }
    /// Unordered adjacent pairs (first < second), each listed once.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> undirected_pairs() const;

    bool operator==(const CallGraph&) const = default;
};

/// Parses a metrics CSV (`timestamp_ms,component,metric,value`).
/// Throws ParseError naming the offending line.
[[nodiscard]] MetricCatalog load_metrics(const std::filesystem::path& path);
[[nodiscard]] MetricCatalog parse_metrics(std::string_view text, const std::string& source = "<memory>");

/// Writes the catalog back in the metrics CSV format; values use shortest
/// round-trip formatting so load_metrics(write_metrics(c)) == c.
void write_metrics(const MetricCatalog& catalog, const std::filesystem::path& path);
[[nodiscard]] std::string format_metrics(const MetricCatalog& catalog);

[[nodiscard]] std::vector<CommEvent> load_events(const std::filesystem::path& path);
[[nodiscard]] std::vector<CommEvent> parse_events(std::string_view text, const std::string& source = "<memory>");

/// Counts events per (caller, callee); self-calls are dropped and tallied.
/// Throws Error when no cross-component event remains.
[[nodiscard]] CallGraph build_call_graph(std::span<const CommEvent> events);

/// Direct call-graph input (`caller,callee,count`).
[[nodiscard]] CallGraph load_call_graph(const std::filesystem::path& path);
[[nodiscard]] CallGraph parse_call_graph(std::string_view text, const std::string& source = "<memory>");
void write_call_graph(const CallGraph& graph, const std::filesystem::path& path);

/// Either an events CSV or a callgraph CSV, distinguished by header.
[[nodiscard]] CallGraph load_call_graph_any(const std::filesystem::path& path);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest round-trip decimal representation of a double.
[[nodiscard]] std::string format_double(double v);

}  // namespace sift::ingest
