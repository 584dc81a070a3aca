#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sift/common.hpp"
#include "sift/depgraph.hpp"

namespace sift::autoscale {

struct SlaSpec {
    double percentile = 0.90;
    double bound_ms = 1000.0;

    void validate() const;
};

struct ScalingRule {
    std::string metric;
    double up_threshold = 0.0;
    double down_threshold = 0.0;
    int delta = 1;
    int min_instances = 1;
    int max_instances = 10;
    int cooldown_intervals = 12;

    void validate() const;
};

/// One calibration or replay interval.
struct TraceRow {
    std::int64_t interval = 0;
    double metric_value = 0.0;
    double latency_ms = 0.0;  ///< latency at the SLA percentile
};

using Trace = std::vector<TraceRow>;

/// CSV with header `interval,metric_value,latency_p90_ms`.
[[nodiscard]] Trace parse_trace(std::string_view text, const std::string& origin = "<memory>");
[[nodiscard]] Trace load_trace(const std::filesystem::path& path);
[[nodiscard]] std::string format_trace(const Trace& trace);

/// Metric with the most edge incidences; ties -> lower mean p-value, then name.
[[nodiscard]] MetricKey select_guiding_metric(const DependencyGraph& g);

struct Thresholds {
    double up = 0.0;
    double down = 0.0;
    double violation_fraction = 0.0;  ///< among calibration intervals with metric <= up
};

inline constexpr double kViolationBudget = 0.05;
inline constexpr double kDownRatio = 0.8;

/// Fraction of SLA-violating intervals among those with metric <= q (0 if none).
[[nodiscard]] double violation_fraction_below(const Trace& trace, const SlaSpec& sla, double q);

/// Largest metric level whose compliant region stays within the violation budget.
/// Searches the 50th..99th percentiles, then bisects towards the next grid point.
[[nodiscard]] Thresholds derive_thresholds(const Trace& trace, const SlaSpec& sla);

struct ScaleAction {
    std::size_t index = 0;
    int delta = 0;

    bool operator==(const ScaleAction&) const = default;
};

struct ReplayResult {
    std::vector<ScaleAction> actions;
    std::size_t violations = 0;
    std::size_t samples = 0;
    double mean_instances = 0.0;
};

struct ReplayOptions {
    int initial_instances = 1;
    /// Trace values are observed at this instance count and scale with
    /// reference / current. 0 means initial_instances; a negative value
    /// disables the capacity model.
    int reference_instances = 0;
};

[[nodiscard]] ReplayResult replay(const ScalingRule& rule, const Trace& trace, const SlaSpec& sla,
                                  const ReplayOptions& options = {});

}  // namespace sift::autoscale
