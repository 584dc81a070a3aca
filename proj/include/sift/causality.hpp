#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "sift/clustering.hpp"
#include "sift/depgraph.hpp"
#include "sift/ingest.hpp"
#include "sift/preprocess.hpp"

namespace sift::causality {

struct CausalityConfig {
    double alpha = 0.05;            ///< significance level of the Granger F-test
    std::size_t max_lag_steps = 3;  ///< lags 1..max_lag_steps are searched
    std::int64_t interval_ms = 500;
    double adf_alpha = 0.01;        ///< level of the unit-root decision
    bool fdr_control = true;        ///< Benjamini-Hochberg across all tests of one graph

    void validate() const;
};

struct StationarityReport {
    double adf_statistic = 0.0;
    double critical_value = 0.0;
    bool stationary = false;
    bool differenced = false;
    bool excluded = false;  ///< still non-stationary after one difference
};

/// ADF with a constant and floor((n-1)^(1/3)) lags. Requires n >= 20.
[[nodiscard]] StationarityReport adf_is_stationary(std::span<const double> values, double alpha);

struct StationarySeries {
    std::vector<double> values;  ///< possibly first-differenced (length n - 1)
    StationarityReport report;
};

/// Differences once if needed; flags the series as excluded when that is not enough.
[[nodiscard]] StationarySeries prepare_stationary(std::span<const double> values, double alpha);

/// One F-test at a fixed lag.
struct LagTest {
    double f_statistic = 0.0;
    double p_value = 1.0;
    double rss_restricted = 0.0;
    double rss_unrestricted = 0.0;
    std::size_t df_num = 0;
    std::size_t df_den = 0;
    bool degenerate = false;  ///< unrestricted design is rank deficient
};

/// Restricted y_t ~ 1 + y_{t-1..t-L}; unrestricted adds x_{t-1..t-L}.
/// F = ((RSS_r - RSS_u) / L) / (RSS_u / (T - 2L - 1)), T = n - L.
[[nodiscard]] LagTest granger_at_lag(std::span<const double> x, std::span<const double> y, std::size_t lag);

struct GrangerResult {
    double f_statistic = 0.0;  ///< at the chosen lag
    double p_value = 1.0;      ///< Bonferroni-adjusted over the lags searched
    double raw_p_value = 1.0;  ///< unadjusted p at the chosen lag
    std::size_t lag_steps = 1;
    bool significant = false;
    bool degenerate = false;
};

/// Does x Granger-cause y? Searches lags 1..max_lag_steps and keeps the
/// smallest p (ties -> smaller lag). Degenerate designs are never significant.
[[nodiscard]] GrangerResult granger(std::span<const double> x, std::span<const double> y, const CausalityConfig& cfg);

struct TestRecord {
    MetricKey src;
    MetricKey dst;
    GrangerResult result;
    double q_value = 1.0;
    bool significant = false;
};

struct DependencyReport {
    DependencyGraph graph;
    std::vector<TestRecord> tests;
    std::map<MetricKey, StationarityReport> stationarity;
    std::vector<MetricKey> excluded;
    std::vector<std::pair<MetricKey, MetricKey>> bidirectional_removed;
};

/// Tests every representative pair of call-graph-adjacent components in both
/// directions, keeps significant directions, and drops pairs that are
/// significant both ways. Throws when a call-graph component has no model.
[[nodiscard]] DependencyReport build_dependency_graph(std::span<const clustering::ClusterModel> models,
                                                      const ingest::CallGraph& callgraph,
                                                      const preprocess::PreparedCatalog& prepared,
                                                      const CausalityConfig& cfg, unsigned threads = 1);

}  // namespace sift::causality
