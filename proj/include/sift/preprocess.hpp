#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sift/common.hpp"
#include "sift/ingest.hpp"

namespace sift::preprocess {

/// A metric on an equidistant grid: values[i] is observed at start_ms + i * interval_ms.
struct UniformSeries {
    std::string component;
    std::string metric;
    std::int64_t start_ms = 0;
    std::int64_t interval_ms = 500;
    std::vector<double> values;

    [[nodiscard]] MetricKey key() const { return {component, metric}; }
    [[nodiscard]] std::int64_t end_ms() const {
        return start_ms + static_cast<std::int64_t>(values.size() - 1) * interval_ms;
    }
    bool operator==(const UniformSeries&) const = default;
};

struct PreprocessConfig {
    std::int64_t interval_ms = 500;
    double variance_threshold = 0.002;
    std::size_t min_length = 8;

    void validate() const;
};

/// Natural cubic spline (zero second derivative at both ends) through
/// strictly increasing knots.
class NaturalCubicSpline {
public:
    NaturalCubicSpline(std::span<const double> x, std::span<const double> y);

    /// Evaluates inside [x.front(), x.back()]; throws outside.
    [[nodiscard]] double operator()(double t) const;

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;  ///< second derivatives at the knots
};

/// Resamples raw samples onto the interval grid covering the observed span.
/// Requires >= 4 samples and a span of at least min_length grid points.
[[nodiscard]] UniformSeries resample(const ingest::MetricSeries& series, const PreprocessConfig& cfg);

struct DroppedSeries {
    MetricKey key;
    std::string reason;     ///< "constant" or "low_variance"
    double scaled_variance; ///< population variance after min-max scaling
};

struct VarianceFilterResult {
    std::vector<UniformSeries> kept;
    std::vector<DroppedSeries> dropped;
};

/// Population variance of the min-max-scaled values; 0 for constant input.
[[nodiscard]] double scaled_variance(std::span<const double> values);

/// Partitions series by scaled variance. Kept series keep their original values.
[[nodiscard]] VarianceFilterResult filter_low_variance(std::vector<UniformSeries> series,
                                                       const PreprocessConfig& cfg);

/// (x - mean) / sigma with population sigma. Throws DegenerateSeriesError when sigma == 0.
[[nodiscard]] std::vector<double> znormalize(std::span<const double> values);
[[nodiscard]] UniformSeries znormalize(const UniformSeries& u);

/// Crops every series to the common time window so all share start and length.
/// Throws when the window is shorter than min_length.
[[nodiscard]] std::vector<UniformSeries> align(std::vector<UniformSeries> series, std::size_t min_length);

/// Output of the preprocess stage.
struct PreparedCatalog {
    std::vector<UniformSeries> series;  ///< kept, aligned, sorted by key
    std::vector<DroppedSeries> dropped; ///< low-variance and unresamplable series

    [[nodiscard]] const UniformSeries* find(const MetricKey& key) const;
    /// Every metric seen in the raw catalog, kept or dropped.
    [[nodiscard]] std::map<std::string, std::set<std::string>> all_metric_names() const;
    /// Kept series grouped by component.
    [[nodiscard]] std::map<std::string, std::vector<const UniformSeries*>> by_component() const;
};

/// resample -> filter_low_variance -> align. Series too short to resample are
/// dropped with reason "too_short".
[[nodiscard]] PreparedCatalog prepare(const ingest::MetricCatalog& catalog, const PreprocessConfig& cfg);

}  // namespace sift::preprocess
