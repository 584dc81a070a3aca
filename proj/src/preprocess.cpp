#include "sift/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sift::preprocess {

void PreprocessConfig::validate() const {
    if (interval_ms <= 0) throw Error("interval_ms must be positive");
    if (!(variance_threshold >= 0.0)) throw Error("variance_threshold must be >= 0");
    if (min_length < 2) throw Error("min_length must be >= 2");
}

NaturalCubicSpline::NaturalCubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(x.size(), 0.0) {
    const std::size_t n = x_.size();
    if (n != y_.size()) throw Error("spline: knot and value counts differ");
    if (n < 2) throw Error("spline: need at least 2 knots");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1])) throw Error("spline: knots must be strictly increasing");
    }
    if (n == 2) return;

    // Tridiagonal system for interior second derivatives, m_0 = m_{n-1} = 0.
    const std::size_t k = n - 2;
    std::vector<double> diag(k), upper(k), rhs(k);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        diag[i - 1] = 2.0 * (h0 + h1);
        upper[i - 1] = h1;
        rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    // Thomas algorithm; the lower diagonal at row r equals upper[r-1] (= h_r).
    for (std::size_t r = 1; r < k; ++r) {
        const double w = upper[r - 1] / diag[r - 1];
        diag[r] -= w * upper[r - 1];
        rhs[r] -= w * rhs[r - 1];
    }
    m_[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t r = k - 1; r-- > 0;) {
        m_[r + 1] = (rhs[r] - upper[r] * m_[r + 2]) / diag[r];
    }
}

double NaturalCubicSpline::operator()(double t) const {
    if (t < x_.front() || t > x_.back()) throw Error("spline: evaluation outside knot range");
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = it == x_.end() ? x_.size() - 2 : static_cast<std::size_t>(it - x_.begin()) - 1;
    i = std::min(i, x_.size() - 2);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h;
    const double b = (t - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

UniformSeries resample(const ingest::MetricSeries& series, const PreprocessConfig& cfg) {
    cfg.validate();
    const auto& s = series.samples;
    if (s.size() < 4) {
        throw Error("resample " + series.key().str() + ": need at least 4 samples, have " + std::to_string(s.size()));
    }
    const std::int64_t first = s.front().timestamp_ms;
    const std::int64_t last = s.back().timestamp_ms;
    const std::int64_t step = cfg.interval_ms;

    // Grid anchored on multiples of the interval; points before the first sample are trimmed.
    std::int64_t grid_start = floor_div(first, step) * step;
    if (grid_start < first) grid_start += step;
    const std::int64_t grid_end = floor_div(last, step) * step;
    const std::int64_t count = grid_end >= grid_start ? (grid_end - grid_start) / step + 1 : 0;
    if (count < static_cast<std::int64_t>(cfg.min_length)) {
        throw Error("resample " + series.key().str() + ": span covers " + std::to_string(count) +
                    " grid points, need " + std::to_string(cfg.min_length));
    }

    std::vector<double> x(s.size()), y(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        x[i] = static_cast<double>(s[i].timestamp_ms - first);
        y[i] = s[i].value;
    }
    const NaturalCubicSpline spline(x, y);

    UniformSeries out{series.component, series.metric, grid_start, step, {}};
    out.values.resize(static_cast<std::size_t>(count));
    std::size_t cursor = 0;
    for (std::int64_t g = 0; g < count; ++g) {
        const std::int64_t t = grid_start + g * step;
        while (cursor < s.size() && s[cursor].timestamp_ms < t) ++cursor;
        // Exact knot hits reproduce the raw value bit for bit.
        if (cursor < s.size() && s[cursor].timestamp_ms == t) {
            out.values[static_cast<std::size_t>(g)] = s[cursor].value;
        } else {
            out.values[static_cast<std::size_t>(g)] = spline(static_cast<double>(t - first));
        }
    }
    return out;
}

double scaled_variance(std::span<const double> values) {
    if (values.empty()) return 0.0;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    if (range <= 0.0) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += (v - lo) / range;
    mean /= static_cast<double>(values.size());
    double acc = 0.0;
    for (double v : values) {
        const double d = (v - lo) / range - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(values.size());
}

VarianceFilterResult filter_low_variance(std::vector<UniformSeries> series, const PreprocessConfig& cfg) {
    cfg.validate();
    VarianceFilterResult out;
    for (auto& u : series) {
        const auto [lo, hi] = std::minmax_element(u.values.begin(), u.values.end());
        if (u.values.empty() || *lo == *hi) {
            out.dropped.push_back({u.key(), "constant", 0.0});
            continue;
        }
        const double var = scaled_variance(u.values);
        if (var <= cfg.variance_threshold) {
            out.dropped.push_back({u.key(), "low_variance", var});
        } else {
            out.kept.push_back(std::move(u));
        }
    }
    return out;
}

std::vector<double> znormalize(std::span<const double> values) {
    const auto n = static_cast<double>(values.size());
    if (values.empty()) throw DegenerateSeriesError("znormalize: empty series");
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double acc = 0.0;
    for (double v : values) acc += (v - mean) * (v - mean);
    const double sigma = std::sqrt(acc / n);
    if (!(sigma > 0.0)) throw DegenerateSeriesError("znormalize: series has zero standard deviation");
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / sigma;
    return out;
}

UniformSeries znormalize(const UniformSeries& u) {
    UniformSeries out = u;
    try {
        out.values = znormalize(std::span<const double>(u.values));
    } catch (const DegenerateSeriesError&) {
        throw DegenerateSeriesError("znormalize " + u.key().str() + ": series has zero standard deviation");
    }
    return out;
}

std::vector<UniformSeries> align(std::vector<UniformSeries> series, std::size_t min_length) {
    if (series.empty()) return series;
    const std::int64_t step = series.front().interval_ms;
    std::int64_t start = series.front().start_ms;
    std::int64_t end = series.front().end_ms();
    for (const auto& u : series) {
        if (u.interval_ms != step) throw Error("align: series use different intervals");
        if ((u.start_ms - series.front().start_ms) % step != 0) throw Error("align: series are on shifted grids");
        start = std::max(start, u.start_ms);
        end = std::min(end, u.end_ms());
    }
    const std::int64_t count = end >= start ? (end - start) / step + 1 : 0;
    if (count < static_cast<std::int64_t>(min_length)) {
        throw Error("align: common window has " + std::to_string(count) + " points, need " +
                    std::to_string(min_length));
    }
    for (auto& u : series) {
        const auto offset = static_cast<std::size_t>((start - u.start_ms) / step);
        std::vector<double> cropped(u.values.begin() + static_cast<std::ptrdiff_t>(offset),
                                    u.values.begin() + static_cast<std::ptrdiff_t>(offset + count));
        u.values = std::move(cropped);
        u.start_ms = start;
    }
    return series;
}

const UniformSeries* PreparedCatalog::find(const MetricKey& key) const {
    const auto it = std::lower_bound(series.begin(), series.end(), key,
                                     [](const UniformSeries& s, const MetricKey& k) { return s.key() < k; });
    if (it == series.end() || it->key() != key) return nullptr;
    return &*it;
}

std::map<std::string, std::set<std::string>> PreparedCatalog::all_metric_names() const {
    std::map<std::string, std::set<std::string>> out;
    for (const auto& s : series) out[s.component].insert(s.metric);
    for (const auto& d : dropped) out[d.key.component].insert(d.key.metric);
    return out;
}

std::map<std::string, std::vector<const UniformSeries*>> PreparedCatalog::by_component() const {
    std::map<std::string, std::vector<const UniformSeries*>> out;
    for (const auto& s : series) out[s.component].push_back(&s);
    return out;
}

PreparedCatalog prepare(const ingest::MetricCatalog& catalog, const PreprocessConfig& cfg) {
    cfg.validate();
    PreparedCatalog out;
    std::vector<UniformSeries> resampled;
    resampled.reserve(catalog.size());
    for (const auto& s : catalog.series()) {
        try {
            resampled.push_back(resample(s, cfg));
        } catch (const Error&) {
            out.dropped.push_back({s.key(), "too_short", 0.0});
        }
    }
    auto filtered = filter_low_variance(std::move(resampled), cfg);
    out.series = align(std::move(filtered.kept), cfg.min_length);
    out.dropped.insert(out.dropped.end(), filtered.dropped.begin(), filtered.dropped.end());
    std::sort(out.series.begin(), out.series.end(),
              [](const UniformSeries& a, const UniformSeries& b) { return a.key() < b.key(); });
    std::sort(out.dropped.begin(), out.dropped.end(),
              [](const DroppedSeries& a, const DroppedSeries& b) { return a.key < b.key; });
    return out;
}

}  // namespace sift::preprocess
