#include "sift/autoscale.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "sift/ingest.hpp"

namespace sift::autoscale {

void SlaSpec::validate() const {
    if (!(percentile > 0.0 && percentile < 1.0)) throw Error("sla: percentile must be in (0, 1)");
    if (!(bound_ms > 0.0)) throw Error("sla: bound_ms must be positive");
}

void ScalingRule::validate() const {
    if (!(down_threshold < up_threshold)) throw Error("scaling rule: down_threshold must be below up_threshold");
    if (min_instances < 1 || min_instances > max_instances) {
        throw Error("scaling rule: require 1 <= min_instances <= max_instances");
    }
    if (delta < 1) throw Error("scaling rule: delta must be >= 1");
    if (cooldown_intervals < 0) throw Error("scaling rule: cooldown_intervals must be >= 0");
}

namespace {

double parse_number(std::string_view field, const std::string& origin, std::size_t line) {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ParseError(origin, line, "bad number '" + std::string(field) + "'");
    if (!std::isfinite(v)) throw ParseError(origin, line, "non-finite value");
    return v;
}

}  // namespace

Trace parse_trace(std::string_view text, const std::string& origin) {
    std::istringstream in{std::string(text)};
    std::string row;
    std::size_t line = 0;
    bool header = false;
    Trace out;
    while (std::getline(in, row)) {
        ++line;
        if (!row.empty() && row.back() == '\r') row.pop_back();
        if (row.empty()) continue;
        if (!header) {
            if (row != "interval,metric_value,latency_p90_ms") {
                throw ParseError(origin, line, "expected header 'interval,metric_value,latency_p90_ms'");
            }
            header = true;
            continue;
        }
        std::vector<std::string_view> f;
        std::string_view rest(row);
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1)) {
            f.push_back(rest.substr(0, pos));
        }
        f.push_back(rest);
        if (f.size() != 3) throw ParseError(origin, line, "expected 3 fields");
        std::int64_t idx = 0;
        const auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), idx);
        if (ec != std::errc() || ptr != f[0].data() + f[0].size()) throw ParseError(origin, line, "bad interval");
        out.push_back({idx, parse_number(f[1], origin, line), parse_number(f[2], origin, line)});
    }
    if (!header) throw ParseError(origin, line, "missing header");
    return out;
}

Trace load_trace(const std::filesystem::path& path) { return parse_trace(ingest::read_file(path), path.string()); }

std::string format_trace(const Trace& trace) {
    std::string out = "interval,metric_value,latency_p90_ms\n";
    for (const auto& r : trace) {
        out += std::to_string(r.interval) + "," + ingest::format_double(r.metric_value) + "," +
               ingest::format_double(r.latency_ms) + "\n";
    }
    return out;
}

MetricKey select_guiding_metric(const DependencyGraph& g) {
    if (g.empty()) throw Error("select_guiding_metric: dependency graph is empty");
    struct Tally {
        std::size_t count = 0;
        double p_sum = 0.0;
    };
    std::map<MetricKey, Tally> tally;
    for (const auto& e : g.edges) {
        for (const auto& k : {e.src(), e.dst()}) {
            auto& t = tally[k];
            ++t.count;
            t.p_sum += e.p_value;
        }
    }
    const auto best = std::min_element(tally.begin(), tally.end(), [](const auto& a, const auto& b) {
        if (a.second.count != b.second.count) return a.second.count > b.second.count;
        const double pa = a.second.p_sum / static_cast<double>(a.second.count);
        const double pb = b.second.p_sum / static_cast<double>(b.second.count);
        if (pa != pb) return pa < pb;
        return a.first < b.first;
    });
    return best->first;
}

double violation_fraction_below(const Trace& trace, const SlaSpec& sla, double q) {
    std::size_t n = 0;
    std::size_t bad = 0;
    for (const auto& r : trace) {
        if (r.metric_value > q) continue;
        ++n;
        if (r.latency_ms > sla.bound_ms) ++bad;
    }
    return n == 0 ? 0.0 : static_cast<double>(bad) / static_cast<double>(n);
}

namespace {

/// Linear-interpolation quantile of sorted values.
double quantile(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

Thresholds derive_thresholds(const Trace& trace, const SlaSpec& sla) {
    sla.validate();
    if (trace.empty()) throw Error("derive_thresholds: calibration trace is empty");
    std::vector<double> values;
    values.reserve(trace.size());
    bool any_violation = false;
    bool any_compliant = false;
    for (const auto& r : trace) {
        values.push_back(r.metric_value);
        (r.latency_ms > sla.bound_ms ? any_violation : any_compliant) = true;
    }
    if (!any_violation || !any_compliant) {
        throw Error("derive_thresholds: calibration trace must contain both compliant and violating intervals");
    }
    std::sort(values.begin(), values.end());

    auto ok = [&](double q) { return violation_fraction_below(trace, sla, q) <= kViolationBudget; };
    int best = -1;
    for (int p = 99; p >= 50; --p) {
        if (ok(quantile(values, p / 100.0))) {
            best = p;
            break;
        }
    }
    if (best < 0) {
        throw Error("derive_thresholds: no metric level keeps SLA violations within 5%; "
                    "relax the SLA or calibrate with more capacity");
    }
    double lo = quantile(values, best / 100.0);
    double hi = best == 99 ? values.back() : quantile(values, (best + 1) / 100.0);
    if (ok(hi)) {
        lo = hi;
    } else {
        for (int i = 0; i < 60 && hi - lo > 1e-9 * std::max(1.0, std::abs(hi)); ++i) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? lo : hi) = mid;
        }
    }
    Thresholds t;
    t.up = lo;
    t.down = kDownRatio * lo;
    t.violation_fraction = violation_fraction_below(trace, sla, lo);
    return t;
}

ReplayResult replay(const ScalingRule& rule, const Trace& trace, const SlaSpec& sla, const ReplayOptions& options) {
    rule.validate();
    sla.validate();
    if (trace.empty()) throw Error("replay: trace is empty");
    if (options.initial_instances < rule.min_instances || options.initial_instances > rule.max_instances) {
        throw Error("replay: initial_instances outside [min_instances, max_instances]");
    }
    const int reference = options.reference_instances == 0 ? options.initial_instances : options.reference_instances;

    ReplayResult out;
    int instances = options.initial_instances;
    int cooldown = 0;
    double instance_sum = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double scale = reference > 0 ? static_cast<double>(reference) / instances : 1.0;
        const double metric = trace[i].metric_value * scale;
        const double latency = trace[i].latency_ms * scale;
        instance_sum += instances;
        ++out.samples;
        if (latency > sla.bound_ms) ++out.violations;
        if (cooldown > 0) {
            --cooldown;
            continue;
        }
        if (metric > rule.up_threshold && instances < rule.max_instances) {
            const int step = std::min(rule.delta, rule.max_instances - instances);
            instances += step;
            out.actions.push_back({i, step});
            cooldown = rule.cooldown_intervals;
        } else if (metric < rule.down_threshold && instances > rule.min_instances) {
            const int step = std::min(rule.delta, instances - rule.min_instances);
            instances -= step;
            out.actions.push_back({i, -step});
            cooldown = rule.cooldown_intervals;
        }
    }
    out.mean_instances = instance_sum / static_cast<double>(out.samples);
    return out;
}

}  // namespace sift::autoscale
