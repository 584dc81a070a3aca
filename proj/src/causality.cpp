#include "sift/causality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "sift/parallel.hpp"
#include "sift/stats.hpp"

namespace sift::causality {

void CausalityConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("causality: alpha must be in (0, 1)");
    if (!(adf_alpha > 0.0 && adf_alpha < 1.0)) throw Error("causality: adf_alpha must be in (0, 1)");
    if (max_lag_steps < 1) throw Error("causality: max_lag_steps must be >= 1");
    if (interval_ms <= 0) throw Error("causality: interval_ms must be positive");
}

StationarityReport adf_is_stationary(std::span<const double> values, double alpha) {
    const auto res = stats::adf(values, alpha);
    StationarityReport r;
    r.adf_statistic = res.statistic;
    r.critical_value = res.critical_value;
    r.stationary = res.statistic < res.critical_value;
    return r;
}

StationarySeries prepare_stationary(std::span<const double> values, double alpha) {
    if (values.size() < 21) throw Error("prepare_stationary: need at least 21 values");
    StationarySeries out;
    out.report = adf_is_stationary(values, alpha);
    if (out.report.stationary) {
        out.values.assign(values.begin(), values.end());
        return out;
    }
    out.values.resize(values.size() - 1);
    for (std::size_t t = 1; t < values.size(); ++t) out.values[t - 1] = values[t] - values[t - 1];
    const auto again = adf_is_stationary(out.values, alpha);
    out.report.adf_statistic = again.adf_statistic;
    out.report.critical_value = again.critical_value;
    out.report.stationary = again.stationary;
    out.report.differenced = true;
    out.report.excluded = !again.stationary;
    return out;
}

LagTest granger_at_lag(std::span<const double> x, std::span<const double> y, std::size_t lag) {
    if (x.size() != y.size()) throw Error("granger: series lengths differ");
    if (lag < 1) throw Error("granger: lag must be >= 1");
    const std::size_t n = y.size();
    if (n <= 3 * lag + 1) throw Error("granger: series too short for lag " + std::to_string(lag));

    const std::size_t rows = n - lag;
    const auto r = static_cast<Eigen::Index>(rows);
    const auto l = static_cast<Eigen::Index>(lag);
    Eigen::MatrixXd xr(r, 1 + l);
    Eigen::MatrixXd xu(r, 1 + 2 * l);
    Eigen::VectorXd target(r);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t t = i + lag;
        const auto ri = static_cast<Eigen::Index>(i);
        target(ri) = y[t];
        xr(ri, 0) = xu(ri, 0) = 1.0;
        for (std::size_t k = 1; k <= lag; ++k) {
            const auto c = static_cast<Eigen::Index>(k);
            xr(ri, c) = xu(ri, c) = y[t - k];
            xu(ri, l + c) = x[t - k];
        }
    }

    LagTest out;
    out.df_num = lag;
    out.df_den = rows - 2 * lag - 1;
    const auto restricted = stats::ols(xr, target);
    const auto unrestricted = stats::ols(xu, target);
    out.rss_restricted = restricted.rss;
    out.rss_unrestricted = unrestricted.rss;
    if (!unrestricted.full_rank) {
        out.degenerate = true;
        return out;
    }
    const double gain = std::max(0.0, restricted.rss - unrestricted.rss);
    if (unrestricted.rss <= 0.0) {
        out.f_statistic = gain > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
        out.f_statistic = (gain / static_cast<double>(out.df_num)) /
                          (unrestricted.rss / static_cast<double>(out.df_den));
    }
    out.p_value = stats::f_sf(out.f_statistic, static_cast<double>(out.df_num), static_cast<double>(out.df_den));
    return out;
}

GrangerResult granger(std::span<const double> x, std::span<const double> y, const CausalityConfig& cfg) {
    cfg.validate();
    if (x.size() != y.size()) throw Error("granger: series lengths differ");
    if (y.size() < 10 * cfg.max_lag_steps) {
        throw Error("granger: need at least " + std::to_string(10 * cfg.max_lag_steps) + " values");
    }
    GrangerResult best;
    bool have = false;
    for (std::size_t lag = 1; lag <= cfg.max_lag_steps; ++lag) {
        const auto t = granger_at_lag(x, y, lag);
        if (t.degenerate) {
            GrangerResult d;
            d.degenerate = true;
            d.lag_steps = lag;
            return d;
        }
        if (!have || t.p_value < best.raw_p_value) {
            best.f_statistic = t.f_statistic;
            best.raw_p_value = t.p_value;
            best.lag_steps = lag;
            have = true;
        }
    }
    best.p_value = std::min(1.0, best.raw_p_value * static_cast<double>(cfg.max_lag_steps));
    best.significant = best.p_value < cfg.alpha;
    return best;
}

DependencyReport build_dependency_graph(std::span<const clustering::ClusterModel> models,
                                        const ingest::CallGraph& callgraph,
                                        const preprocess::PreparedCatalog& prepared, const CausalityConfig& cfg,
                                        unsigned threads) {
    cfg.validate();
    std::map<std::string, const clustering::ClusterModel*> by_component;
    for (const auto& m : models) by_component[m.component] = &m;
    for (const auto& node : callgraph.nodes) {
        if (!by_component.contains(node)) throw Error("no cluster model for call-graph component " + node);
    }

    // Representatives of every call-graph component, made stationary once.
    std::vector<MetricKey> reps;
    for (const auto& node : callgraph.nodes) {
        for (const auto& r : by_component.at(node)->representatives()) reps.push_back({node, r});
    }
    std::vector<StationarySeries> stationary(reps.size());
    parallel_for(reps.size(), threads, [&](std::size_t i) {
        const auto* s = prepared.find(reps[i]);
        if (s == nullptr) throw Error("no prepared series for representative " + reps[i].str());
        stationary[i] = prepare_stationary(s->values, cfg.adf_alpha);
    });

    DependencyReport report;
    std::map<MetricKey, std::size_t> index;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        index[reps[i]] = i;
        report.stationarity[reps[i]] = stationary[i].report;
        if (stationary[i].report.excluded) report.excluded.push_back(reps[i]);
    }

    struct Task {
        std::size_t src;
        std::size_t dst;
    };
    std::vector<Task> tasks;
    for (const auto& [a, b] : callgraph.undirected_pairs()) {
        for (const auto& ra : by_component.at(a)->representatives()) {
            for (const auto& rb : by_component.at(b)->representatives()) {
                const auto ia = index.at({a, ra});
                const auto ib = index.at({b, rb});
                if (stationary[ia].report.excluded || stationary[ib].report.excluded) continue;
                tasks.push_back({ia, ib});
                tasks.push_back({ib, ia});
            }
        }
    }

    report.tests.resize(tasks.size());
    parallel_for(tasks.size(), threads, [&](std::size_t i) {
        const auto& xs = stationary[tasks[i].src].values;
        const auto& ys = stationary[tasks[i].dst].values;
        // Both end on the same grid point; a differenced series starts one step later.
        const std::size_t len = std::min(xs.size(), ys.size());
        const std::span<const double> x(xs.data() + (xs.size() - len), len);
        const std::span<const double> y(ys.data() + (ys.size() - len), len);
        auto& rec = report.tests[i];
        rec.src = reps[tasks[i].src];
        rec.dst = reps[tasks[i].dst];
        rec.result = granger(x, y, cfg);
    });

    std::vector<double> p(report.tests.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = report.tests[i].result.p_value;
    const auto q = cfg.fdr_control ? stats::benjamini_hochberg(p) : p;

    std::set<std::pair<MetricKey, MetricKey>> significant;
    for (std::size_t i = 0; i < report.tests.size(); ++i) {
        auto& rec = report.tests[i];
        rec.q_value = q[i];
        rec.significant = !rec.result.degenerate && q[i] < cfg.alpha;
        if (rec.significant) significant.insert({rec.src, rec.dst});
    }

    for (const auto& rec : report.tests) {
        if (!rec.significant) continue;
        if (significant.contains({rec.dst, rec.src})) {
            if (rec.src < rec.dst) report.bidirectional_removed.emplace_back(rec.src, rec.dst);
            continue;
        }
        DependencyEdge e;
        e.src_component = rec.src.component;
        e.src_metric = rec.src.metric;
        e.dst_component = rec.dst.component;
        e.dst_metric = rec.dst.metric;
        e.lag_ms = static_cast<std::int64_t>(rec.result.lag_steps) * cfg.interval_ms;
        e.p_value = rec.result.p_value;
        e.q_value = rec.q_value;
        report.graph.edges.push_back(std::move(e));
    }
    report.graph.sort();
    std::sort(report.bidirectional_removed.begin(), report.bidirectional_removed.end());
    return report;
}

}  // namespace sift::causality
