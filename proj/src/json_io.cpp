#include "sift/json_io.hpp"

#include "sift/ingest.hpp"

namespace sift {

namespace {

/// Reads `key` into `out` when present.
template <typename T>
void opt(const json& j, const char* key, T& out) {
    if (const auto it = j.find(key); it != j.end()) it->get_to(out);
}

}  // namespace

json read_json(const std::filesystem::path& path) {
    const auto text = ingest::read_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(path.string() + ": invalid JSON: " + e.what());
    }
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_json(const std::filesystem::path& path, const json& j) { ingest::write_file(path, dump_json(j)); }

void to_json(json& j, const MetricKey& k) { j = json{{"component", k.component}, {"metric", k.metric}}; }

void from_json(const json& j, MetricKey& k) {
    j.at("component").get_to(k.component);
    j.at("metric").get_to(k.metric);
}

void to_json(json& j, const DependencyEdge& e) {
    j = json{{"src_component", e.src_component}, {"src_metric", e.src_metric},
             {"dst_component", e.dst_component}, {"dst_metric", e.dst_metric},
             {"lag_ms", e.lag_ms},               {"p_value", e.p_value},
             {"q_value", e.q_value}};
}

void from_json(const json& j, DependencyEdge& e) {
    j.at("src_component").get_to(e.src_component);
    j.at("src_metric").get_to(e.src_metric);
    j.at("dst_component").get_to(e.dst_component);
    j.at("dst_metric").get_to(e.dst_metric);
    j.at("lag_ms").get_to(e.lag_ms);
    j.at("p_value").get_to(e.p_value);
    e.q_value = e.p_value;
    opt(j, "q_value", e.q_value);
}

void to_json(json& j, const DependencyGraph& g) { j = json{{"edges", g.edges}}; }

void from_json(const json& j, DependencyGraph& g) {
    j.at("edges").get_to(g.edges);
    g.sort();
}

namespace preprocess {

void to_json(json& j, const PreprocessConfig& c) {
    j = json{{"interval_ms", c.interval_ms}, {"variance_threshold", c.variance_threshold}, {"min_length", c.min_length}};
}

void from_json(const json& j, PreprocessConfig& c) {
    opt(j, "interval_ms", c.interval_ms);
    opt(j, "variance_threshold", c.variance_threshold);
    opt(j, "min_length", c.min_length);
}

void to_json(json& j, const UniformSeries& s) {
    j = json{{"component", s.component},
             {"metric", s.metric},
             {"start_ms", s.start_ms},
             {"interval_ms", s.interval_ms},
             {"values", s.values}};
}

void from_json(const json& j, UniformSeries& s) {
    j.at("component").get_to(s.component);
    j.at("metric").get_to(s.metric);
    j.at("start_ms").get_to(s.start_ms);
    j.at("interval_ms").get_to(s.interval_ms);
    j.at("values").get_to(s.values);
}

void to_json(json& j, const DroppedSeries& d) {
    j = json{{"component", d.key.component},
             {"metric", d.key.metric},
             {"reason", d.reason},
             {"scaled_variance", d.scaled_variance}};
}

void from_json(const json& j, DroppedSeries& d) {
    j.at("component").get_to(d.key.component);
    j.at("metric").get_to(d.key.metric);
    j.at("reason").get_to(d.reason);
    d.scaled_variance = 0.0;
    opt(j, "scaled_variance", d.scaled_variance);
}

void to_json(json& j, const PreparedCatalog& p) { j = json{{"series", p.series}, {"dropped", p.dropped}}; }

void from_json(const json& j, PreparedCatalog& p) {
    j.at("series").get_to(p.series);
    p.dropped.clear();
    opt(j, "dropped", p.dropped);
}

}  // namespace preprocess

namespace clustering {

void to_json(json& j, const ClusteringConfig& c) {
    j = json{{"k_min", c.k_min},
             {"k_max", c.k_max},
             {"max_iterations", c.max_iterations},
             {"seed", c.seed},
             {"name_init", c.name_init},
             {"restarts", c.restarts},
             {"validity_threshold", c.validity_threshold}};
}

void from_json(const json& j, ClusteringConfig& c) {
    opt(j, "k_min", c.k_min);
    opt(j, "k_max", c.k_max);
    opt(j, "max_iterations", c.max_iterations);
    opt(j, "seed", c.seed);
    opt(j, "name_init", c.name_init);
    opt(j, "restarts", c.restarts);
    opt(j, "validity_threshold", c.validity_threshold);
}

void to_json(json& j, const Cluster& c) {
    j = json{{"id", c.id},
             {"members", c.members},
             {"representative", c.representative},
             {"max_sbd_to_centroid", c.max_sbd_to_centroid},
             {"validity_violations", c.validity_violations},
             {"centroid", c.centroid}};
}

void from_json(const json& j, Cluster& c) {
    j.at("id").get_to(c.id);
    j.at("members").get_to(c.members);
    j.at("representative").get_to(c.representative);
    j.at("centroid").get_to(c.centroid);
    c.max_sbd_to_centroid = 0.0;
    c.validity_violations.clear();
    opt(j, "max_sbd_to_centroid", c.max_sbd_to_centroid);
    opt(j, "validity_violations", c.validity_violations);
}

void to_json(json& j, const ClusterModel& m) {
    j = json{{"component", m.component},
             {"k", m.k},
             {"silhouette", m.silhouette},
             {"converged", m.converged},
             {"clusters", m.clusters}};
}

void from_json(const json& j, ClusterModel& m) {
    j.at("component").get_to(m.component);
    j.at("k").get_to(m.k);
    j.at("silhouette").get_to(m.silhouette);
    j.at("clusters").get_to(m.clusters);
    m.converged = true;
    opt(j, "converged", m.converged);
}

}  // namespace clustering

namespace causality {

void to_json(json& j, const CausalityConfig& c) {
    j = json{{"alpha", c.alpha},
             {"max_lag_steps", c.max_lag_steps},
             {"interval_ms", c.interval_ms},
             {"adf_alpha", c.adf_alpha},
             {"fdr_control", c.fdr_control}};
}

void from_json(const json& j, CausalityConfig& c) {
    opt(j, "alpha", c.alpha);
    opt(j, "max_lag_steps", c.max_lag_steps);
    opt(j, "interval_ms", c.interval_ms);
    opt(j, "adf_alpha", c.adf_alpha);
    opt(j, "fdr_control", c.fdr_control);
}

void to_json(json& j, const StationarityReport& r) {
    j = json{{"adf_statistic", r.adf_statistic},
             {"critical_value", r.critical_value},
             {"stationary", r.stationary},
             {"differenced", r.differenced},
             {"excluded", r.excluded}};
}

void to_json(json& j, const GrangerResult& r) {
    j = json{{"f_statistic", r.f_statistic},
             {"p_value", r.p_value},
             {"raw_p_value", r.raw_p_value},
             {"lag_steps", r.lag_steps},
             {"significant", r.significant},
             {"degenerate", r.degenerate}};
}

void to_json(json& j, const TestRecord& r) {
    j = json{{"src", r.src}, {"dst", r.dst}, {"result", r.result}, {"q_value", r.q_value}, {"significant", r.significant}};
}

void to_json(json& j, const DependencyReport& r) {
    json stationarity = json::array();
    for (const auto& [key, rep] : r.stationarity) {
        json item = rep;
        item["component"] = key.component;
        item["metric"] = key.metric;
        stationarity.push_back(std::move(item));
    }
    json removed = json::array();
    for (const auto& [a, b] : r.bidirectional_removed) removed.push_back(json{{"a", a}, {"b", b}});
    j = json{{"edges", r.graph.edges.size()},
             {"tests", r.tests},
             {"stationarity", stationarity},
             {"excluded", r.excluded},
             {"bidirectional_removed", removed}};
}

}  // namespace causality

namespace rca {

void to_json(json& j, const RcaConfig& c) {
    j = json{{"similarity_threshold", c.similarity_threshold}, {"novelty_threshold", c.novelty_threshold}};
}

void from_json(const json& j, RcaConfig& c) {
    opt(j, "similarity_threshold", c.similarity_threshold);
    opt(j, "novelty_threshold", c.novelty_threshold);
}

void to_json(json& j, const NoveltyScore& n) {
    j = json{{"new", n.new_count}, {"discarded", n.discarded_count}, {"total", n.total}};
}

void from_json(const json& j, NoveltyScore& n) {
    n = make_novelty(j.at("new").get<int>(), j.at("discarded").get<int>());
}

void to_json(json& j, const EdgeEvent& e) {
    j = json{{"kind", to_string(e.kind)}, {"version", e.version}, {"edge", e.edge}};
    if (e.kind == EventKind::LagChange) j["faulty_lag_ms"] = e.other_lag_ms;
}

void from_json(const json& j, EdgeEvent& e) {
    e.kind = event_kind_from_string(j.at("kind").get<std::string>());
    j.at("version").get_to(e.version);
    j.at("edge").get_to(e.edge);
    e.other_lag_ms = 0;
    opt(j, "faulty_lag_ms", e.other_lag_ms);
}

void to_json(json& j, const ReportEntry& e) {
    j = json{{"rank", e.rank},
             {"component", e.component},
             {"novelty", e.novelty},
             {"metric_list", e.metric_list},
             {"evidence", e.evidence}};
}

void from_json(const json& j, ReportEntry& e) {
    j.at("rank").get_to(e.rank);
    j.at("component").get_to(e.component);
    j.at("novelty").get_to(e.novelty);
    j.at("metric_list").get_to(e.metric_list);
    j.at("evidence").get_to(e.evidence);
}

void to_json(json& j, const RcaReport& r) { j = json{{"ranked", r.ranked}}; }

void from_json(const json& j, RcaReport& r) { j.at("ranked").get_to(r.ranked); }

}  // namespace rca

namespace autoscale {

void to_json(json& j, const SlaSpec& s) { j = json{{"percentile", s.percentile}, {"bound_ms", s.bound_ms}}; }

void from_json(const json& j, SlaSpec& s) {
    opt(j, "percentile", s.percentile);
    opt(j, "bound_ms", s.bound_ms);
}

void to_json(json& j, const ScalingRule& r) {
    j = json{{"metric", r.metric},
             {"up_threshold", r.up_threshold},
             {"down_threshold", r.down_threshold},
             {"delta", r.delta},
             {"min_instances", r.min_instances},
             {"max_instances", r.max_instances},
             {"cooldown_intervals", r.cooldown_intervals}};
}

void from_json(const json& j, ScalingRule& r) {
    opt(j, "metric", r.metric);
    j.at("up_threshold").get_to(r.up_threshold);
    j.at("down_threshold").get_to(r.down_threshold);
    opt(j, "delta", r.delta);
    opt(j, "min_instances", r.min_instances);
    opt(j, "max_instances", r.max_instances);
    opt(j, "cooldown_intervals", r.cooldown_intervals);
}

void to_json(json& j, const Thresholds& t) {
    j = json{{"up_threshold", t.up}, {"down_threshold", t.down}, {"violation_fraction", t.violation_fraction}};
}

void to_json(json& j, const ScaleAction& a) { j = json{{"interval", a.index}, {"delta", a.delta}}; }

void to_json(json& j, const ReplayResult& r) {
    j = json{{"actions", r.actions},
             {"violations", r.violations},
             {"samples", r.samples},
             {"mean_instances", r.mean_instances}};
}

}  // namespace autoscale

namespace synth {

void to_json(json& j, const PlantedEdge& e) {
    j = json{{"src", e.src},           {"dst", e.dst},
             {"lag_steps", e.lag_steps}, {"weight", e.weight},
             {"src_latent", e.src_latent}, {"dst_latent", e.dst_latent}};
}

void from_json(const json& j, PlantedEdge& e) {
    j.at("src").get_to(e.src);
    j.at("dst").get_to(e.dst);
    opt(j, "lag_steps", e.lag_steps);
    opt(j, "weight", e.weight);
    opt(j, "src_latent", e.src_latent);
    opt(j, "dst_latent", e.dst_latent);
}

void to_json(json& j, const SynthSpec& s) {
    j = json{{"components", s.components},
             {"latents", s.latents},
             {"metrics_per_component", s.metrics_per_component},
             {"planted_edges", s.planted_edges},
             {"noise_sigma", s.noise_sigma},
             {"length", s.length},
             {"interval_ms", s.interval_ms},
             {"seed", s.seed},
             {"start_ms", s.start_ms},
             {"jitter_ms", s.jitter_ms},
             {"drop_fraction", s.drop_fraction},
             {"mislabel_fraction", s.mislabel_fraction}};
}

void from_json(const json& j, SynthSpec& s) {
    opt(j, "components", s.components);
    opt(j, "latents", s.latents);
    opt(j, "metrics_per_component", s.metrics_per_component);
    opt(j, "planted_edges", s.planted_edges);
    opt(j, "noise_sigma", s.noise_sigma);
    opt(j, "length", s.length);
    opt(j, "interval_ms", s.interval_ms);
    opt(j, "seed", s.seed);
    opt(j, "start_ms", s.start_ms);
    opt(j, "jitter_ms", s.jitter_ms);
    opt(j, "drop_fraction", s.drop_fraction);
    opt(j, "mislabel_fraction", s.mislabel_fraction);
}

void to_json(json& j, const Fault& f) {
    j = json{{"kind", to_string(f.kind)}, {"component", f.component}};
    switch (f.kind) {
        case FaultKind::AddMetric:
            j["latent"] = f.latent;
            if (!f.metric.empty()) j["metric"] = f.metric;
            break;
        case FaultKind::DropMetric: j["metric"] = f.metric; break;
        case FaultKind::ChangeLag:
            if (!f.src_component.empty()) j["src_component"] = f.src_component;
            j["lag_steps"] = f.lag_steps;
            break;
    }
}

void from_json(const json& j, Fault& f) {
    f = Fault{};
    f.kind = fault_kind_from_string(j.at("kind").get<std::string>());
    j.at("component").get_to(f.component);
    opt(j, "metric", f.metric);
    opt(j, "latent", f.latent);
    opt(j, "src_component", f.src_component);
    opt(j, "lag_steps", f.lag_steps);
}

void to_json(json& j, const GroundTruth& t) {
    json assignment = json::object();
    for (const auto& [comp, metrics] : t.assignment) {
        json m = json::object();
        for (const auto& [name, latent] : metrics) m[name] = latent;
        assignment[comp] = std::move(m);
    }
    j = json{{"spec", t.spec}, {"faults", t.faults}, {"assignment", assignment}, {"planted", t.planted}};
}

void from_json(const json& j, GroundTruth& t) {
    j.at("spec").get_to(t.spec);
    t.faults.clear();
    opt(j, "faults", t.faults);
    t.assignment.clear();
    for (const auto& [comp, metrics] : j.at("assignment").items()) {
        auto& a = t.assignment[comp];
        for (const auto& [name, latent] : metrics.items()) a[name] = latent.get<std::size_t>();
    }
    j.at("planted").get_to(t.planted);
}

}  // namespace synth

namespace evaluate {

void to_json(json& j, const Prf& p) { j = json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}}; }

}  // namespace evaluate

}  // namespace sift
