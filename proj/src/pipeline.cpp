#include "sift/pipeline.hpp"

#include "sift/evaluate.hpp"
#include "sift/ingest.hpp"

namespace sift::pipeline {

void PipelineConfig::validate() const {
    preprocess.validate();
    clustering.validate();
    causality.validate();
    rca.validate();
    if (threads < 1) throw Error("config: threads must be >= 1");
}

void to_json(json& j, const PipelineConfig& c) {
    j = json{{"metrics", c.metrics.string()},
             {"callgraph", c.callgraph.string()},
             {"output_dir", c.output_dir.string()},
             {"threads", c.threads},
             {"preprocess", c.preprocess},
             {"clustering", c.clustering},
             {"causality", c.causality},
             {"rca", c.rca}};
}

void from_json(const json& j, PipelineConfig& c) {
    if (!j.is_object()) throw Error("config: expected a JSON object");
    if (j.contains("metrics")) c.metrics = j.at("metrics").get<std::string>();
    if (j.contains("callgraph")) c.callgraph = j.at("callgraph").get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("threads")) j.at("threads").get_to(c.threads);
    if (j.contains("preprocess")) j.at("preprocess").get_to(c.preprocess);
    if (j.contains("clustering")) j.at("clustering").get_to(c.clustering);
    if (j.contains("causality")) j.at("causality").get_to(c.causality);
    if (j.contains("rca")) j.at("rca").get_to(c.rca);
}

PipelineConfig load_config(const std::filesystem::path& path) {
    PipelineConfig c;
    try {
        read_json(path).get_to(c);
    } catch (const json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
    const auto base = path.parent_path();
    for (auto* p : {&c.metrics, &c.callgraph, &c.output_dir}) {
        if (!p->empty() && p->is_relative()) *p = base / *p;
    }
    return c;
}

namespace {

template <typename F>
auto stage(const char* name, F&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

}  // namespace

RunResult analyze(const ingest::MetricCatalog& catalog, const ingest::CallGraph& callgraph,
                  const PipelineConfig& cfg) {
    stage("config", [&] {
        cfg.validate();
        return 0;
    });
    RunResult out;
    out.prepared = stage("preprocess", [&] { return preprocess::prepare(catalog, cfg.preprocess); });
    out.models = stage("cluster", [&] { return clustering::cluster_catalog(out.prepared, cfg.clustering, cfg.threads); });
    out.dependencies = stage("causality", [&] {
        auto causal = cfg.causality;
        causal.interval_ms = cfg.preprocess.interval_ms;
        return causality::build_dependency_graph(out.models, callgraph, out.prepared, causal, cfg.threads);
    });

    std::size_t reps = 0;
    json components = json::array();
    for (const auto& m : out.models) {
        reps += m.clusters.size();
        std::size_t violations = 0;
        for (const auto& c : m.clusters) violations += c.validity_violations.size();
        components.push_back(json{{"component", m.component},
                                  {"k", m.k},
                                  {"silhouette", m.silhouette},
                                  {"converged", m.converged},
                                  {"validity_violations", violations}});
    }
    std::size_t significant = 0;
    std::size_t degenerate = 0;
    for (const auto& t : out.dependencies.tests) {
        significant += t.significant ? 1 : 0;
        degenerate += t.result.degenerate ? 1 : 0;
    }
    const auto& deps = out.dependencies;
    json config = cfg;
    config.erase("output_dir");  // reruns into another directory stay byte-identical
    out.report = json{
        {"inputs", json{{"series", catalog.size()}, {"components", catalog.components().size()}}},
        {"preprocess", json{{"kept", out.prepared.series.size()}, {"dropped", out.prepared.dropped.size()}}},
        {"clustering",
         json{{"representatives", reps},
              {"reduction_ratio", reps == 0 ? 0.0 : evaluate::reduction_ratio(out.prepared.series.size(), reps)},
              {"components", components}}},
        {"causality", json{{"tests", deps.tests.size()},
                           {"significant", significant},
                           {"degenerate", degenerate},
                           {"excluded", deps.excluded},
                           {"bidirectional_removed", deps.bidirectional_removed.size()},
                           {"edges", deps.graph.edges.size()}}},
        {"config", config}};
    return out;
}

RunResult run_pipeline(const PipelineConfig& cfg) {
    const auto catalog = stage("ingest", [&] {
        if (cfg.metrics.empty()) throw Error("no metrics file configured");
        return ingest::load_metrics(cfg.metrics);
    });
    const auto callgraph = stage("ingest", [&] {
        if (cfg.callgraph.empty()) throw Error("no call graph file configured");
        return ingest::load_call_graph_any(cfg.callgraph);
    });
    auto out = analyze(catalog, callgraph, cfg);
    stage("output", [&] {
        write_json(cfg.output_dir / "prepared.json", out.prepared);
        write_json(cfg.output_dir / "clusters.json", out.models);
        write_json(cfg.output_dir / "depgraph.json", out.dependencies.graph);
        write_json(cfg.output_dir / "report.json", out.report);
        return 0;
    });
    return out;
}

}  // namespace sift::pipeline
