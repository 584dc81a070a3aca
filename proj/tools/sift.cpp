// sift command-line front end.

#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "sift/autoscale.hpp"
#include "sift/evaluate.hpp"
#include "sift/ingest.hpp"
#include "sift/json_io.hpp"
#include "sift/pipeline.hpp"
#include "sift/rca.hpp"
#include "sift/synth.hpp"

namespace fs = std::filesystem;
using namespace sift;

namespace {

/// Flags shared by every subcommand; unset flags leave the config untouched.
struct Overrides {
    std::string config;
    std::optional<std::int64_t> interval_ms;
    std::optional<double> variance_threshold;
    std::optional<double> alpha;
    std::optional<double> similarity_threshold;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "Pipeline config JSON");
        app->add_option("--interval-ms", interval_ms, "Resampling interval (ms)");
        app->add_option("--variance-threshold", variance_threshold, "Low-variance filter threshold");
        app->add_option("--alpha", alpha, "Granger significance level");
        app->add_option("--similarity-threshold", similarity_threshold, "RCA cluster similarity threshold");
        app->add_option("--seed", seed, "Random seed");
        app->add_option("--threads", threads, "Worker threads");
    }

    [[nodiscard]] pipeline::PipelineConfig resolve() const {
        pipeline::PipelineConfig c = config.empty() ? pipeline::PipelineConfig{} : pipeline::load_config(config);
        if (interval_ms) c.preprocess.interval_ms = c.causality.interval_ms = *interval_ms;
        if (variance_threshold) c.preprocess.variance_threshold = *variance_threshold;
        if (alpha) c.causality.alpha = *alpha;
        if (similarity_threshold) c.rca.similarity_threshold = *similarity_threshold;
        if (seed) c.clustering.seed = *seed;
        if (threads) c.threads = *threads;
        c.validate();
        return c;
    }
};

void emit(const json& j, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << dump_json(j);
    } else {
        write_json(out, j);
    }
}

template <typename T>
T load_as(const fs::path& path) {
    try {
        return read_json(path).get<T>();
    } catch (const json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sift: metric reduction, dependency inference, root-cause diffing and autoscaling rules"};
    app.require_subcommand(1);

    // preprocess
    auto* pre = app.add_subcommand("preprocess", "Resample, filter and align a metrics CSV");
    Overrides pre_o;
    std::string pre_metrics, pre_out;
    pre_o.attach(pre);
    pre->add_option("--metrics", pre_metrics, "Metrics CSV")->required();
    pre->add_option("--out", pre_out, "Output prepared.json ('-' for stdout)");
    pre->callback([&] {
        const auto cfg = pre_o.resolve();
        emit(preprocess::prepare(ingest::load_metrics(pre_metrics), cfg.preprocess), pre_out);
    });

    // cluster
    auto* clu = app.add_subcommand("cluster", "Cluster prepared series per component");
    Overrides clu_o;
    std::string clu_prepared, clu_out;
    clu_o.attach(clu);
    clu->add_option("--prepared", clu_prepared, "prepared.json")->required();
    clu->add_option("--out", clu_out, "Output clusters.json ('-' for stdout)");
    clu->callback([&] {
        const auto cfg = clu_o.resolve();
        const auto prepared = load_as<preprocess::PreparedCatalog>(clu_prepared);
        emit(clustering::cluster_catalog(prepared, cfg.clustering, cfg.threads), clu_out);
    });

    // deps
    auto* dep = app.add_subcommand("deps", "Infer the metric dependency graph");
    Overrides dep_o;
    std::string dep_prepared, dep_clusters, dep_callgraph, dep_out, dep_diag;
    dep_o.attach(dep);
    dep->add_option("--prepared", dep_prepared, "prepared.json")->required();
    dep->add_option("--clusters", dep_clusters, "clusters.json")->required();
    dep->add_option("--callgraph", dep_callgraph, "Events or callgraph CSV")->required();
    dep->add_option("--out", dep_out, "Output depgraph.json ('-' for stdout)");
    dep->add_option("--diagnostics", dep_diag, "Write per-test diagnostics JSON");
    dep->callback([&] {
        const auto cfg = dep_o.resolve();
        const auto prepared = load_as<preprocess::PreparedCatalog>(dep_prepared);
        const auto models = load_as<std::vector<clustering::ClusterModel>>(dep_clusters);
        const auto graph = ingest::load_call_graph_any(dep_callgraph);
        const auto report = causality::build_dependency_graph(models, graph, prepared, cfg.causality, cfg.threads);
        if (!dep_diag.empty()) write_json(dep_diag, report);
        emit(report.graph, dep_out);
    });

    // rca
    auto* rc = app.add_subcommand("rca", "Rank root-cause candidates between two versions");
    Overrides rc_o;
    std::string rc_correct, rc_faulty, rc_out, rc_format = "json";
    rc_o.attach(rc);
    rc->add_option("--correct", rc_correct, "Run directory of the correct version")->required();
    rc->add_option("--faulty", rc_faulty, "Run directory of the faulty version")->required();
    rc->add_option("--out", rc_out, "Output report ('-' for stdout)");
    rc->add_option("--format", rc_format, "json or table")->check(CLI::IsMember({"json", "table"}));
    rc->callback([&] {
        const auto cfg = rc_o.resolve();
        const auto report = rca::rca_report(rca::load_snapshot(rc_correct, "C"), rca::load_snapshot(rc_faulty, "F"),
                                            cfg.rca);
        if (rc_format == "table") {
            const auto text = rca::format_table(report);
            if (rc_out.empty() || rc_out == "-") {
                std::cout << text;
            } else {
                ingest::write_file(rc_out, text);
            }
        } else {
            emit(report, rc_out);
        }
    });

    // autoscale
    auto* as = app.add_subcommand("autoscale", "Derive or replay threshold scaling rules");
    as->require_subcommand(1);
    autoscale::SlaSpec sla;
    as->add_option("--percentile", sla.percentile, "SLA latency percentile");
    as->add_option("--bound-ms", sla.bound_ms, "SLA latency bound (ms)");

    auto* der = as->add_subcommand("derive", "Derive up/down thresholds from a calibration trace");
    std::string der_trace, der_depgraph, der_metric, der_out;
    autoscale::ScalingRule der_rule;
    der->add_option("--trace", der_trace, "Calibration trace CSV")->required();
    der->add_option("--depgraph", der_depgraph, "depgraph.json used to pick the guiding metric");
    der->add_option("--metric", der_metric, "Guiding metric name (overrides --depgraph)");
    der->add_option("--min-instances", der_rule.min_instances);
    der->add_option("--max-instances", der_rule.max_instances);
    der->add_option("--cooldown", der_rule.cooldown_intervals, "Cooldown in intervals");
    der->add_option("--out", der_out, "Output rule JSON ('-' for stdout)");
    der->callback([&] {
        auto rule = der_rule;
        if (!der_metric.empty()) {
            rule.metric = der_metric;
        } else if (!der_depgraph.empty()) {
            rule.metric = autoscale::select_guiding_metric(load_as<DependencyGraph>(der_depgraph)).str();
        }
        const auto t = autoscale::derive_thresholds(autoscale::load_trace(der_trace), sla);
        rule.up_threshold = t.up;
        rule.down_threshold = t.down;
        rule.validate();
        json j = rule;
        j["calibration_violation_fraction"] = t.violation_fraction;
        emit(j, der_out);
    });

    auto* rep = as->add_subcommand("replay", "Replay a rule over a trace");
    std::string rep_rule, rep_trace, rep_out;
    autoscale::ReplayOptions rep_opts;
    rep->add_option("--rule", rep_rule, "Rule JSON")->required();
    rep->add_option("--trace", rep_trace, "Trace CSV")->required();
    rep->add_option("--initial", rep_opts.initial_instances, "Initial instance count");
    rep->add_option("--reference", rep_opts.reference_instances,
                    "Instances the trace was recorded at (0: initial, negative: no capacity model)");
    rep->add_option("--out", rep_out, "Output report JSON ('-' for stdout)");
    rep->callback([&] {
        const auto rule = load_as<autoscale::ScalingRule>(rep_rule);
        emit(autoscale::replay(rule, autoscale::load_trace(rep_trace), sla, rep_opts), rep_out);
    });

    // synth
    auto* sy = app.add_subcommand("synth", "Synthetic datasets with known structure");
    sy->require_subcommand(1);
    auto* gen = sy->add_subcommand("generate", "Generate a dataset");
    std::string gen_spec, gen_out;
    synth::SynthSpec gen_flags;
    std::size_t gen_edges = 0;
    std::optional<std::uint64_t> gen_seed;
    unsigned gen_threads = 1;
    gen->add_option("--spec", gen_spec, "SynthSpec JSON (flags below are ignored when given)");
    gen->add_option("--components", gen_flags.components);
    gen->add_option("--latents", gen_flags.latents);
    gen->add_option("--metrics", gen_flags.metrics_per_component, "Metrics per component");
    gen->add_option("--noise", gen_flags.noise_sigma, "Noise sigma");
    gen->add_option("--length", gen_flags.length, "Samples per series");
    gen->add_option("--interval-ms", gen_flags.interval_ms);
    gen->add_option("--edges", gen_edges, "Random planted DAG edges");
    gen->add_option("--seed", gen_seed);
    gen->add_option("--threads", gen_threads);
    gen->add_option("--out", gen_out, "Output directory")->required();
    gen->callback([&] {
        auto spec = gen_spec.empty() ? gen_flags : load_as<synth::SynthSpec>(gen_spec);
        if (gen_seed) spec.seed = *gen_seed;
        if (gen_spec.empty() && gen_edges > 0) {
            spec.planted_edges = synth::random_dag(spec.components, gen_edges, spec.latents, spec.seed);
        }
        synth::write_dataset(synth::generate(spec, gen_threads), gen_out);
    });

    auto* inj = sy->add_subcommand("inject", "Regenerate a dataset with one more fault");
    std::string inj_truth, inj_kind, inj_out;
    synth::Fault fault;
    unsigned inj_threads = 1;
    inj->add_option("--truth", inj_truth, "truth.json of the base dataset")->required();
    inj->add_option("--kind", inj_kind, "ADD_METRIC, DROP_METRIC or CHANGE_LAG")
        ->required()
        ->check(CLI::IsMember({"ADD_METRIC", "DROP_METRIC", "CHANGE_LAG"}));
    inj->add_option("--component", fault.component, "Target component")->required();
    inj->add_option("--metric", fault.metric, "Metric to drop, or name of the added metric");
    inj->add_option("--latent", fault.latent, "Latent followed by an added metric");
    inj->add_option("--src", fault.src_component, "Source component of the edge to re-lag");
    inj->add_option("--lag", fault.lag_steps, "New lag in steps");
    inj->add_option("--threads", inj_threads);
    inj->add_option("--out", inj_out, "Output directory")->required();
    inj->callback([&] {
        fault.kind = synth::fault_kind_from_string(inj_kind);
        synth::write_dataset(synth::inject_fault(load_as<synth::GroundTruth>(inj_truth), fault, inj_threads), inj_out);
    });

    // eval
    auto* ev = app.add_subcommand("eval", "Scores against ground truth or another run");
    ev->require_subcommand(1);
    std::string ev_out;
    ev->add_option("--out", ev_out, "Output JSON ('-' for stdout)");

    auto* ev_ami = ev->add_subcommand("ami", "Per-component AMI between two clusterings");
    std::string ami_a, ami_b, ami_truth;
    ev_ami->add_option("--clusters", ami_a, "clusters.json")->required();
    ev_ami->add_option("--other", ami_b, "Second clusters.json");
    ev_ami->add_option("--truth", ami_truth, "truth.json (latent assignment)");
    ev_ami->callback([&] {
        if (ami_b.empty() == ami_truth.empty()) throw Error("eval ami: give exactly one of --other or --truth");
        const auto models = load_as<std::vector<clustering::ClusterModel>>(ami_a);
        std::map<std::string, evaluate::LabelAssignment> other;
        if (!ami_b.empty()) {
            for (const auto& m : load_as<std::vector<clustering::ClusterModel>>(ami_b)) {
                other[m.component] = evaluate::labels_of(m);
            }
        } else {
            for (const auto& [comp, metrics] : load_as<synth::GroundTruth>(ami_truth).assignment) {
                for (const auto& [name, latent] : metrics) other[comp][name] = static_cast<int>(latent);
            }
        }
        json out = json::object();
        for (const auto& m : models) {
            const auto a = evaluate::labels_of(m);
            auto it = other.find(m.component);
            if (it == other.end()) throw Error("eval ami: no labels for component " + m.component);
            evaluate::LabelAssignment b;
            for (const auto& [item, _] : a) {
                const auto l = it->second.find(item);
                if (l == it->second.end()) throw Error("eval ami: " + m.component + "/" + item + " missing");
                b[item] = l->second;
            }
            out[m.component] = evaluate::ami(a, b);
        }
        emit(out, ev_out);
    });

    auto* ev_edges = ev->add_subcommand("edges", "Component-pair precision/recall of a dependency graph");
    std::string edges_truth, edges_inferred;
    ev_edges->add_option("--truth", edges_truth, "truth.json or depgraph.json")->required();
    ev_edges->add_option("--inferred", edges_inferred, "depgraph.json")->required();
    ev_edges->callback([&] {
        const auto tj = read_json(edges_truth);
        const auto truth = tj.contains("planted") ? tj.at("planted").get<DependencyGraph>() : tj.get<DependencyGraph>();
        emit(evaluate::edge_prf(truth, load_as<DependencyGraph>(edges_inferred)), ev_out);
    });

    auto* ev_red = ev->add_subcommand("reduction", "Metrics per representative");
    std::string red_prepared, red_clusters;
    ev_red->add_option("--prepared", red_prepared, "prepared.json")->required();
    ev_red->add_option("--clusters", red_clusters, "clusters.json")->required();
    ev_red->callback([&] {
        const auto prepared = load_as<preprocess::PreparedCatalog>(red_prepared);
        const auto models = load_as<std::vector<clustering::ClusterModel>>(red_clusters);
        std::size_t reps = 0;
        for (const auto& m : models) reps += m.clusters.size();
        emit(json{{"metrics", prepared.series.size()},
                  {"representatives", reps},
                  {"reduction_ratio", evaluate::reduction_ratio(prepared.series.size(), reps)}},
             ev_out);
    });

    // run
    auto* run = app.add_subcommand("run", "preprocess -> cluster -> deps, writing all artifacts");
    Overrides run_o;
    std::string run_metrics, run_callgraph, run_out;
    run_o.attach(run);
    run->add_option("--metrics", run_metrics, "Metrics CSV");
    run->add_option("--callgraph", run_callgraph, "Events or callgraph CSV");
    run->add_option("--out", run_out, "Output directory");
    run->callback([&] {
        auto cfg = run_o.resolve();
        if (!run_metrics.empty()) cfg.metrics = run_metrics;
        if (!run_callgraph.empty()) cfg.callgraph = run_callgraph;
        if (!run_out.empty()) cfg.output_dir = run_out;
        const auto result = pipeline::run_pipeline(cfg);
        std::cerr << "wrote " << (cfg.output_dir / "report.json").string() << ": "
                  << result.prepared.series.size() << " series, "
                  << result.dependencies.graph.edges.size() << " dependency edges\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "sift: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
