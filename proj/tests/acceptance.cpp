// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <thread>
#include <unistd.h>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sift/autoscale.hpp"
#include "sift/causality.hpp"
#include "sift/clustering.hpp"
#include "sift/evaluate.hpp"
#include "sift/ingest.hpp"
#include "sift/pipeline.hpp"
#include "sift/preprocess.hpp"
#include "sift/rca.hpp"
#include "sift/stats.hpp"
#include "sift/synth.hpp"

namespace fs = std::filesystem;
using namespace sift;

namespace {

int failures = 0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0.0 && secs >= budget_s) {
        o.pass = false;
        o.detail += "; runtime budget exceeded";
    }
    std::printf("%s [%d] %s (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

pipeline::PipelineConfig default_config(unsigned threads) {
    pipeline::PipelineConfig cfg;
    cfg.threads = threads;
    return cfg;
}

std::vector<double> white_noise(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

unsigned hw_threads() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

// 1. Metric reduction on 10 components x 100 metrics.
Outcome metric_reduction() {
    synth::SynthSpec spec;
    spec.components = 10;
    spec.latents = 7;
    spec.metrics_per_component = 100;
    spec.noise_sigma = 0.1;
    spec.length = 1000;
    spec.seed = 101;
    spec.planted_edges = synth::random_dag(spec.components, 9, spec.latents, spec.seed);
    const auto data = synth::generate(spec, hw_threads());
    const auto run = pipeline::analyze(data.catalog, data.callgraph, default_config(hw_threads()));
    const double ratio = evaluate::reduction_ratio(data.catalog.metric_names(), run.models);
    double min_ami = 1.0;
    for (const auto& m : run.models) {
        evaluate::LabelAssignment truth;
        for (const auto& [name, latent] : data.truth.assignment.at(m.component)) truth[name] = static_cast<int>(latent);
        min_ami = std::min(min_ami, evaluate::ami(evaluate::labels_of(m), truth));
    }
    return {ratio >= 10.0 && min_ami >= 0.8,
            "reduction " + fmt("%.2f", ratio) + " (>= 10), min per-component AMI " + fmt("%.3f", min_ami) + " (>= 0.8)"};
}

// 2. Two clusterings of the same data with different seeds (random initial assignment).
Outcome clustering_consistency() {
    synth::SynthSpec spec;
    spec.components = 6;
    spec.latents = 5;
    spec.metrics_per_component = 40;
    spec.noise_sigma = 0.1;
    spec.seed = 202;
    const auto data = synth::generate(spec, hw_threads());
    const auto prepared = preprocess::prepare(data.catalog, {});
    clustering::ClusteringConfig a;
    a.name_init = false;
    a.seed = 1;
    auto b = a;
    b.seed = 2;
    const auto ma = clustering::cluster_catalog(prepared, a, hw_threads());
    const auto mb = clustering::cluster_catalog(prepared, b, hw_threads());
    double min_ami = 1.0;
    for (std::size_t i = 0; i < ma.size(); ++i) {
        min_ami = std::min(min_ami, evaluate::ami(evaluate::labels_of(ma[i]), evaluate::labels_of(mb[i])));
    }
    return {min_ami >= 0.9, "min pairwise AMI across seeds " + fmt("%.3f", min_ami) + " (>= 0.9)"};
}

// 3. Share of members within SBD 0.3 of their centroid.
Outcome cluster_validity() {
    std::size_t members = 0;
    std::size_t within = 0;
    for (const double noise : {0.0, 0.05, 0.1}) {
        synth::SynthSpec spec;
        spec.components = 4;
        spec.latents = 5;
        spec.metrics_per_component = 50;
        spec.noise_sigma = noise;
        spec.seed = 303;
        const auto data = synth::generate(spec, hw_threads());
        const auto models = clustering::cluster_catalog(preprocess::prepare(data.catalog, {}), {}, hw_threads());
        for (const auto& m : models) {
            for (const auto& c : m.clusters) {
                members += c.members.size();
                within += c.members.size() - c.validity_violations.size();
            }
        }
    }
    const double share = static_cast<double>(within) / static_cast<double>(members);
    return {share >= 0.95, fmt("%.4f", share) + " of members within 0.3 (>= 0.95)"};
}

// 4. SBD properties and FFT vs brute-force NCC.
Outcome sbd_properties() {
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<std::size_t> len(8, 256);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto z = [](const std::vector<double>& v) { return preprocess::znormalize(std::span<const double>(v)); };
    double self = 0.0, sym = 0.0, inv = 0.0, ncc_err = 0.0, shift_max = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = len(rng);
        const auto x = z(white_noise(rng, n));
        const auto y = z(white_noise(rng, n));
        self = std::max(self, clustering::sbd(x, x).distance);
        sym = std::max(sym, std::abs(clustering::sbd(x, y).distance - clustering::sbd(y, x).distance));
        std::vector<double> scaled(n);
        const double a = 0.1 + 10.0 * unit(rng);
        const double b = 100.0 * (unit(rng) - 0.5);
        for (std::size_t t = 0; t < n; ++t) scaled[t] = a * x[t] + b;
        inv = std::max(inv, clustering::sbd(z(scaled), x).distance);

        // FFT cross-correlation against the direct sum at every shift.
        const clustering::CrossCorrelator cc(n);
        const auto sx = cc.transform(x);
        const auto sy = cc.transform(y);
        const auto fast = cc.cross_correlation(sx, sy);
        const double norm = std::sqrt(sx.energy * sy.energy);
        const long ln = static_cast<long>(n);
        for (long w = -(ln - 1); w < ln; ++w) {
            double s = 0.0;
            for (long t = 0; t < ln; ++t) {
                const long u = t + w;
                if (u >= 0 && u < ln) s += x[static_cast<std::size_t>(t)] * y[static_cast<std::size_t>(u)];
            }
            ncc_err = std::max(ncc_err, std::abs(fast[static_cast<std::size_t>(w + ln - 1)] - s) / norm);
        }
        ncc_err = std::max(ncc_err, std::abs(clustering::sbd(x, y).distance - oracle::sbd_brute(x, y)));

        // Periodic series (at least 12 periods) rolled circularly by 10% of its length.
        const std::size_t period = 8 + static_cast<std::size_t>(i % 13);
        const std::size_t m = period * (256 / period);
        std::vector<double> wave(m, 0.0);
        for (int h = 1; h <= 3; ++h) {
            const double amp = unit(rng);
            const double ph = 2.0 * std::numbers::pi * unit(rng);
            for (std::size_t t = 0; t < m; ++t) {
                wave[t] += amp * std::sin(2.0 * std::numbers::pi * h * static_cast<double>(t) / period + ph);
            }
        }
        const auto roll = static_cast<std::size_t>(std::lround(0.1 * static_cast<double>(m)));
        std::vector<double> rolled(m);
        for (std::size_t t = 0; t < m; ++t) rolled[(t + roll) % m] = wave[t];
        shift_max = std::max(shift_max, clustering::sbd(z(wave), z(rolled)).distance);
    }
    const bool ok = self <= 1e-9 && sym <= 1e-9 && inv <= 1e-9 && ncc_err <= 1e-9 && shift_max <= 0.05;
    return {ok, "self " + fmt("%.1e", self) + ", symmetry " + fmt("%.1e", sym) + ", scale/offset " + fmt("%.1e", inv) +
                    ", FFT vs brute " + fmt("%.1e", ncc_err) + ", 10% circular shift max " + fmt("%.4f", shift_max) +
                    " (<= 0.05)"};
}

// 5. Granger test against the oracle, power, size and the instantaneous case.
Outcome granger_correctness() {
    std::mt19937_64 rng(505);
    causality::CausalityConfig cfg;
    double f_err = 0.0, p_err = 0.0;
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = 200;
        const std::size_t lag = 1 + static_cast<std::size_t>(i % 3);
        const auto x = white_noise(rng, n);
        auto y = white_noise(rng, n);
        const double coupling = 0.05 * (i % 7);
        for (std::size_t t = 1; t < n; ++t) y[t] += coupling * x[t - 1] + 0.3 * y[t - 1];
        const auto got = causality::granger_at_lag(x, y, lag);
        const auto want = oracle::granger(x, y, lag);
        f_err = std::max(f_err, std::abs(got.f_statistic - want.f) / std::max(1.0, std::abs(want.f)));
        p_err = std::max(p_err, std::abs(got.p_value - want.p));
    }

    int detected = 0, strict = 0;
    for (int s = 0; s < 100; ++s) {
        std::mt19937_64 r(mix_seed(5050, static_cast<std::uint64_t>(s)));
        const std::size_t n = 1000;
        const auto x = white_noise(r, n);
        auto y = white_noise(r, n);
        for (std::size_t t = 1; t < n; ++t) y[t] += 0.8 * x[t - 1];
        const auto fwd = causality::granger(x, y, cfg);
        const auto rev = causality::granger(y, x, cfg);
        if (fwd.significant && fwd.lag_steps == 1 && fwd.p_value < rev.p_value) ++detected;
        if (fwd.significant && fwd.lag_steps == 1 && !rev.significant) ++strict;
    }

    int false_pos = 0;
    for (int s = 0; s < 200; ++s) {
        std::mt19937_64 r(mix_seed(5151, static_cast<std::uint64_t>(s)));
        const auto x = white_noise(r, 500);
        const auto y = white_noise(r, 500);
        if (causality::granger(x, y, cfg).significant) ++false_pos;
    }
    const auto x = white_noise(rng, 500);
    const auto copy = causality::granger(x, x, cfg);
    const bool ok = f_err <= 1e-6 && p_err <= 1e-6 && detected >= 95 && false_pos <= 20 && !copy.significant;
    return {ok, "oracle F rel err " + fmt("%.1e", f_err) + ", p err " + fmt("%.1e", p_err) + "; planted lag-1 detected " +
                    std::to_string(detected) + "/100 (>= 95; both-way-insignificant reverse " + std::to_string(strict) +
                    "/100); false positives " + std::to_string(false_pos) + "/200 (<= 20); copy significant=" +
                    (copy.significant ? "yes" : "no")};
}

// 6. Dependency recovery over random planted DAGs.
Outcome dependency_recovery() {
    std::size_t tp = 0, fp = 0, fn = 0;
    bool bidirectional = false;
    double mean_p = 0.0, mean_r = 0.0;
    const int dags = 20;
    for (int d = 0; d < dags; ++d) {
        synth::SynthSpec spec;
        spec.components = 5;
        spec.latents = 2;
        spec.metrics_per_component = 10;
        spec.noise_sigma = 0.1;
        spec.length = 1000;
        spec.seed = 600 + static_cast<std::uint64_t>(d);
        spec.planted_edges = synth::random_dag(spec.components, 4, spec.latents, spec.seed);
        const auto data = synth::generate(spec, hw_threads());
        const auto run = pipeline::analyze(data.catalog, data.callgraph, default_config(hw_threads()));
        const auto& g = run.dependencies.graph;
        const auto truth = data.truth.planted.component_pairs();
        const auto found = g.component_pairs();
        for (const auto& p : found) (truth.contains(p) ? tp : fp) += 1;
        for (const auto& p : truth) fn += found.contains(p) ? 0 : 1;
        const auto prf = evaluate::edge_prf(data.truth.planted, g);
        mean_p += prf.precision / dags;
        mean_r += prf.recall / dags;
        std::set<std::pair<MetricKey, MetricKey>> seen;
        for (const auto& e : g.edges) seen.insert({e.src(), e.dst()});
        for (const auto& e : g.edges) bidirectional = bidirectional || seen.contains({e.dst(), e.src()});
    }
    const double precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return {precision >= 0.9 && recall >= 0.9 && !bidirectional,
            "pooled precision " + fmt("%.3f", precision) + ", recall " + fmt("%.3f", recall) + " (>= 0.9; mean " +
                fmt("%.3f", mean_p) + "/" + fmt("%.3f", mean_r) + "); bidirectional pairs " +
                (bidirectional ? "present" : "absent")};
}

// 7. ADF on white noise and random walks.
Outcome adf_behavior() {
    int noise_ok = 0, walk_ok = 0;
    for (int s = 0; s < 100; ++s) {
        std::mt19937_64 r(mix_seed(707, static_cast<std::uint64_t>(s)));
        const auto e = white_noise(r, 500);
        if (causality::adf_is_stationary(e, causality::CausalityConfig{}.adf_alpha).stationary) ++noise_ok;
        const auto steps = white_noise(r, 500);
        std::vector<double> walk(500);
        std::partial_sum(steps.begin(), steps.end(), walk.begin());
        if (!causality::adf_is_stationary(walk, causality::CausalityConfig{}.adf_alpha).stationary) ++walk_ok;
    }
    return {noise_ok >= 95 && walk_ok >= 95, "white noise stationary " + std::to_string(noise_ok) +
                                                 "/100, random walk non-stationary " + std::to_string(walk_ok) + "/100"};
}

// 8. RCA on seeded fault injections plus the published ranking fixture.
Outcome rca_ranking() {
    int first = 0, reduced = 0;
    const int trials = 50;
    for (int t = 0; t < trials; ++t) {
        synth::SynthSpec spec;
        spec.components = 8;
        spec.latents = 3;
        spec.metrics_per_component = 20;
        spec.noise_sigma = 0.1;
        spec.length = 600;
        spec.seed = 800 + static_cast<std::uint64_t>(t);
        spec.planted_edges = synth::random_dag(spec.components, 8, spec.latents, spec.seed);
        const auto base = synth::generate(spec, hw_threads());
        const auto target = spec.component_name(static_cast<std::size_t>(t) % spec.components);
        const auto& names = base.truth.assignment.at(target);
        const auto victim = std::next(names.begin(), static_cast<long>(t % names.size()))->first;
        synth::Dataset faulty;
        switch (t % 3) {
            case 0: faulty = synth::inject_fault(base.truth, {synth::FaultKind::AddMetric, target, "", 1, "", 1}); break;
            case 1: faulty = synth::inject_fault(base.truth, {synth::FaultKind::DropMetric, target, victim, 0, "", 1}); break;
            default: {
                const auto dropped = synth::inject_fault(base.truth, {synth::FaultKind::DropMetric, target, victim, 0, "", 1});
                faulty = synth::inject_fault(dropped.truth, {synth::FaultKind::AddMetric, target, "", 2, "", 1});
            }
        }
        const auto cfg = default_config(hw_threads());
        const auto rc = pipeline::analyze(base.catalog, base.callgraph, cfg);
        const auto rf = pipeline::analyze(faulty.catalog, faulty.callgraph, cfg);
        const auto c = rca::make_snapshot("C", rc.prepared, rc.models, rc.dependencies.graph);
        const auto f = rca::make_snapshot("F", rf.prepared, rf.models, rf.dependencies.graph);
        const auto report = rca::rca_report(c, f, cfg.rca);
        if (!report.ranked.empty() && report.ranked.front().component == target) ++first;
        std::size_t total = 0;
        for (const auto& [comp, ms] : c.catalog) total += ms.size();
        if (report.metric_count() < total) ++reduced;
    }

    std::map<std::string, rca::NoveltyScore> table = {
        {"Nova API", rca::make_novelty(7, 22)},     {"Nova libvirt", rca::make_novelty(0, 21)},
        {"Nova scheduler", rca::make_novelty(7, 7)}, {"Neutron server", rca::make_novelty(2, 10)},
        {"RabbitMQ", rca::make_novelty(5, 6)}};
    const auto ranked = rca::rank_novelty(table);
    const std::vector<std::string> expected = {"Nova API", "Nova libvirt", "Nova scheduler", "Neutron server", "RabbitMQ"};
    bool fixture = ranked.size() == expected.size();
    for (std::size_t i = 0; fixture && i < expected.size(); ++i) fixture = ranked[i].component == expected[i];

    const bool ok = first * 10 >= trials * 9 && reduced == trials && fixture;
    return {ok, "faulty component ranked first " + std::to_string(first) + "/" + std::to_string(trials) +
                    " (>= 90%), reduced metric list " + std::to_string(reduced) + "/" + std::to_string(trials) +
                    ", published ranking fixture " + (fixture ? "reproduced" : "mismatch")};
}

// 9. Threshold derivation and replay.
Outcome autoscaling() {
    const autoscale::SlaSpec sla;
    autoscale::Trace calibration;
    for (int i = 0; i <= 400; ++i) {
        const double m = 0.5 * i;  // 0..200
        calibration.push_back({i, m, 10.0 * m});  // latency crosses 1000 ms at m = 100
    }
    const auto t = autoscale::derive_thresholds(calibration, sla);
    const bool budget = autoscale::violation_fraction_below(calibration, sla, t.up) <= autoscale::kViolationBudget &&
                        std::abs(t.down / t.up - 0.8) < 1e-12;

    autoscale::Trace load;
    for (int i = 0; i < 1400; ++i) {
        const double m = 150.0 + 100.0 * std::sin(2.0 * std::numbers::pi * i / 200.0);
        load.push_back({i, m, 10.0 * m});
    }
    autoscale::ScalingRule derived{"svc/request_time", t.up, t.down, 1, 1, 10, 3};
    autoscale::ScalingRule baseline{"svc/cpu", 230.0, 184.0, 1, 1, 10, 3};
    const auto rd = autoscale::replay(derived, load, sla);
    const auto rd2 = autoscale::replay(derived, load, sla);
    const auto rb = autoscale::replay(baseline, load, sla);
    const bool deterministic = rd.actions == rd2.actions && rd.violations == rd2.violations;

    autoscale::Trace spike(40, {0, 10.0, 100.0});
    for (int i = 0; i < 40; ++i) spike[static_cast<std::size_t>(i)].interval = i;
    for (int i = 5; i < 12; ++i) spike[static_cast<std::size_t>(i)].metric_value = 1000.0;
    autoscale::ScalingRule cool{"m", 100.0, 1.0, 1, 1, 10, 12};
    const auto rs = autoscale::replay(cool, spike, sla, {1, -1});
    const bool cooldown = rs.actions.size() == 1 && rs.actions.front().index == 5 && rs.actions.front().delta == 1;

    const bool ok = budget && deterministic && cooldown && rd.violations < rb.violations;
    return {ok, "up " + fmt("%.3f", t.up) + " down " + fmt("%.3f", t.down) + ", calibration violations " +
                    fmt("%.4f", t.violation_fraction) + " (<= 0.05); derived rule " + std::to_string(rd.violations) +
                    " violations vs mis-thresholded " + std::to_string(rb.violations) + "; deterministic=" +
                    (deterministic ? "yes" : "no") + ", cooldown=" + (cooldown ? "ok" : "broken")};
}

// 10. Byte-identical artifacts across reruns.
Outcome determinism() {
    const auto root = fs::temp_directory_path() / ("sift_accept_" + std::to_string(::getpid()));
    fs::remove_all(root);
    synth::SynthSpec spec;
    spec.components = 4;
    spec.metrics_per_component = 15;
    spec.seed = 1010;
    spec.planted_edges = synth::random_dag(4, 3, spec.latents, spec.seed);
    synth::write_dataset(synth::generate(spec), root / "data");
    auto cfg = default_config(hw_threads());
    cfg.metrics = root / "data" / "metrics.csv";
    cfg.callgraph = root / "data" / "callgraph.csv";
    cfg.output_dir = root / "a";
    (void)pipeline::run_pipeline(cfg);
    cfg.output_dir = root / "b";
    (void)pipeline::run_pipeline(cfg);
    bool same = true;
    for (const char* f : {"prepared.json", "clusters.json", "depgraph.json", "report.json"}) {
        same = same && ingest::read_file(root / "a" / f) == ingest::read_file(root / "b" / f);
    }
    fs::remove_all(root);
    return {same, same ? "all four artifacts byte-identical" : "artifacts differ between runs"};
}

}  // namespace

int main() {
    criterion(1, "metric reduction", 60.0, metric_reduction);
    criterion(2, "clustering consistency", 0.0, clustering_consistency);
    criterion(3, "cluster validity", 0.0, cluster_validity);
    criterion(4, "SBD properties", 10.0, sbd_properties);
    criterion(5, "Granger correctness", 0.0, granger_correctness);
    criterion(6, "dependency recovery", 120.0, dependency_recovery);
    criterion(7, "ADF behavior", 0.0, adf_behavior);
    criterion(8, "RCA ranking", 0.0, rca_ranking);
    criterion(9, "autoscaling", 0.0, autoscaling);
    criterion(10, "determinism", 0.0, determinism);
    std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
