#include "sift/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "sift/json_io.hpp"
#include "sift/parallel.hpp"

namespace sift::synth {

namespace {

constexpr std::size_t kMaxLatents = 7;
constexpr std::size_t kBurn = 128;  // warm-up steps so lagged sources exist at t = 0
constexpr double kOwnWeight = 0.5;
constexpr std::array<const char*, kMaxLatents> kResources = {"cpu", "memory", "network", "disk",
                                                             "requests", "latency", "queue"};

/// Kahn's algorithm; empty result means a cycle.
std::vector<std::size_t> topo_order(std::size_t n, const std::vector<PlantedEdge>& edges) {
    std::vector<std::size_t> indeg(n, 0);
    for (const auto& e : edges) ++indeg[e.dst];
    std::vector<std::size_t> order;
    std::vector<std::size_t> ready;
    for (std::size_t i = n; i-- > 0;) {
        if (indeg[i] == 0) ready.push_back(i);
    }
    while (!ready.empty()) {
        const auto v = ready.back();
        ready.pop_back();
        order.push_back(v);
        for (const auto& e : edges) {
            if (e.src == v && --indeg[e.dst] == 0) ready.push_back(e.dst);
        }
    }
    if (order.size() != n) order.clear();
    return order;
}

void standardize(std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / n);
    for (double& x : v) x = sd > 0.0 ? (x - mean) / sd : 0.0;
}

/// Three random-phase sinusoids plus an AR(1) process.
std::vector<double> own_latent(const SynthSpec& spec, std::size_t component, std::size_t latent) {
    std::mt19937_64 rng(mix_seed(spec.seed, mix_seed(fnv1a("latent"), component * kMaxLatents + latent)));
    std::uniform_real_distribution<double> period(20.0, 200.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t n = spec.length + kBurn;
    std::vector<double> out(n, 0.0);
    for (int s = 0; s < 3; ++s) {
        const double p = period(rng);
        const double ph = phase(rng);
        for (std::size_t t = 0; t < n; ++t) out[t] += 0.2 * std::sin(2.0 * std::numbers::pi * t / p + ph);
    }
    double ar = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        ar = 0.5 * ar + gauss(rng);
        out[t] += ar;
    }
    standardize(out);
    return out;
}

struct MetricPlan {
    std::string name;
    std::size_t index = 0;
    std::size_t latent = 0;
};

std::string metric_name(std::size_t resource, std::string_view tag, std::size_t index) {
    std::string idx = std::to_string(index);
    if (idx.size() < 3) idx.insert(0, 3 - idx.size(), '0');
    return std::string(kResources[resource]) + "_" + std::string(tag) + idx;
}

ingest::MetricSeries render_metric(const SynthSpec& spec, const std::string& component, const MetricPlan& plan,
                                   const std::vector<double>& latent) {
    std::mt19937_64 rng(mix_seed(spec.seed, mix_seed(fnv1a(component), plan.index)) ^ 0x5eedULL);
    std::uniform_real_distribution<double> scale(0.5, 5.0);
    std::uniform_real_distribution<double> offset(0.0, 100.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::int64_t> jitter(-spec.jitter_ms, spec.jitter_ms);
    const double a = scale(rng);
    const double b = offset(rng);

    ingest::MetricSeries s;
    s.component = component;
    s.metric = plan.name;
    s.samples.reserve(spec.length);
    for (std::size_t t = 0; t < spec.length; ++t) {
        const double noise = spec.noise_sigma > 0.0 ? spec.noise_sigma * gauss(rng) : 0.0;
        const double value = b + a * (latent[kBurn + t] + noise);
        const std::int64_t j = spec.jitter_ms > 0 ? jitter(rng) : 0;
        const bool interior = t > 0 && t + 1 < spec.length;
        const bool drop = spec.drop_fraction > 0.0 && unit(rng) < spec.drop_fraction;
        if (interior && drop) continue;
        s.samples.push_back({spec.start_ms + static_cast<std::int64_t>(t) * spec.interval_ms + (interior ? j : 0),
                             value});
    }
    return s;
}

Dataset build(const SynthSpec& spec, const std::vector<Fault>& faults, unsigned threads) {
    spec.validate();
    const std::size_t nc = spec.components;
    std::map<std::string, std::size_t> comp_index;
    for (std::size_t c = 0; c < nc; ++c) comp_index[spec.component_name(c)] = c;
    auto index_of = [&](const std::string& name) {
        const auto it = comp_index.find(name);
        if (it == comp_index.end()) throw Error("synth: unknown component " + name);
        return it->second;
    };

    // Metric plans before faults.
    std::vector<std::vector<MetricPlan>> plans(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        const auto comp = spec.component_name(c);
        for (std::size_t i = 0; i < spec.metrics_per_component; ++i) {
            std::mt19937_64 rng(mix_seed(spec.seed, mix_seed(fnv1a(comp), i)));
            std::uniform_int_distribution<std::size_t> pick(0, spec.latents - 1);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            std::uniform_int_distribution<std::size_t> other(0, kMaxLatents - 2);
            const std::size_t latent = i < spec.latents ? i : pick(rng);
            std::size_t resource = latent;
            if (unit(rng) < spec.mislabel_fraction) {
                const auto o = other(rng);
                resource = o >= latent ? o + 1 : o;
            }
            plans[c].push_back({metric_name(resource, "", i), i, latent});
        }
    }

    auto edges = spec.planted_edges;
    std::vector<std::size_t> added(nc, 0);
    for (const auto& f : faults) {
        const auto c = index_of(f.component);
        switch (f.kind) {
            case FaultKind::AddMetric: {
                if (f.latent >= spec.latents) throw Error("synth: ADD_METRIC latent out of range");
                const std::size_t idx = spec.metrics_per_component + added[c]++;
                auto name = f.metric.empty() ? metric_name(f.latent, "added_", idx) : f.metric;
                for (const auto& p : plans[c]) {
                    if (p.name == name) throw Error("synth: metric " + name + " already exists in " + f.component);
                }
                plans[c].push_back({std::move(name), idx, f.latent});
                break;
            }
            case FaultKind::DropMetric: {
                auto it = std::find_if(plans[c].begin(), plans[c].end(),
                                       [&](const MetricPlan& p) { return p.name == f.metric; });
                if (it == plans[c].end()) throw Error("synth: no metric " + f.metric + " in " + f.component);
                if (plans[c].size() == 1) throw Error("synth: cannot drop the last metric of " + f.component);
                plans[c].erase(it);
                break;
            }
            case FaultKind::ChangeLag: {
                std::vector<PlantedEdge*> incoming;
                for (auto& e : edges) {
                    if (e.dst == c && (f.src_component.empty() || e.src == index_of(f.src_component))) {
                        incoming.push_back(&e);
                    }
                }
                if (incoming.size() != 1) {
                    throw Error("synth: CHANGE_LAG needs exactly one matching edge into " + f.component);
                }
                if (f.lag_steps < 1 || f.lag_steps >= kBurn) throw Error("synth: CHANGE_LAG lag out of range");
                incoming.front()->lag_steps = f.lag_steps;
                break;
            }
        }
    }

    // Latents: own processes, then driven latents in topological order.
    std::vector<std::vector<std::vector<double>>> latents(nc);
    parallel_for(nc, threads, [&](std::size_t c) {
        for (std::size_t j = 0; j < spec.latents; ++j) latents[c].push_back(own_latent(spec, c, j));
    });
    for (const auto c : topo_order(nc, edges)) {
        for (std::size_t j = 0; j < spec.latents; ++j) {
            bool driven = false;
            std::vector<double> mixed(latents[c][j].size(), 0.0);
            for (const auto& e : edges) {
                if (e.dst != c || e.dst_latent != j) continue;
                driven = true;
                const auto& src = latents[e.src][e.src_latent];
                for (std::size_t t = e.lag_steps; t < mixed.size(); ++t) mixed[t] += e.weight * src[t - e.lag_steps];
            }
            if (!driven) continue;
            for (std::size_t t = 0; t < mixed.size(); ++t) mixed[t] += kOwnWeight * latents[c][j][t];
            standardize(mixed);
            latents[c][j] = std::move(mixed);
        }
    }

    std::vector<std::vector<ingest::MetricSeries>> rendered(nc);
    parallel_for(nc, threads, [&](std::size_t c) {
        const auto comp = spec.component_name(c);
        for (const auto& p : plans[c]) rendered[c].push_back(render_metric(spec, comp, p, latents[c][p.latent]));
    });
    std::vector<ingest::MetricSeries> all;
    for (auto& r : rendered) std::move(r.begin(), r.end(), std::back_inserter(all));

    Dataset out;
    out.catalog = ingest::MetricCatalog(std::move(all));
    out.truth.spec = spec;
    out.truth.faults = faults;
    for (std::size_t c = 0; c < nc; ++c) {
        auto& a = out.truth.assignment[spec.component_name(c)];
        for (const auto& p : plans[c]) a[p.name] = p.latent;
    }
    for (const auto& e : edges) {
        const auto sc = spec.component_name(e.src);
        const auto dc = spec.component_name(e.dst);
        out.callgraph.nodes.insert(sc);
        out.callgraph.nodes.insert(dc);
        out.callgraph.edges[{sc, dc}] = 100;
        for (const auto& ps : plans[e.src]) {
            if (ps.latent != e.src_latent) continue;
            for (const auto& pd : plans[e.dst]) {
                if (pd.latent != e.dst_latent) continue;
                DependencyEdge d;
                d.src_component = sc;
                d.src_metric = ps.name;
                d.dst_component = dc;
                d.dst_metric = pd.name;
                d.lag_ms = static_cast<std::int64_t>(e.lag_steps) * spec.interval_ms;
                d.p_value = d.q_value = 0.0;
                out.truth.planted.edges.push_back(std::move(d));
            }
        }
    }
    out.truth.planted.sort();
    return out;
}

}  // namespace

void SynthSpec::validate() const {
    if (components < 1) throw Error("synth: need at least one component");
    if (latents < 1 || latents > kMaxLatents) throw Error("synth: latents must be in [1, 7]");
    if (metrics_per_component < 1) throw Error("synth: metrics_per_component must be >= 1");
    if (length < 32) throw Error("synth: length must be >= 32");
    if (interval_ms <= 0) throw Error("synth: interval_ms must be positive");
    if (!(noise_sigma >= 0.0)) throw Error("synth: noise_sigma must be >= 0");
    if (jitter_ms < 0 || 2 * jitter_ms >= interval_ms) throw Error("synth: jitter_ms must be in [0, interval/2)");
    if (!(drop_fraction >= 0.0 && drop_fraction < 1.0)) throw Error("synth: drop_fraction must be in [0, 1)");
    if (!(mislabel_fraction >= 0.0 && mislabel_fraction <= 1.0)) {
        throw Error("synth: mislabel_fraction must be in [0, 1]");
    }
    for (const auto& e : planted_edges) {
        if (e.src >= components || e.dst >= components) throw Error("synth: planted edge references unknown component");
        if (e.src == e.dst) throw Error("synth: planted edge is a self-loop");
        if (e.weight == 0.0 || !std::isfinite(e.weight)) throw Error("synth: planted edge weight must be nonzero");
        if (e.lag_steps < 1 || e.lag_steps >= kBurn) throw Error("synth: planted lag must be in [1, 127]");
        if (e.src_latent >= latents || e.dst_latent >= latents) throw Error("synth: planted edge latent out of range");
    }
    if (topo_order(components, planted_edges).empty()) throw Error("synth: planted edges contain a cycle");
}

std::string SynthSpec::component_name(std::size_t i) const {
    std::string idx = std::to_string(i);
    if (idx.size() < 2) idx.insert(0, 2 - idx.size(), '0');
    return "svc" + idx;
}

std::string to_string(FaultKind kind) {
    switch (kind) {
        case FaultKind::AddMetric: return "ADD_METRIC";
        case FaultKind::DropMetric: return "DROP_METRIC";
        case FaultKind::ChangeLag: return "CHANGE_LAG";
    }
    return "?";
}

FaultKind fault_kind_from_string(const std::string& s) {
    if (s == "ADD_METRIC") return FaultKind::AddMetric;
    if (s == "DROP_METRIC") return FaultKind::DropMetric;
    if (s == "CHANGE_LAG") return FaultKind::ChangeLag;
    throw Error("unknown fault kind: " + s);
}

std::vector<int> GroundTruth::labels(const std::string& component) const {
    const auto it = assignment.find(component);
    if (it == assignment.end()) throw Error("ground truth has no component " + component);
    std::vector<int> out;
    for (const auto& [name, latent] : it->second) out.push_back(static_cast<int>(latent));
    return out;
}

Dataset generate(const SynthSpec& spec, unsigned threads) { return build(spec, {}, threads); }

Dataset inject_fault(const GroundTruth& truth, const Fault& fault, unsigned threads) {
    auto faults = truth.faults;
    faults.push_back(fault);
    return build(truth.spec, faults, threads);
}

std::vector<PlantedEdge> random_dag(std::size_t components, std::size_t edges, std::size_t latents,
                                    std::uint64_t seed, std::size_t max_lag) {
    if (components < 2) throw Error("random_dag: need at least two components");
    const std::size_t max_edges = components * (components - 1) / 2;
    if (edges > max_edges) throw Error("random_dag: too many edges for " + std::to_string(components) + " nodes");
    if (latents < 1 || max_lag < 1) throw Error("random_dag: latents and max_lag must be >= 1");
    std::mt19937_64 rng(mix_seed(seed, fnv1a("dag")));
    std::vector<std::size_t> order(components);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < components; ++i) {
        for (std::size_t j = i + 1; j < components; ++j) pairs.emplace_back(order[i], order[j]);
    }
    std::shuffle(pairs.begin(), pairs.end(), rng);
    std::uniform_int_distribution<std::size_t> lag(1, max_lag);
    std::uniform_int_distribution<std::size_t> lat(0, latents - 1);
    std::vector<PlantedEdge> out;
    for (std::size_t k = 0; k < edges; ++k) {
        PlantedEdge e;
        e.src = pairs[k].first;
        e.dst = pairs[k].second;
        e.lag_steps = lag(rng);
        e.weight = 0.8;
        e.src_latent = lat(rng);
        e.dst_latent = lat(rng);
        out.push_back(e);
    }
    std::sort(out.begin(), out.end(),
              [](const PlantedEdge& a, const PlantedEdge& b) { return std::tie(a.src, a.dst) < std::tie(b.src, b.dst); });
    return out;
}

void write_dataset(const Dataset& data, const std::filesystem::path& dir) {
    ingest::write_metrics(data.catalog, dir / "metrics.csv");
    ingest::write_call_graph(data.callgraph, dir / "callgraph.csv");
    write_json(dir / "truth.json", data.truth);
}

}  // namespace sift::synth
