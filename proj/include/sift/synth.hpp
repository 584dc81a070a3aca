#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sift/depgraph.hpp"
#include "sift/ingest.hpp"

namespace sift::synth {

/// Latent `dst_latent` of component `dst` becomes
/// weight * latent `src_latent` of `src` lagged by `lag_steps`, plus its own process.
struct PlantedEdge {
    std::size_t src = 0;
    std::size_t dst = 0;
    std::size_t lag_steps = 1;
    double weight = 0.8;
    std::size_t src_latent = 0;
    std::size_t dst_latent = 0;

    bool operator==(const PlantedEdge&) const = default;
};

struct SynthSpec {
    std::size_t components = 5;
    std::size_t latents = 3;  ///< per component, at most 7
    std::size_t metrics_per_component = 20;
    std::vector<PlantedEdge> planted_edges;
    double noise_sigma = 0.1;
    std::size_t length = 1000;
    std::int64_t interval_ms = 500;
    std::uint64_t seed = 1;
    std::int64_t start_ms = 0;
    std::int64_t jitter_ms = 0;   ///< uniform timestamp jitter, below interval/2
    double drop_fraction = 0.0;   ///< fraction of interior samples removed
    double mislabel_fraction = 0.2;  ///< metrics named after a resource other than their latent's

    /// Throws on invalid sizes or a cyclic edge set.
    void validate() const;
    [[nodiscard]] std::string component_name(std::size_t i) const;

    bool operator==(const SynthSpec&) const = default;
};

enum class FaultKind { AddMetric, DropMetric, ChangeLag };

[[nodiscard]] std::string to_string(FaultKind kind);
[[nodiscard]] FaultKind fault_kind_from_string(const std::string& s);

struct Fault {
    FaultKind kind = FaultKind::AddMetric;
    std::string component;
    std::string metric;           ///< DROP_METRIC target; optional name for ADD_METRIC
    std::size_t latent = 0;       ///< ADD_METRIC: latent the new metric follows
    std::string src_component;    ///< CHANGE_LAG: source of the edge into `component`
    std::size_t lag_steps = 1;    ///< CHANGE_LAG: new lag

    bool operator==(const Fault&) const = default;
};

struct GroundTruth {
    SynthSpec spec;
    std::vector<Fault> faults;
    std::map<std::string, std::map<std::string, std::size_t>> assignment;  ///< component -> metric -> latent
    DependencyGraph planted;  ///< metric-level edges between latent members

    /// Labels in sorted metric order, for AMI.
    [[nodiscard]] std::vector<int> labels(const std::string& component) const;
};

struct Dataset {
    ingest::MetricCatalog catalog;
    ingest::CallGraph callgraph;  ///< planted component edges only
    GroundTruth truth;
};

[[nodiscard]] Dataset generate(const SynthSpec& spec, unsigned threads = 1);

/// Regenerates with the fault appended; untouched series are identical.
/// Dropping a component's last metric is an error.
[[nodiscard]] Dataset inject_fault(const GroundTruth& truth, const Fault& fault, unsigned threads = 1);

/// Random DAG over `components` nodes with `edges` edges (at most one per pair).
[[nodiscard]] std::vector<PlantedEdge> random_dag(std::size_t components, std::size_t edges, std::size_t latents,
                                                  std::uint64_t seed, std::size_t max_lag = 3);

/// metrics.csv, callgraph.csv and truth.json in `dir`.
void write_dataset(const Dataset& data, const std::filesystem::path& dir);

}  // namespace sift::synth
