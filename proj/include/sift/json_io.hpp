#pragma once

#include <filesystem>

#include <json.hpp>

#include "sift/autoscale.hpp"
#include "sift/causality.hpp"
#include "sift/clustering.hpp"
#include "sift/depgraph.hpp"
#include "sift/evaluate.hpp"
#include "sift/preprocess.hpp"
#include "sift/rca.hpp"
#include "sift/synth.hpp"

namespace sift {

using json = nlohmann::ordered_json;

/// Parses a JSON file; errors name the path.
[[nodiscard]] json read_json(const std::filesystem::path& path);
/// Two-space indent, trailing newline.
[[nodiscard]] std::string dump_json(const json& j);
void write_json(const std::filesystem::path& path, const json& j);

void to_json(json& j, const MetricKey& k);
void from_json(const json& j, MetricKey& k);
void to_json(json& j, const DependencyEdge& e);
void from_json(const json& j, DependencyEdge& e);
void to_json(json& j, const DependencyGraph& g);
void from_json(const json& j, DependencyGraph& g);

namespace preprocess {
void to_json(json& j, const PreprocessConfig& c);
void from_json(const json& j, PreprocessConfig& c);
void to_json(json& j, const UniformSeries& s);
void from_json(const json& j, UniformSeries& s);
void to_json(json& j, const DroppedSeries& d);
void from_json(const json& j, DroppedSeries& d);
void to_json(json& j, const PreparedCatalog& p);
void from_json(const json& j, PreparedCatalog& p);
}  // namespace preprocess

namespace clustering {
void to_json(json& j, const ClusteringConfig& c);
void from_json(const json& j, ClusteringConfig& c);
void to_json(json& j, const Cluster& c);
void from_json(const json& j, Cluster& c);
void to_json(json& j, const ClusterModel& m);
void from_json(const json& j, ClusterModel& m);
}  // namespace clustering

namespace causality {
void to_json(json& j, const CausalityConfig& c);
void from_json(const json& j, CausalityConfig& c);
void to_json(json& j, const StationarityReport& r);
void to_json(json& j, const GrangerResult& r);
void to_json(json& j, const TestRecord& r);
/// Diagnostics only; the graph itself goes to depgraph.json.
void to_json(json& j, const DependencyReport& r);
}  // namespace causality

namespace rca {
void to_json(json& j, const RcaConfig& c);
void from_json(const json& j, RcaConfig& c);
void to_json(json& j, const NoveltyScore& n);
void from_json(const json& j, NoveltyScore& n);
void to_json(json& j, const EdgeEvent& e);
void from_json(const json& j, EdgeEvent& e);
void to_json(json& j, const ReportEntry& e);
void from_json(const json& j, ReportEntry& e);
void to_json(json& j, const RcaReport& r);
void from_json(const json& j, RcaReport& r);
}  // namespace rca

namespace autoscale {
void to_json(json& j, const SlaSpec& s);
void from_json(const json& j, SlaSpec& s);
void to_json(json& j, const ScalingRule& r);
void from_json(const json& j, ScalingRule& r);
void to_json(json& j, const Thresholds& t);
void to_json(json& j, const ScaleAction& a);
void to_json(json& j, const ReplayResult& r);
}  // namespace autoscale

namespace synth {
void to_json(json& j, const PlantedEdge& e);
void from_json(const json& j, PlantedEdge& e);
void to_json(json& j, const SynthSpec& s);
void from_json(const json& j, SynthSpec& s);
void to_json(json& j, const Fault& f);
void from_json(const json& j, Fault& f);
void to_json(json& j, const GroundTruth& t);
void from_json(const json& j, GroundTruth& t);
}  // namespace synth

namespace evaluate {
void to_json(json& j, const Prf& p);
}  // namespace evaluate

}  // namespace sift
