#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sift/causality.hpp"
#include "sift/clustering.hpp"
#include "sift/json_io.hpp"
#include "sift/preprocess.hpp"
#include "sift/rca.hpp"

namespace sift::pipeline {

/// Error raised inside a pipeline stage; the message starts with "[stage] ".
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct PipelineConfig {
    preprocess::PreprocessConfig preprocess;
    clustering::ClusteringConfig clustering;
    causality::CausalityConfig causality;
    rca::RcaConfig rca;
    std::filesystem::path metrics;    ///< metrics CSV
    std::filesystem::path callgraph;  ///< events or callgraph CSV
    std::filesystem::path output_dir = "out";
    unsigned threads = 1;

    void validate() const;
};

void to_json(json& j, const PipelineConfig& c);
/// Missing fields keep their defaults.
void from_json(const json& j, PipelineConfig& c);
/// Relative paths in the file resolve against the file's directory.
[[nodiscard]] PipelineConfig load_config(const std::filesystem::path& path);

struct RunResult {
    preprocess::PreparedCatalog prepared;
    std::vector<clustering::ClusterModel> models;
    causality::DependencyReport dependencies;
    json report;  ///< contents of report.json
};

/// preprocess -> cluster -> causality, in memory.
[[nodiscard]] RunResult analyze(const ingest::MetricCatalog& catalog, const ingest::CallGraph& callgraph,
                                const PipelineConfig& cfg);

/// Loads inputs, runs analyze() and writes prepared.json, clusters.json,
/// depgraph.json and report.json into cfg.output_dir.
RunResult run_pipeline(const PipelineConfig& cfg);

}  // namespace sift::pipeline
