#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "sift/ingest.hpp"
#include "sift/json_io.hpp"

namespace fs = std::filesystem;
using namespace sift;

namespace {

int sift_cli(const std::string& args) {
    const std::string cmd = std::string(SIFT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("command line end to end") {
    const auto root = fs::temp_directory_path() / "sift_cli_unit";
    fs::remove_all(root);
    const auto r = root.string();

    REQUIRE(sift_cli("synth generate --components 3 --latents 2 --metrics 6 --length 500 --edges 2 --seed 4 --out " + r +
                     "/c") == 0);
    REQUIRE(fs::exists(root / "c" / "metrics.csv"));
    REQUIRE(sift_cli("run --metrics " + r + "/c/metrics.csv --callgraph " + r + "/c/callgraph.csv --out " + r +
                     "/run_c") == 0);
    for (const char* f : {"prepared.json", "clusters.json", "depgraph.json", "report.json"}) {
        CHECK(fs::exists(root / "run_c" / f));
    }

    // Staged commands reproduce the one-shot run.
    CHECK(sift_cli("preprocess --metrics " + r + "/c/metrics.csv --out " + r + "/stage/prepared.json") == 0);
    CHECK(sift_cli("cluster --prepared " + r + "/stage/prepared.json --out " + r + "/stage/clusters.json") == 0);
    CHECK(sift_cli("deps --prepared " + r + "/stage/prepared.json --clusters " + r + "/stage/clusters.json --callgraph " +
                   r + "/c/callgraph.csv --out " + r + "/stage/depgraph.json") == 0);
    for (const char* f : {"prepared.json", "clusters.json", "depgraph.json"}) {
        CHECK(ingest::read_file(root / "stage" / f) == ingest::read_file(root / "run_c" / f));
    }

    REQUIRE(sift_cli("synth inject --truth " + r + "/c/truth.json --kind ADD_METRIC --component svc01 --latent 1 --out " +
                     r + "/f") == 0);
    REQUIRE(sift_cli("run --metrics " + r + "/f/metrics.csv --callgraph " + r + "/f/callgraph.csv --out " + r +
                     "/run_f") == 0);
    CHECK(sift_cli("rca --correct " + r + "/run_c --faulty " + r + "/run_f --out " + r + "/rca.json") == 0);
    const auto report = read_json(root / "rca.json");
    REQUIRE(report.at("ranked").size() >= 1);
    CHECK(report.at("ranked").at(0).at("component") == "svc01");

    CHECK(sift_cli("eval --out " + r + "/reduction.json reduction --prepared " + r + "/run_c/prepared.json --clusters " + r +
                   "/run_c/clusters.json") == 0);
    CHECK(sift_cli("eval --out " + r + "/ami.json ami --clusters " + r + "/run_c/clusters.json --truth " + r +
                   "/c/truth.json") == 0);
    CHECK(sift_cli("eval --out " + r + "/edges.json edges --truth " + r + "/c/truth.json --inferred " + r +
                   "/run_c/depgraph.json") == 0);
    CHECK(fs::exists(root / "edges.json"));

    // Failures exit nonzero.
    CHECK(sift_cli("run --metrics " + r + "/missing.csv --callgraph " + r + "/c/callgraph.csv --out " + r + "/x") != 0);
    CHECK(sift_cli("no-such-command") != 0);
    fs::remove_all(root);
}

TEST_CASE("autoscale derive and replay") {
    const auto root = fs::temp_directory_path() / "sift_cli_autoscale";
    fs::remove_all(root);
    fs::create_directories(root);
    std::string csv = "interval,metric_value,latency_p90_ms\n";
    for (int i = 0; i <= 200; ++i) csv += std::to_string(i) + "," + std::to_string(i) + "," + std::to_string(10 * i) + "\n";
    ingest::write_file(root / "trace.csv", csv);
    const auto r = root.string();
    REQUIRE(sift_cli("autoscale derive --trace " + r + "/trace.csv --metric web/request_time --out " + r + "/rule.json") ==
            0);
    const auto rule = read_json(root / "rule.json");
    CHECK(rule.at("metric") == "web/request_time");
    REQUIRE(sift_cli("autoscale replay --rule " + r + "/rule.json --trace " + r + "/trace.csv --out " + r +
                     "/replay.json") == 0);
    CHECK(read_json(root / "replay.json").at("samples") == 201);
    fs::remove_all(root);
}
