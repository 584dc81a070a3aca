#include <cmath>
#include <numeric>
#include <random>

#include "../oracles.hpp"
#include "doctest.h"
#include "sift/causality.hpp"

using namespace sift;
using namespace sift::causality;

namespace {

std::vector<double> noise(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

preprocess::UniformSeries uniform(std::string comp, std::string metric, std::vector<double> v) {
    return {std::move(comp), std::move(metric), 0, 500, std::move(v)};
}

clustering::ClusterModel single(const std::string& comp, const std::string& metric) {
    clustering::ClusterModel m;
    m.component = comp;
    clustering::Cluster c;
    c.members = {metric};
    c.representative = metric;
    m.clusters = {c};
    m.k = 1;
    return m;
}

}  // namespace

TEST_CASE("granger at a fixed lag matches a reference implementation") {
    const std::size_t n = 200;
    std::vector<double> x(n), y(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double td = static_cast<double>(t);
        x[t] = std::sin(0.37 * td) + 0.5 * std::sin(1.91 * td + 0.3) + static_cast<double>((t * 7919) % 101) / 101.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = 0.6 * (i >= 2 ? x[i - 2] : 0.0) + 0.4 * std::cos(0.23 * static_cast<double>(i)) +
               static_cast<double>((i * 104729) % 97) / 97.0;
    }
    const double f[] = {25.817122471628789, 105.02071013784257, 77.76975586030585};
    const double p[] = {8.7211136430540071e-07, 1.3804991536954156e-31, 7.3214342716274221e-33};
    for (std::size_t lag = 1; lag <= 3; ++lag) {
        const auto r = granger_at_lag(x, y, lag);
        CHECK(r.f_statistic == doctest::Approx(f[lag - 1]).epsilon(1e-8));
        CHECK(r.p_value == doctest::Approx(p[lag - 1]).epsilon(1e-6));
        CHECK(r.df_num == lag);
        CHECK(r.df_den == n - lag - 2 * lag - 1);
    }
}

TEST_CASE("granger F and p agree with the direct oracle") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto x = noise(rng, 200);
        auto y = noise(rng, 200);
        for (std::size_t t = 2; t < y.size(); ++t) y[t] += 0.1 * (i % 5) * x[t - 2] + 0.2 * y[t - 1];
        const std::size_t lag = 1 + static_cast<std::size_t>(i) % 3;
        const auto got = granger_at_lag(x, y, lag);
        const auto want = oracle::granger(x, y, lag);
        CHECK(std::abs(got.f_statistic - want.f) <= 1e-6 * std::max(1.0, want.f));
        CHECK(std::abs(got.p_value - want.p) <= 1e-6);
    }
}

TEST_CASE("planted lag-1 influence is found in the right direction") {
    std::mt19937_64 rng(4);
    const auto x = noise(rng, 1000);
    auto y = noise(rng, 1000);
    for (std::size_t t = 1; t < y.size(); ++t) y[t] += 0.8 * x[t - 1];
    const CausalityConfig cfg;
    const auto fwd = granger(x, y, cfg);
    CHECK(fwd.significant);
    CHECK(fwd.lag_steps == 1);
    CHECK(fwd.p_value < 0.01);
    CHECK(fwd.p_value == doctest::Approx(std::min(1.0, 3.0 * fwd.raw_p_value)));
    CHECK_FALSE(granger(y, x, cfg).significant);
}

TEST_CASE("instantaneous copy is degenerate and never significant") {
    std::mt19937_64 rng(5);
    const auto x = noise(rng, 300);
    const auto r = granger(x, x, {});
    CHECK(r.degenerate);
    CHECK_FALSE(r.significant);
    CHECK(granger_at_lag(x, x, 2).degenerate);
}

TEST_CASE("granger preconditions") {
    std::mt19937_64 rng(6);
    const auto x = noise(rng, 20);
    CHECK_THROWS_AS((void)granger(x, x, {}), Error);  // needs 10 * max_lag samples
    const auto a = noise(rng, 100);
    const auto b = noise(rng, 90);
    CHECK_THROWS_AS((void)granger(a, b, {}), Error);
}

TEST_CASE("stationarity preparation") {
    std::mt19937_64 rng(7);
    int ar_ok = 0;
    for (int s = 0; s < 100; ++s) {
        auto e = noise(rng, 500);
        for (std::size_t t = 1; t < e.size(); ++t) e[t] += 0.5 * e[t - 1];
        if (adf_is_stationary(e, 0.05).stationary) ++ar_ok;
    }
    CHECK(ar_ok >= 90);

    const auto stationary = noise(rng, 300);
    const auto kept = prepare_stationary(stationary, 0.01);
    CHECK_FALSE(kept.report.differenced);
    CHECK(kept.values == stationary);

    const auto steps = noise(rng, 300);
    std::vector<double> walk(steps.size());
    std::partial_sum(steps.begin(), steps.end(), walk.begin());
    const auto diffed = prepare_stationary(walk, 0.01);
    CHECK(diffed.report.differenced);
    CHECK_FALSE(diffed.report.excluded);
    REQUIRE(diffed.values.size() == walk.size() - 1);
    CHECK(diffed.values[10] == doctest::Approx(steps[11]).epsilon(1e-9));

    std::vector<double> twice(walk.size());
    std::partial_sum(walk.begin(), walk.end(), twice.begin());
    const auto excluded = prepare_stationary(twice, 0.01);
    CHECK(excluded.report.differenced);
    CHECK(excluded.report.excluded);

    CHECK_THROWS_AS((void)adf_is_stationary(std::vector<double>(15, 0.0), 0.05), Error);
}

TEST_CASE("dependency graph over a planted chain") {
    std::mt19937_64 rng(8);
    const std::size_t n = 1000;
    const auto a = noise(rng, n);
    auto b = noise(rng, n);
    auto c = noise(rng, n);
    for (std::size_t t = 1; t < n; ++t) b[t] = 0.8 * a[t - 1] + 0.6 * b[t];
    for (std::size_t t = 2; t < n; ++t) c[t] = 0.8 * b[t - 2] + 0.6 * c[t];
    const auto d = noise(rng, n);

    preprocess::PreparedCatalog prepared;
    prepared.series = {uniform("A", "a", a), uniform("B", "b", b), uniform("C", "c", c), uniform("D", "d", d)};
    const std::vector<clustering::ClusterModel> models = {single("A", "a"), single("B", "b"), single("C", "c"),
                                                          single("D", "d")};
    const auto cg = ingest::parse_call_graph("caller,callee,count\nA,B,1\nC,B,1\n");
    const auto r = build_dependency_graph(models, cg, prepared, {});
    REQUIRE(r.graph.edges.size() == 2);
    CHECK(r.graph.edges[0].src() == MetricKey{"A", "a"});
    CHECK(r.graph.edges[0].dst() == MetricKey{"B", "b"});
    CHECK(r.graph.edges[0].lag_ms == 500);
    CHECK(r.graph.edges[1].src() == MetricKey{"B", "b"});
    CHECK(r.graph.edges[1].dst() == MetricKey{"C", "c"});
    CHECK(r.graph.edges[1].lag_ms == 1000);
    // D is not adjacent: never tested.
    for (const auto& t : r.tests) {
        CHECK(t.src.component != "D");
        CHECK(t.dst.component != "D");
    }
    CHECK(r.tests.size() == 4);
    for (const auto& e : r.graph.edges) CHECK(cg.adjacent(e.src_component, e.dst_component));

    // Threads do not change the result.
    const auto r4 = build_dependency_graph(models, cg, prepared, {}, 4);
    CHECK(r4.graph == r.graph);
}

TEST_CASE("pairs significant both ways are removed") {
    std::mt19937_64 rng(9);
    const std::size_t n = 1000;
    auto a = noise(rng, n);
    auto b = noise(rng, n);
    for (std::size_t t = 1; t < n; ++t) {
        const double na = a[t] + 0.7 * b[t - 1];
        const double nb = b[t] + 0.7 * a[t - 1];
        a[t] = na;
        b[t] = nb;
    }
    preprocess::PreparedCatalog prepared;
    prepared.series = {uniform("A", "a", a), uniform("B", "b", b)};
    const std::vector<clustering::ClusterModel> models = {single("A", "a"), single("B", "b")};
    const auto cg = ingest::parse_call_graph("caller,callee,count\nA,B,1\n");
    const auto r = build_dependency_graph(models, cg, prepared, {});
    CHECK(r.graph.empty());
    CHECK(r.bidirectional_removed.size() == 1);
}

TEST_CASE("missing model is an error") {
    preprocess::PreparedCatalog prepared;
    const std::vector<clustering::ClusterModel> models = {single("A", "a")};
    const auto cg = ingest::parse_call_graph("caller,callee,count\nA,B,1\n");
    CHECK_THROWS_AS((void)build_dependency_graph(models, cg, prepared, {}), Error);
}
