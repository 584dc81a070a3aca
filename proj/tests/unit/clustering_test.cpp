#include <cmath>
#include <map>
#include <random>

#include "../oracles.hpp"
#include "doctest.h"
#include "sift/clustering.hpp"
#include "sift/evaluate.hpp"

using namespace sift;
using namespace sift::clustering;

namespace {

std::vector<double> z(const std::vector<double>& v) { return preprocess::znormalize(std::span<const double>(v)); }

std::vector<double> noise(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

}  // namespace

TEST_CASE("sbd of a series with itself is zero") {
    std::mt19937_64 rng(1);
    const auto x = z(noise(rng, 100));
    const auto r = sbd(x, x);
    CHECK(std::abs(r.distance) < 1e-9);
    CHECK(r.shift == 0);
}

TEST_CASE("sbd of a one-step shifted pulse") {
    // Zero-padded correlation loses one sample of overlap: NCC_1 = 11/12.
    const auto x = z({0, 1, 0, 0});
    const auto y = z({0, 0, 1, 0});
    const auto r = sbd(x, y);
    CHECK(r.distance == doctest::Approx(1.0 - 11.0 / 12.0).epsilon(1e-12));
    CHECK(r.shift == 1);
    CHECK(r.distance == doctest::Approx(oracle::sbd_brute(x, y)).epsilon(1e-12));
    CHECK(oracle::ncc_brute(x, y).shift == 1);
    CHECK(sbd(y, x).shift == -1);
}

TEST_CASE("sbd preconditions") {
    CHECK_THROWS_AS((void)sbd(std::vector<double>{1, 2, 3}, std::vector<double>{1, 1, 1}), DegenerateSeriesError);
    CHECK_THROWS_AS((void)sbd(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("sbd matches brute-force NCC including the shift") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 60; ++i) {
        const std::size_t n = 5 + static_cast<std::size_t>(i) * 3;
        const auto x = z(noise(rng, n));
        auto y = noise(rng, n);
        const auto lagged = shift_series(x, i % 7 - 3);
        for (std::size_t t = 0; t < n; ++t) y[t] = 0.3 * y[t] + lagged[t];
        const auto yz = z(y);
        const auto got = sbd(x, yz);
        const auto want = oracle::ncc_brute(x, yz);
        CHECK(std::abs(got.distance - (1.0 - want.value)) < 1e-9);
        CHECK(got.shift == want.shift);
        CHECK(got.distance >= 0.0);
        CHECK(got.distance <= 2.0 + 1e-9);
        CHECK(std::abs(sbd(yz, x).distance - got.distance) < 1e-9);
    }
}

TEST_CASE("shift_series fills with zeros") {
    const std::vector<double> x = {1, 2, 3, 4};
    CHECK(shift_series(x, 1) == std::vector<double>{0, 1, 2, 3});
    CHECK(shift_series(x, -2) == std::vector<double>{3, 4, 0, 0});
    CHECK(shift_series(x, 0) == x);
}

TEST_CASE("jaro similarity") {
    CHECK(jaro("cpu_usage", "cpu_usage") == 1.0);
    CHECK(jaro("MARTHA", "MARHTA") == doctest::Approx(17.0 / 18.0).epsilon(1e-12));
    CHECK(jaro("abc", "xyz") == 0.0);
    CHECK(jaro("", "") == 1.0);
    CHECK(jaro("", "a") == 0.0);
    // DIXON / DICKSONX: m = 4, t = 0.
    CHECK(jaro("DIXON", "DICKSONX") == doctest::Approx((4.0 / 5 + 4.0 / 8 + 1.0) / 3.0).epsilon(1e-12));
}

TEST_CASE("name-based initial assignment") {
    const std::vector<std::string> names = {"cpu_usage", "cpu_usage_pct", "net_in", "net_out"};
    const auto l = initial_assignment_by_name(names, 2);
    CHECK(l[0] == l[1]);
    CHECK(l[2] == l[3]);
    CHECK(l[0] != l[2]);
    CHECK(l[0] == 0);
    const auto each = initial_assignment_by_name(names, 4);
    CHECK(each == std::vector<int>{0, 1, 2, 3});
    CHECK_THROWS_AS((void)initial_assignment_by_name(names, 5), Error);
}

TEST_CASE("k-shape separates two distinct shapes") {
    const std::size_t n = 64;
    std::vector<std::vector<double>> series;
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 0.05);
    for (int i = 0; i < 6; ++i) {
        std::vector<double> s(n);
        for (std::size_t t = 0; t < n; ++t) s[t] = std::sin(2.0 * M_PI * static_cast<double>(t) / 32.0) + g(rng);
        series.push_back(z(s));
    }
    for (int i = 0; i < 6; ++i) {
        std::vector<double> s(n);
        for (std::size_t t = 0; t < n; ++t) s[t] = (t >= 20 && t < 28 ? 1.0 : 0.0) + g(rng);
        series.push_back(z(s));
    }
    std::vector<int> init(12);
    for (std::size_t i = 0; i < 12; ++i) init[i] = static_cast<int>(i % 2);
    const auto r = kshape(series, 2, init, 100);
    CHECK(r.converged);
    for (int i = 1; i < 6; ++i) CHECK(r.labels[static_cast<std::size_t>(i)] == r.labels[0]);
    for (int i = 7; i < 12; ++i) CHECK(r.labels[static_cast<std::size_t>(i)] == r.labels[6]);
    CHECK(r.labels[0] != r.labels[6]);

    // The partition is the one exhaustive SBD reasoning predicts: within-group distances are below all cross-group ones.
    double within = 0.0, across = 2.0;
    for (std::size_t i = 0; i < 12; ++i) {
        for (std::size_t j = i + 1; j < 12; ++j) {
            const double d = oracle::sbd_brute(series[i], series[j]);
            if ((i < 6) == (j < 6)) within = std::max(within, d);
            else across = std::min(across, d);
        }
    }
    CHECK(within < across);
}

TEST_CASE("k equal to n puts every series alone") {
    std::mt19937_64 rng(6);
    std::vector<std::vector<double>> series;
    for (int i = 0; i < 5; ++i) series.push_back(z(noise(rng, 32)));
    const auto r = kshape(series, 5, {0, 1, 2, 3, 4}, 20);
    const CrossCorrelator cc(32);
    for (std::size_t i = 0; i < 5; ++i) {
        const auto c = cc.transform(r.centroids[static_cast<std::size_t>(r.labels[i])]);
        CHECK(cc.sbd(c, cc.transform(series[i])).distance < 1e-9);
    }
}

TEST_CASE("silhouette matches the brute-force definition") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 12;
        std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = u(rng);
        }
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>((i * 7 + static_cast<std::size_t>(trial)) % 3);
        labels[0] = 3;  // a singleton
        std::vector<double> flat;
        for (const auto& row : d) flat.insert(flat.end(), row.begin(), row.end());
        CHECK(silhouette(flat, labels) == doctest::Approx(oracle::silhouette(d, labels)).epsilon(1e-12));
    }
}

TEST_CASE("representative is the member closest to the centroid") {
    std::mt19937_64 rng(8);
    const std::size_t n = 50;
    const auto base = noise(rng, n);
    std::vector<preprocess::UniformSeries> store;
    for (int i = 0; i < 5; ++i) {
        auto v = base;
        std::normal_distribution<double> g(0.0, 0.1 + 0.1 * i);
        for (auto& x : v) x += g(rng);
        store.push_back({"c", "m" + std::to_string(i), 0, 500, v});
    }
    std::vector<const preprocess::UniformSeries*> ptrs;
    for (const auto& s : store) ptrs.push_back(&s);
    ClusterModel m;
    m.component = "c";
    Cluster c;
    for (const auto& s : store) c.members.push_back(s.metric);
    c.centroid = z(base);
    m.clusters = {c};
    m.k = 1;
    const auto out = representatives(m, ptrs, 0.3);
    std::string best;
    double best_d = 3.0;
    for (const auto& s : store) {
        const double d = oracle::sbd_brute(base, s.values);
        if (d < best_d) {
            best_d = d;
            best = s.metric;
        }
    }
    CHECK(out.clusters[0].representative == best);
    CHECK(out.clusters[0].max_sbd_to_centroid <= 0.3);
    CHECK(out.clusters[0].validity_violations.empty());
}

TEST_CASE("exact copy of the centroid is chosen as representative") {
    std::mt19937_64 rng(9);
    const auto base = noise(rng, 40);
    auto noisy = base;
    for (auto& x : noisy) x += 0.2 * std::normal_distribution<double>(0.0, 1.0)(rng);
    std::vector<preprocess::UniformSeries> store = {{"c", "b_exact", 0, 500, base}, {"c", "a_noisy", 0, 500, noisy}};
    std::vector<const preprocess::UniformSeries*> ptrs = {&store[0], &store[1]};
    ClusterModel m;
    Cluster c;
    c.members = {"a_noisy", "b_exact"};
    c.centroid = z(base);
    m.clusters = {c};
    CHECK(representatives(m, ptrs).clusters[0].representative == "b_exact");
}

TEST_CASE("select_k recovers planted groups and covers every metric") {
    std::mt19937_64 rng(10);
    const std::size_t n = 200;
    std::vector<std::vector<double>> latents;
    for (int l = 0; l < 3; ++l) latents.push_back(noise(rng, n));
    std::vector<preprocess::UniformSeries> store;
    std::map<std::string, int> truth;
    for (int i = 0; i < 15; ++i) {
        auto v = latents[static_cast<std::size_t>(i % 3)];
        for (auto& x : v) x = 3.0 * x + 10.0 + 0.1 * std::normal_distribution<double>(0.0, 1.0)(rng);
        const std::string name = "metric_" + std::to_string(100 + i);
        store.push_back({"c", name, 0, 500, v});
        truth[name] = i % 3;
    }
    std::vector<const preprocess::UniformSeries*> ptrs;
    for (const auto& s : store) ptrs.push_back(&s);
    const auto m = select_k("c", ptrs, {});
    CHECK(m.k == 3);
    CHECK(evaluate::ami(evaluate::labels_of(m), truth) == doctest::Approx(1.0));
    std::size_t covered = 0;
    for (const auto& c : m.clusters) {
        covered += c.members.size();
        CHECK(std::find(c.members.begin(), c.members.end(), c.representative) != c.members.end());
        CHECK(c.centroid.size() == n);
    }
    CHECK(covered == store.size());
    CHECK(m.silhouette > 0.9);

    // Deterministic for a fixed config.
    const auto again = select_k("c", ptrs, {});
    CHECK(evaluate::labels_of(again) == evaluate::labels_of(m));
}

TEST_CASE("tiny components become a single cluster") {
    std::vector<preprocess::UniformSeries> store = {{"c", "a", 0, 500, {1, 2, 3, 1}}, {"c", "b", 0, 500, {3, 1, 2, 2}}};
    std::vector<const preprocess::UniformSeries*> ptrs = {&store[0], &store[1]};
    const auto m = select_k("c", ptrs, {});
    CHECK(m.k == 1);
    CHECK(m.clusters[0].members.size() == 2);
}
