#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "sift/clustering.hpp"
#include "sift/parallel.hpp"

namespace sift::clustering {

void ClusteringConfig::validate() const {
    if (k_min < 1 || k_min > k_max) throw Error("clustering: require 1 <= k_min <= k_max");
    if (max_iterations < 1) throw Error("clustering: max_iterations must be >= 1");
}

int ClusterModel::cluster_of(const std::string& metric) const {
    for (const auto& c : clusters) {
        if (std::binary_search(c.members.begin(), c.members.end(), metric)) return c.id;
    }
    return -1;
}

const Cluster* ClusterModel::find_cluster(int id) const {
    for (const auto& c : clusters) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

std::vector<std::string> ClusterModel::representatives() const {
    std::vector<std::string> out;
    out.reserve(clusters.size());
    for (const auto& c : clusters) out.push_back(c.representative);
    return out;
}

double silhouette(std::span<const double> distances, std::span<const int> labels) {
    const std::size_t n = labels.size();
    if (distances.size() != n * n) throw Error("silhouette: distance matrix has wrong size");
    if (n == 0) return 0.0;
    const int k = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];

    double total = 0.0;
    std::vector<double> sums(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) {
        const auto own = static_cast<std::size_t>(labels[i]);
        if (counts[own] < 2) continue;  // singleton: 0
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sums[static_cast<std::size_t>(labels[j])] += distances[i * n + j];
        }
        const double a = sums[own] / static_cast<double>(counts[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < sums.size(); ++c) {
            if (c != own && counts[c] > 0) b = std::min(b, sums[c] / static_cast<double>(counts[c]));
        }
        if (!std::isfinite(b)) continue;  // only one cluster
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

namespace {

std::vector<int> random_assignment(std::size_t n, std::size_t k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> labels(n);
    for (auto& l : labels) l = static_cast<int>(rng() % k);
    return labels;
}

/// k-means++ style seeding on a precomputed distance matrix; each series joins its nearest seed.
std::vector<int> seeded_assignment(std::span<const double> distances, std::size_t n, std::size_t k,
                                   std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> centers{static_cast<std::size_t>(rng() % n)};
    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = distances[i * n + centers[0]];
    while (centers.size() < k) {
        std::vector<double> weights(n);
        for (std::size_t i = 0; i < n; ++i) weights[i] = nearest[i] * nearest[i];
        std::size_t next = 0;
        if (std::accumulate(weights.begin(), weights.end(), 0.0) > 0.0) {
            std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
            next = pick(rng);
        } else {
            // every point coincides with a seed: take the first unused index
            while (std::find(centers.begin(), centers.end(), next) != centers.end()) ++next;
        }
        centers.push_back(next);
        for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], distances[i * n + next]);
    }
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < k; ++c) {
            if (distances[i * n + centers[c]] < distances[i * n + centers[best]]) best = c;
        }
        labels[i] = static_cast<int>(best);
    }
    for (std::size_t c = 0; c < k; ++c) labels[centers[c]] = static_cast<int>(c);
    return labels;
}

/// Builds clusters from labels; ids are renumbered by each cluster's smallest member name.
std::vector<Cluster> make_clusters(std::span<const std::string> names, const KShapeResult& res) {
    std::map<int, Cluster> by_label;
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto& c = by_label[res.labels[i]];
        c.members.push_back(names[i]);
    }
    std::vector<Cluster> clusters;
    for (auto& [label, c] : by_label) {
        std::sort(c.members.begin(), c.members.end());
        c.centroid = res.centroids[static_cast<std::size_t>(label)];
        clusters.push_back(std::move(c));
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const Cluster& a, const Cluster& b) { return a.members.front() < b.members.front(); });
    for (std::size_t i = 0; i < clusters.size(); ++i) clusters[i].id = static_cast<int>(i);
    return clusters;
}

}  // namespace

ClusterModel representatives(ClusterModel model, std::span<const preprocess::UniformSeries* const> series,
                             double validity_threshold) {
    std::map<std::string, const preprocess::UniformSeries*> by_name;
    for (const auto* s : series) by_name[s->metric] = s;

    for (auto& c : model.clusters) {
        if (c.members.empty()) throw Error("cluster " + std::to_string(c.id) + " has no members");
        const CrossCorrelator correlator(c.centroid.size());
        const auto centroid = correlator.transform(c.centroid);
        double best = std::numeric_limits<double>::infinity();
        c.max_sbd_to_centroid = 0.0;
        c.validity_violations.clear();
        std::vector<std::string> sorted = c.members;
        std::sort(sorted.begin(), sorted.end());
        for (const auto& name : sorted) {
            const auto it = by_name.find(name);
            if (it == by_name.end()) throw Error("representatives: no series for member " + name);
            const auto z = preprocess::znormalize(std::span<const double>(it->second->values));
            const double d = correlator.sbd(centroid, correlator.transform(z)).distance;
            if (d < best) {
                best = d;
                c.representative = name;
            }
            c.max_sbd_to_centroid = std::max(c.max_sbd_to_centroid, d);
            if (d > validity_threshold) c.validity_violations.push_back(name);
        }
    }
    return model;
}

ClusterModel select_k(const std::string& component, std::span<const preprocess::UniformSeries* const> series,
                      const ClusteringConfig& cfg) {
    cfg.validate();
    if (series.empty()) throw Error("select_k: component " + component + " has no series");

    std::vector<const preprocess::UniformSeries*> ordered(series.begin(), series.end());
    std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) { return a->metric < b->metric; });
    const std::size_t n = ordered.size();
    std::vector<std::string> names(n);
    std::vector<std::vector<double>> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        names[i] = ordered[i]->metric;
        z[i] = preprocess::znormalize(std::span<const double>(ordered[i]->values));
        if (z[i].size() != z.front().size()) throw Error("select_k: series lengths differ in " + component);
    }

    ClusterModel model;
    model.component = component;
    const std::size_t k_hi = std::min(cfg.k_max, n - 1);

    if (n == 1 || cfg.k_min > k_hi) {
        // Too few series to compare partitions: a single cluster.
        KShapeResult single;
        single.labels.assign(n, 0);
        const CrossCorrelator correlator(z.front().size());
        single.centroids = {n == 1 ? z.front() : extract_shape(z, std::vector<double>(z.front().size(), 0.0), correlator)};
        single.converged = true;
        model.clusters = make_clusters(names, single);
        model.k = 1;
        model.silhouette = n == 1 ? 1.0 : 0.0;
        return representatives(std::move(model), ordered, cfg.validity_threshold);
    }

    const auto distances = sbd_matrix(z, 1);
    double best_score = -std::numeric_limits<double>::infinity();
    KShapeResult best;
    for (std::size_t k = cfg.k_min; k <= k_hi; ++k) {
        const auto base = mix_seed(cfg.seed, fnv1a(component) ^ k);
        for (std::size_t r = 0; r <= cfg.restarts; ++r) {
            auto init = r == 0 ? (cfg.name_init ? initial_assignment_by_name(names, k) : random_assignment(n, k, base))
                               : seeded_assignment(distances, n, k, mix_seed(base, r));
            auto res = kshape(z, k, std::move(init), cfg.max_iterations);
            const double score = silhouette(distances, res.labels);
            if (score > best_score) {
                best_score = score;
                best = std::move(res);
            }
        }
    }
    model.clusters = make_clusters(names, best);
    model.k = model.clusters.size();
    model.silhouette = best_score;
    model.converged = best.converged;
    return representatives(std::move(model), ordered, cfg.validity_threshold);
}

std::vector<ClusterModel> cluster_catalog(const preprocess::PreparedCatalog& prepared, const ClusteringConfig& cfg,
                                          unsigned threads) {
    const auto groups = prepared.by_component();
    std::vector<std::pair<std::string, std::vector<const preprocess::UniformSeries*>>> work(groups.begin(),
                                                                                           groups.end());
    std::vector<ClusterModel> models(work.size());
    parallel_for(work.size(), threads,
                 [&](std::size_t i) { models[i] = select_k(work[i].first, work[i].second, cfg); });
    return models;
}

}  // namespace sift::clustering
