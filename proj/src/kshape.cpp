#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sift/clustering.hpp"

namespace sift::clustering {

namespace {

constexpr std::size_t kPowerIterations = 200;
constexpr double kPowerTolerance = 1e-9;

bool is_zero(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

bool normalize_in_place(std::vector<double>& v) {
    const double norm = std::sqrt(dot(v, v));
    if (!(norm > 0.0)) return false;
    for (auto& x : v) x /= norm;
    return true;
}

void center_in_place(std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (auto& x : v) x -= mean;
}

/// z-normalizes when possible; zero-filled shifts of a short pulse can become constant.
std::vector<double> znorm_or_zero(std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*lo == *hi) return std::vector<double>(v.size(), 0.0);
    return preprocess::znormalize(v);
}

std::vector<double> medoid(std::span<const std::vector<double>> members, const CrossCorrelator& correlator) {
    std::vector<Spectrum> spectra;
    spectra.reserve(members.size());
    for (const auto& m : members) spectra.push_back(correlator.transform(m));
    std::size_t best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (!(spectra[i].energy > 0.0)) continue;
        double cost = 0.0;
        for (std::size_t j = 0; j < members.size(); ++j) {
            if (i != j && spectra[j].energy > 0.0) cost += correlator.sbd(spectra[i], spectra[j]).distance;
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = i;
        }
    }
    return members[best];
}

}  // namespace

std::vector<double> extract_shape(std::span<const std::vector<double>> members, std::span<const double> reference,
                                  const CrossCorrelator& correlator) {
    const std::size_t m = correlator.length();
    if (members.empty()) return std::vector<double>(m, 0.0);

    const bool have_reference = !is_zero(reference);
    const Spectrum ref_spec = have_reference ? correlator.transform(reference) : Spectrum{};
    std::vector<std::vector<double>> aligned;
    aligned.reserve(members.size());
    for (const auto& x : members) {
        if (have_reference) {
            const auto w = correlator.sbd(ref_spec, correlator.transform(x)).shift;
            aligned.push_back(znorm_or_zero(shift_series(x, -w)));
        } else {
            aligned.push_back(x);
        }
    }

    // Power iteration on M = Q S Q, S = sum_i a_i a_i^T, Q = I - 11^T / m; M is never materialized.
    std::vector<double> start(m, 0.0);
    if (have_reference) {
        start.assign(reference.begin(), reference.end());
    } else {
        for (const auto& a : aligned) {
            for (std::size_t t = 0; t < m; ++t) start[t] += a[t];
        }
    }
    center_in_place(start);
    if (!normalize_in_place(start)) {
        start = aligned.front();
        center_in_place(start);
        if (!normalize_in_place(start)) return medoid(members, correlator);
    }

    std::vector<double> v = start;
    std::vector<double> next(m);
    bool converged = false;
    for (std::size_t it = 0; it < kPowerIterations; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        std::vector<double> qv = v;
        center_in_place(qv);
        for (const auto& a : aligned) {
            const double c = dot(a, qv);
            for (std::size_t t = 0; t < m; ++t) next[t] += c * a[t];
        }
        center_in_place(next);
        if (!normalize_in_place(next)) break;
        double delta = 0.0;
        for (std::size_t t = 0; t < m; ++t) delta += (next[t] - v[t]) * (next[t] - v[t]);
        v.swap(next);
        if (std::sqrt(delta) < kPowerTolerance) {
            converged = true;
            break;
        }
    }
    if (!converged) return medoid(members, correlator);

    // Orient towards the previous centroid, or towards the members on the first pass.
    double orientation = have_reference ? dot(v, reference) : 0.0;
    if (orientation == 0.0) {
        for (const auto& a : aligned) orientation += dot(v, a);
    }
    if (orientation < 0.0) {
        for (auto& x : v) x = -x;
    }
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*lo == *hi) return medoid(members, correlator);
    return preprocess::znormalize(v);
}

KShapeResult kshape(std::span<const std::vector<double>> series, std::size_t k, std::vector<int> initial,
                    std::size_t max_iterations) {
    const std::size_t n = series.size();
    if (k == 0) throw Error("k-Shape: k must be >= 1");
    if (k > n) throw Error("k-Shape: k=" + std::to_string(k) + " exceeds " + std::to_string(n) + " series");
    if (initial.size() != n) throw Error("k-Shape: initial assignment has wrong size");
    const std::size_t m = series.front().size();
    for (const auto& s : series) {
        if (s.size() != m) throw Error("k-Shape: series lengths differ");
    }
    for (int l : initial) {
        if (l < 0 || static_cast<std::size_t>(l) >= k) throw Error("k-Shape: initial label out of range");
    }

    const CrossCorrelator correlator(m);
    std::vector<Spectrum> spectra(n);
    for (std::size_t i = 0; i < n; ++i) spectra[i] = correlator.transform(series[i]);

    KShapeResult result;
    result.labels = std::move(initial);
    result.centroids.assign(k, std::vector<double>(m, 0.0));
    std::vector<double> fit(n, 0.0);  // SBD of each series to its own centroid

    // Moves the worst-fitting series (from clusters with >1 member) into each empty cluster.
    auto repair_empty = [&](std::vector<int>& labels, bool seed_centroid) {
        for (std::size_t j = 0; j < k; ++j) {
            std::vector<std::size_t> counts(k, 0);
            for (int l : labels) ++counts[static_cast<std::size_t>(l)];
            if (counts[j] > 0) continue;
            std::size_t worst = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[static_cast<std::size_t>(labels[i])] < 2) continue;
                if (worst == n || fit[i] > fit[worst]) worst = i;
            }
            labels[worst] = static_cast<int>(j);
            fit[worst] = 0.0;
            if (seed_centroid) result.centroids[j] = series[worst];
        }
    };
    repair_empty(result.labels, false);

    std::vector<std::vector<double>> members;
    for (std::size_t iter = 1; iter <= max_iterations; ++iter) {
        result.iterations = iter;
        const auto previous = result.labels;

        for (std::size_t j = 0; j < k; ++j) {
            members.clear();
            for (std::size_t i = 0; i < n; ++i) {
                if (result.labels[i] == static_cast<int>(j)) members.push_back(series[i]);
            }
            result.centroids[j] = extract_shape(members, result.centroids[j], correlator);
        }

        std::vector<Spectrum> centroid_spectra(k);
        for (std::size_t j = 0; j < k; ++j) centroid_spectra[j] = correlator.transform(result.centroids[j]);
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_j = result.labels[i];
            for (std::size_t j = 0; j < k; ++j) {
                if (!(centroid_spectra[j].energy > 0.0)) continue;
                const double d = correlator.sbd(centroid_spectra[j], spectra[i]).distance;
                if (d < best) {
                    best = d;
                    best_j = static_cast<int>(j);
                }
            }
            result.labels[i] = best_j;
            fit[i] = best;
        }
        repair_empty(result.labels, true);

        if (result.labels == previous) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace sift::clustering
