#include <algorithm>
#include <limits>
#include <numeric>

#include "sift/clustering.hpp"

namespace sift::clustering {

double jaro(std::string_view a, std::string_view b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;

    const std::size_t window = std::max(a.size(), b.size()) / 2 > 0 ? std::max(a.size(), b.size()) / 2 - 1 : 0;
    std::vector<bool> a_match(a.size(), false), b_match(b.size(), false);
    std::size_t matches = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::size_t lo = i > window ? i - window : 0;
        const std::size_t hi = std::min(b.size(), i + window + 1);
        for (std::size_t j = lo; j < hi; ++j) {
            if (!b_match[j] && a[i] == b[j]) {
                a_match[i] = b_match[j] = true;
                ++matches;
                break;
            }
        }
    }
    if (matches == 0) return 0.0;

    std::size_t out_of_order = 0;
    for (std::size_t i = 0, j = 0; i < a.size(); ++i) {
        if (!a_match[i]) continue;
        while (!b_match[j]) ++j;
        if (a[i] != b[j]) ++out_of_order;
        ++j;
    }
    const double m = static_cast<double>(matches);
    const double t = static_cast<double>(out_of_order) / 2.0;
    return (m / static_cast<double>(a.size()) + m / static_cast<double>(b.size()) + (m - t) / m) / 3.0;
}

std::vector<int> initial_assignment_by_name(std::span<const std::string> names, std::size_t k) {
    const std::size_t n = names.size();
    if (k == 0) throw Error("name pre-clustering: k must be >= 1");
    if (k > n) {
        throw Error("name pre-clustering: k=" + std::to_string(k) + " exceeds " + std::to_string(n) + " metrics");
    }

    // Sum of pairwise similarities between groups; average = sum / (|A| |B|).
    std::vector<double> sum(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            sum[i * n + j] = sum[j * n + i] = jaro(names[i], names[j]);
        }
    }
    std::vector<std::size_t> size(n, 1);
    std::vector<bool> alive(n, true);
    std::vector<std::string> min_name(names.begin(), names.end());
    std::vector<std::size_t> group(n);
    std::iota(group.begin(), group.end(), 0);

    for (std::size_t groups = n; groups > k; --groups) {
        std::size_t best_a = n, best_b = n;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < n; ++a) {
            if (!alive[a]) continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!alive[b]) continue;
                const double avg = sum[a * n + b] / static_cast<double>(size[a] * size[b]);
                bool take = avg > best;
                if (!take && avg == best) {
                    // Lexicographic tie-break on the groups' smallest member names.
                    auto key = [&](std::size_t x, std::size_t y) {
                        return std::minmax(min_name[x], min_name[y]);
                    };
                    take = key(a, b) < key(best_a, best_b);
                }
                if (take) {
                    best = avg;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        // Merge best_b into best_a.
        for (std::size_t c = 0; c < n; ++c) {
            if (!alive[c] || c == best_a || c == best_b) continue;
            const double merged = sum[best_a * n + c] + sum[best_b * n + c];
            sum[best_a * n + c] = sum[c * n + best_a] = merged;
        }
        size[best_a] += size[best_b];
        alive[best_b] = false;
        min_name[best_a] = std::min(min_name[best_a], min_name[best_b]);
        for (auto& g : group) {
            if (g == best_b) g = best_a;
        }
    }

    // Number groups by their smallest member name.
    std::vector<std::size_t> roots;
    for (std::size_t a = 0; a < n; ++a) {
        if (alive[a]) roots.push_back(a);
    }
    std::sort(roots.begin(), roots.end(), [&](std::size_t x, std::size_t y) { return min_name[x] < min_name[y]; });
    std::vector<int> label_of_root(n, -1);
    for (std::size_t i = 0; i < roots.size(); ++i) label_of_root[roots[i]] = static_cast<int>(i);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = label_of_root[group[i]];
    return labels;
}

}  // namespace sift::clustering
