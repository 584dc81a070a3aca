#include "sift/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sift::evaluate {

namespace {

double entropy(const std::vector<double>& counts, double n) {
    double h = 0.0;
    for (double c : counts) {
        if (c > 0.0) h -= (c / n) * std::log(c / n);
    }
    return h;
}

/// E[MI] under the hypergeometric model of random partitions with fixed marginals.
double expected_mi(const std::vector<double>& a, const std::vector<double>& b, double n) {
    const auto ln_fact = [](double x) { return std::lgamma(x + 1.0); };
    double emi = 0.0;
    for (double ai : a) {
        for (double bj : b) {
            const double lo = std::max(1.0, ai + bj - n);
            const double hi = std::min(ai, bj);
            for (double nij = lo; nij <= hi; nij += 1.0) {
                const double term = (nij / n) * std::log(n * nij / (ai * bj));
                const double log_p = ln_fact(ai) + ln_fact(bj) + ln_fact(n - ai) + ln_fact(n - bj) - ln_fact(n) -
                                     ln_fact(nij) - ln_fact(ai - nij) - ln_fact(bj - nij) -
                                     ln_fact(n - ai - bj + nij);
                emi += term * std::exp(log_p);
            }
        }
    }
    return emi;
}

}  // namespace

double ami(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw Error("ami: label vectors differ in length");
    if (a.empty()) throw Error("ami: no items");
    std::map<int, std::size_t> ia;
    std::map<int, std::size_t> ib;
    for (int l : a) ia.emplace(l, ia.size());
    for (int l : b) ib.emplace(l, ib.size());
    std::vector<std::vector<double>> table(ia.size(), std::vector<double>(ib.size(), 0.0));
    std::vector<double> ra(ia.size(), 0.0);
    std::vector<double> rb(ib.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto x = ia.at(a[i]);
        const auto y = ib.at(b[i]);
        table[x][y] += 1.0;
        ra[x] += 1.0;
        rb[y] += 1.0;
    }
    const double n = static_cast<double>(a.size());
    // Both trivial (one cluster each, or every item alone in both): perfect agreement.
    if ((ra.size() == 1 && rb.size() == 1) || (ra.size() == a.size() && rb.size() == a.size())) return 1.0;

    double mi = 0.0;
    for (std::size_t x = 0; x < ra.size(); ++x) {
        for (std::size_t y = 0; y < rb.size(); ++y) {
            const double nij = table[x][y];
            if (nij > 0.0) mi += (nij / n) * std::log(n * nij / (ra[x] * rb[y]));
        }
    }
    const double emi = expected_mi(ra, rb, n);
    const double normalizer = 0.5 * (entropy(ra, n) + entropy(rb, n));
    double denom = normalizer - emi;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (std::abs(denom) < eps) denom = denom < 0.0 ? -eps : eps;
    return (mi - emi) / denom;
}

double ami(const LabelAssignment& a, const LabelAssignment& b) {
    if (a.size() != b.size()) throw Error("ami: item sets differ");
    std::vector<int> la;
    std::vector<int> lb;
    for (const auto& [item, label] : a) {
        const auto it = b.find(item);
        if (it == b.end()) throw Error("ami: item sets differ (" + item + ")");
        la.push_back(label);
        lb.push_back(it->second);
    }
    return ami(la, lb);
}

LabelAssignment labels_of(const clustering::ClusterModel& model) {
    LabelAssignment out;
    for (const auto& c : model.clusters) {
        for (const auto& m : c.members) out[m] = c.id;
    }
    return out;
}

Prf edge_prf(const DependencyGraph& truth, const DependencyGraph& inferred) {
    const auto t = truth.component_pairs();
    const auto i = inferred.component_pairs();
    std::size_t hit = 0;
    for (const auto& p : i) hit += t.contains(p) ? 1 : 0;
    Prf out;
    out.precision = i.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(i.size());
    out.recall = t.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(t.size());
    const double s = out.precision + out.recall;
    out.f1 = s > 0.0 ? 2.0 * out.precision * out.recall / s : 0.0;
    return out;
}

double reduction_ratio(std::size_t metrics, std::size_t representatives) {
    if (representatives == 0) throw Error("reduction_ratio: no representatives");
    return static_cast<double>(metrics) / static_cast<double>(representatives);
}

double reduction_ratio(const std::map<std::string, std::set<std::string>>& catalog,
                       std::span<const clustering::ClusterModel> models) {
    std::size_t metrics = 0;
    for (const auto& [comp, names] : catalog) metrics += names.size();
    std::size_t reps = 0;
    for (const auto& m : models) reps += m.clusters.size();
    for (const auto& [comp, names] : catalog) {
        const bool covered = std::any_of(models.begin(), models.end(), [&](const auto& m) { return m.component == comp; });
        if (!covered) throw Error("reduction_ratio: no cluster model for component " + comp);
    }
    return reduction_ratio(metrics, reps);
}

}  // namespace sift::evaluate
