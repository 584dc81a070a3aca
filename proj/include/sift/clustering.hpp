#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sift/preprocess.hpp"

namespace sift::clustering {

/// Shape-based distance between two series and the shift that achieves it.
struct SbdResult {
    double distance = 0.0;  ///< 1 - max_w NCC_w, in [0, 2]
    int shift = 0;          ///< maximizing w; positive means the second series lags the first
};

/// Spectrum of a zero-padded series, reusable across many SBD evaluations.
struct Spectrum {
    std::vector<std::complex<double>> bins;
    double energy = 0.0;  ///< CC_0(x, x)
};

/// FFT-based cross-correlation for series of one fixed length. Thread-safe after construction.
class CrossCorrelator {
public:
    explicit CrossCorrelator(std::size_t length);
    ~CrossCorrelator();
    CrossCorrelator(const CrossCorrelator&) = delete;
    CrossCorrelator& operator=(const CrossCorrelator&) = delete;

    [[nodiscard]] std::size_t length() const noexcept { return n_; }
    [[nodiscard]] std::size_t fft_length() const noexcept { return fft_n_; }

    [[nodiscard]] Spectrum transform(std::span<const double> x) const;

    /// CC_w(x, y) = sum_t x_t * y_{t+w} for w = -(n-1)..(n-1), zero padded.
    /// Index i of the result holds w = i - (n-1).
    [[nodiscard]] std::vector<double> cross_correlation(const Spectrum& x, const Spectrum& y) const;

    /// Throws DegenerateSeriesError when either input has zero energy.
    [[nodiscard]] SbdResult sbd(const Spectrum& x, const Spectrum& y) const;

private:
    struct Plans;
    std::size_t n_;
    std::size_t fft_n_;
    std::unique_ptr<Plans> plans_;
};

/// One-shot SBD. Requires equal lengths >= 2 and non-constant inputs.
[[nodiscard]] SbdResult sbd(std::span<const double> x, std::span<const double> y);

/// Shifts x by w positions with zero fill: out[t] = x[t - w].
[[nodiscard]] std::vector<double> shift_series(std::span<const double> x, int w);

/// Jaro similarity in [0, 1]; 1 for two empty strings.
[[nodiscard]] double jaro(std::string_view a, std::string_view b);

/// Average-linkage agglomeration on Jaro similarity down to k groups.
/// Labels are numbered by each group's smallest member name. Throws when k > names.size().
[[nodiscard]] std::vector<int> initial_assignment_by_name(std::span<const std::string> names, std::size_t k);

struct ClusteringConfig {
    std::size_t k_min = 2;
    std::size_t k_max = 7;
    std::size_t max_iterations = 100;
    std::uint64_t seed = 0;
    bool name_init = true;
    std::size_t restarts = 3;  ///< extra k-means++ seeded initializations per k
    double validity_threshold = 0.3;

    void validate() const;
};

struct KShapeResult {
    std::vector<int> labels;
    std::vector<std::vector<double>> centroids;  ///< z-normalized
    std::size_t iterations = 0;
    bool converged = false;
};

/// k-Shape over z-normalized, equal-length series starting from `initial`
/// labels in [0, k). Empty clusters are refilled with the worst-fitting series.
[[nodiscard]] KShapeResult kshape(std::span<const std::vector<double>> series, std::size_t k,
                                  std::vector<int> initial, std::size_t max_iterations);

/// Shape extraction: principal eigenvector of the centered scatter of the
/// members after aligning each to `reference` (zeros on the first pass).
[[nodiscard]] std::vector<double> extract_shape(std::span<const std::vector<double>> members,
                                                std::span<const double> reference,
                                                const CrossCorrelator& correlator);

/// Pairwise SBD matrix, row-major n*n.
[[nodiscard]] std::vector<double> sbd_matrix(std::span<const std::vector<double>> series, unsigned threads = 1);

/// Mean silhouette over all points given a precomputed dissimilarity matrix.
/// Members of singleton clusters score 0; a == b == 0 scores 0.
[[nodiscard]] double silhouette(std::span<const double> distances, std::span<const int> labels);

struct Cluster {
    int id = 0;
    std::vector<std::string> members;  ///< sorted metric names
    std::vector<double> centroid;
    std::string representative;
    double max_sbd_to_centroid = 0.0;
    std::vector<std::string> validity_violations;  ///< members with SBD to centroid above threshold
};

struct ClusterModel {
    std::string component;
    std::vector<Cluster> clusters;
    std::size_t k = 0;
    double silhouette = 0.0;
    bool converged = true;

    /// Cluster id holding `metric`, or -1.
    [[nodiscard]] int cluster_of(const std::string& metric) const;
    [[nodiscard]] const Cluster* find_cluster(int id) const;
    [[nodiscard]] std::vector<std::string> representatives() const;
};

/// Runs k-Shape for every k in [k_min, min(k_max, n-1)], from the configured
/// initialization plus `restarts` k-means++ seeded ones, and keeps the best silhouette
/// (ties -> smaller k, then earlier start). Representatives and validity are filled in.
[[nodiscard]] ClusterModel select_k(const std::string& component,
                                    std::span<const preprocess::UniformSeries* const> series,
                                    const ClusteringConfig& cfg);

/// Picks the member with minimal SBD to the centroid (ties -> smaller name)
/// and records the validity check.
[[nodiscard]] ClusterModel representatives(ClusterModel model,
                                           std::span<const preprocess::UniformSeries* const> series,
                                           double validity_threshold = 0.3);

/// Clusters every component of a prepared catalog.
[[nodiscard]] std::vector<ClusterModel> cluster_catalog(const preprocess::PreparedCatalog& prepared,
                                                        const ClusteringConfig& cfg, unsigned threads = 1);

}  // namespace sift::clustering
