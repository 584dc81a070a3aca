#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>

#include "sift/clustering.hpp"
#include "sift/parallel.hpp"

namespace sift::clustering {

namespace {

// FFTW planning is not thread-safe; execution with the new-array API is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t next_pow2(std::size_t v) {
    std::size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

struct RealBuffer {
    explicit RealBuffer(std::size_t n) : data(fftw_alloc_real(n)) {
        if (data == nullptr) throw std::bad_alloc();
    }
    ~RealBuffer() { fftw_free(data); }
    RealBuffer(const RealBuffer&) = delete;
    RealBuffer& operator=(const RealBuffer&) = delete;
    double* data;
};

struct ComplexBuffer {
    explicit ComplexBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
        if (data == nullptr) throw std::bad_alloc();
    }
    ~ComplexBuffer() { fftw_free(data); }
    ComplexBuffer(const ComplexBuffer&) = delete;
    ComplexBuffer& operator=(const ComplexBuffer&) = delete;
    fftw_complex* data;
};

}  // namespace

struct CrossCorrelator::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

CrossCorrelator::CrossCorrelator(std::size_t length)
    : n_(length), fft_n_(next_pow2(2 * length - 1)), plans_(std::make_unique<Plans>()) {
    if (length < 2) throw Error("cross-correlation needs series of length >= 2");
    RealBuffer real(fft_n_);
    ComplexBuffer spec(fft_n_ / 2 + 1);
    std::lock_guard lock(planner_mutex());
    const int n = static_cast<int>(fft_n_);
    plans_->forward = fftw_plan_dft_r2c_1d(n, real.data, spec.data, FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_c2r_1d(n, spec.data, real.data, FFTW_ESTIMATE);
    if (plans_->forward == nullptr || plans_->backward == nullptr) throw Error("FFT planning failed");
}

CrossCorrelator::~CrossCorrelator() {
    std::lock_guard lock(planner_mutex());
    if (plans_->forward != nullptr) fftw_destroy_plan(plans_->forward);
    if (plans_->backward != nullptr) fftw_destroy_plan(plans_->backward);
}

Spectrum CrossCorrelator::transform(std::span<const double> x) const {
    if (x.size() != n_) throw Error("cross-correlation: length mismatch");
    RealBuffer real(fft_n_);
    ComplexBuffer spec(fft_n_ / 2 + 1);
    std::fill(real.data, real.data + fft_n_, 0.0);
    std::copy(x.begin(), x.end(), real.data);
    fftw_execute_dft_r2c(plans_->forward, real.data, spec.data);

    Spectrum out;
    out.bins.resize(fft_n_ / 2 + 1);
    for (std::size_t k = 0; k < out.bins.size(); ++k) out.bins[k] = {spec.data[k][0], spec.data[k][1]};
    for (double v : x) out.energy += v * v;
    return out;
}

std::vector<double> CrossCorrelator::cross_correlation(const Spectrum& x, const Spectrum& y) const {
    const std::size_t bins = fft_n_ / 2 + 1;
    if (x.bins.size() != bins || y.bins.size() != bins) throw Error("cross-correlation: spectrum size mismatch");
    ComplexBuffer spec(bins);
    RealBuffer real(fft_n_);
    for (std::size_t k = 0; k < bins; ++k) {
        const auto p = std::conj(x.bins[k]) * y.bins[k];
        spec.data[k][0] = p.real();
        spec.data[k][1] = p.imag();
    }
    fftw_execute_dft_c2r(plans_->backward, spec.data, real.data);

    const double scale = 1.0 / static_cast<double>(fft_n_);
    std::vector<double> cc(2 * n_ - 1);
    const auto lag0 = static_cast<std::ptrdiff_t>(n_ - 1);
    for (std::ptrdiff_t w = -lag0; w <= lag0; ++w) {
        const std::size_t src = w >= 0 ? static_cast<std::size_t>(w) : fft_n_ - static_cast<std::size_t>(-w);
        cc[static_cast<std::size_t>(w + lag0)] = real.data[src] * scale;
    }
    return cc;
}

SbdResult CrossCorrelator::sbd(const Spectrum& x, const Spectrum& y) const {
    if (!(x.energy > 0.0) || !(y.energy > 0.0)) throw DegenerateSeriesError("SBD of a zero series");
    const auto cc = cross_correlation(x, y);
    const double denom = std::sqrt(x.energy * y.energy);
    const auto lag0 = static_cast<int>(n_ - 1);

    // Visit w = 0, 1, -1, 2, -2, ... so the first maximum has the smallest |w|.
    int best_w = 0;
    double best = cc[static_cast<std::size_t>(lag0)];
    for (int m = 1; m <= lag0; ++m) {
        for (int w : {m, -m}) {
            const double v = cc[static_cast<std::size_t>(w + lag0)];
            if (v > best) {
                best = v;
                best_w = w;
            }
        }
    }
    return {std::clamp(1.0 - best / denom, 0.0, 2.0), best_w};
}

SbdResult sbd(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("SBD: length mismatch");
    if (x.size() < 2) throw Error("SBD: series must have length >= 2");
    for (auto s : {x, y}) {
        const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
        if (*lo == *hi) throw DegenerateSeriesError("SBD: constant input");
    }
    const CrossCorrelator cc(x.size());
    return cc.sbd(cc.transform(x), cc.transform(y));
}

std::vector<double> shift_series(std::span<const double> x, int w) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    std::vector<double> out(x.size(), 0.0);
    for (std::ptrdiff_t t = 0; t < n; ++t) {
        const std::ptrdiff_t src = t - w;
        if (src >= 0 && src < n) out[static_cast<std::size_t>(t)] = x[static_cast<std::size_t>(src)];
    }
    return out;
}

std::vector<double> sbd_matrix(std::span<const std::vector<double>> series, unsigned threads) {
    const std::size_t n = series.size();
    std::vector<double> d(n * n, 0.0);
    if (n < 2) return d;
    const CrossCorrelator cc(series.front().size());
    std::vector<Spectrum> spectra(n);
    parallel_for(n, threads, [&](std::size_t i) { spectra[i] = cc.transform(series[i]); });
    parallel_for(n, threads, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = cc.sbd(spectra[i], spectra[j]).distance;
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    });
    return d;
}

}  // namespace sift::clustering
