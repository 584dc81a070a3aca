#include "sift/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>

#include "sift/common.hpp"

namespace sift::stats {

OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (x.rows() != y.size()) throw Error("ols: row count mismatch");
    if (x.rows() < x.cols()) throw Error("ols: fewer observations than regressors");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    OlsFit fit;
    fit.rank = qr.rank();
    fit.full_rank = fit.rank == x.cols();
    fit.beta = qr.solve(y);
    fit.rss = (y - x * fit.beta).squaredNorm();
    return fit;
}

double f_sf(double f, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0)) throw Error("f_sf: degrees of freedom must be positive");
    if (std::isnan(f)) return 1.0;
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    const boost::math::fisher_f_distribution<double> dist(d1, d2);
    return boost::math::cdf(boost::math::complement(dist, f));
}

std::size_t adf_default_lags(std::size_t n) {
    if (n < 2) return 0;
    auto p = static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(n - 1))));
    // cbrt can land a hair below an exact cube
    while ((p + 1) * (p + 1) * (p + 1) <= n - 1) ++p;
    return p;
}

double adf_critical_value(double alpha, std::size_t nobs) {
    // tau_c response surface: b0 + b1/T + b2/T^2 + b3/T^3
    static constexpr std::array<double, 3> levels{0.01, 0.05, 0.10};
    static constexpr std::array<std::array<double, 4>, 3> coef{{
        {-3.43035, -6.5393, -16.786, -79.433},
        {-2.86154, -2.8903, -4.234, -40.040},
        {-2.56677, -1.5384, -2.809, 0.0},
    }};
    const double t = static_cast<double>(nobs);
    std::array<double, 3> cv{};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& b = coef[i];
        cv[i] = b[0] + b[1] / t + b[2] / (t * t) + b[3] / (t * t * t);
    }
    if (alpha <= levels[0]) return cv[0];
    if (alpha >= levels[2]) return cv[2];
    const std::size_t i = alpha <= levels[1] ? 0 : 1;
    const double w = (alpha - levels[i]) / (levels[i + 1] - levels[i]);
    return cv[i] + w * (cv[i + 1] - cv[i]);
}

AdfResult adf(std::span<const double> y, double alpha) {
    const std::size_t n = y.size();
    if (n < 20) throw Error("ADF: series too short (" + std::to_string(n) + " < 20)");
    const std::size_t p = adf_default_lags(n);
    std::vector<double> dy(n - 1);
    for (std::size_t t = 1; t < n; ++t) dy[t - 1] = y[t] - y[t - 1];

    // Rows t = p .. n-2 over dy indices: dy[t] ~ 1 + y[t] + dy[t-1..t-p]
    const std::size_t rows = dy.size() - p;
    const auto cols = static_cast<Eigen::Index>(2 + p);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), cols);
    Eigen::VectorXd target(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + p;
        const auto ri = static_cast<Eigen::Index>(r);
        target(ri) = dy[t];
        x(ri, 0) = 1.0;
        x(ri, 1) = y[t];
        for (std::size_t i = 1; i <= p; ++i) x(ri, static_cast<Eigen::Index>(1 + i)) = dy[t - i];
    }
    const auto fit = ols(x, target);
    if (!fit.full_rank) throw Error("ADF: singular regression");
    const double dof = static_cast<double>(rows) - static_cast<double>(cols);
    const double sigma2 = fit.rss / dof;
    const Eigen::MatrixXd xtx = x.transpose() * x;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(cols);
    e(1) = 1.0;
    const double var_phi = sigma2 * xtx.ldlt().solve(e)(1);
    if (!(var_phi > 0.0)) {
        // Perfect fit: the unit root is decisively rejected or accepted by phi's sign.
        const double stat = fit.beta(1) < 0.0 ? -std::numeric_limits<double>::infinity() : 0.0;
        return {stat, adf_critical_value(alpha, rows), p, rows};
    }
    return {fit.beta(1) / std::sqrt(var_phi), adf_critical_value(alpha, rows), p, rows};
}

std::vector<double> benjamini_hochberg(std::span<const double> p) {
    const std::size_t m = p.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::vector<double> q(m, 1.0);
    double running = 1.0;
    for (std::size_t r = m; r-- > 0;) {
        const std::size_t i = order[r];
        running = std::min(running, p[i] * static_cast<double>(m) / static_cast<double>(r + 1));
        q[i] = std::min(1.0, running);
    }
    return q;
}

}  // namespace sift::stats
