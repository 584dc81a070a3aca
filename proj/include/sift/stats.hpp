#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sift::stats {

struct OlsFit {
    Eigen::VectorXd beta;
    double rss = 0.0;
    Eigen::Index rank = 0;
    bool full_rank = false;
};

/// Least squares via column-pivoted QR. Rank is judged relative to the
/// largest pivot, so exactly collinear regressors are reported as rank deficient.
[[nodiscard]] OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Upper tail P(F > f) of the F(d1, d2) distribution; 1 for f <= 0.
[[nodiscard]] double f_sf(double f, double d1, double d2);

/// Augmented Dickey-Fuller regression with a constant:
///   dy_t = a + phi * y_{t-1} + sum_{i=1..p} g_i dy_{t-i} + e_t
struct AdfResult {
    double statistic = 0.0;       ///< t-statistic of phi
    double critical_value = 0.0;  ///< at the requested alpha
    std::size_t lags = 0;
    std::size_t nobs = 0;
};

/// Lag order floor((n - 1)^(1/3)).
[[nodiscard]] std::size_t adf_default_lags(std::size_t n);

/// Runs the ADF regression. Throws when the series is shorter than 20 or the
/// regression is singular.
[[nodiscard]] AdfResult adf(std::span<const double> y, double alpha);

/// MacKinnon (2010) constant-only critical value for `nobs` observations;
/// alpha is interpolated between the tabulated 1%, 5% and 10% levels and clamped outside.
[[nodiscard]] double adf_critical_value(double alpha, std::size_t nobs);

/// Benjamini-Hochberg adjusted p-values (same order as the input).
[[nodiscard]] std::vector<double> benjamini_hochberg(std::span<const double> p);

}  // namespace sift::stats
