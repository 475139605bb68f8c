#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "gvar/math/normal.hpp"

namespace gvar {

/// Volatility-uncertainty interval (sigma_lo, sigma_hi) of the one-dimensional
/// G-normal law N(0, [sigma_lo^2, sigma_hi^2]). sigma_lo == sigma_hi reduces
/// every operation to the classical N(0, sigma^2).
struct GNormalParams {
    double sigma_lo;
    double sigma_hi;

    GNormalParams(double lo, double hi) : sigma_lo(lo), sigma_hi(hi) {
        if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi))
            throw std::invalid_argument("GNormalParams: need 0 < sigma_lo <= sigma_hi, finite");
    }

    static GNormalParams from_variances(double var_lo, double var_hi) {
        return GNormalParams(std::sqrt(var_lo), std::sqrt(var_hi));
    }
};

/// Interval [mu_lo, mu_hi] of a maximal distribution.
struct MaximalParams {
    double mu_lo;
    double mu_hi;

    MaximalParams(double lo, double hi) : mu_lo(lo), mu_hi(hi) {
        if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument("MaximalParams: need finite mu_lo <= mu_hi");
    }
};

/// Generator G(a) = (sigma_hi^2 a+ - sigma_lo^2 a-) / 2 of the nonlinear heat
/// equation. Positively homogeneous and sublinear in a.
inline double g_function(double a, const GNormalParams& p) {
    if (a >= 0.0) return 0.5 * p.sigma_hi * p.sigma_hi * a;
    return 0.5 * p.sigma_lo * p.sigma_lo * a;
}

/// Density rho(t, x) of the G-normal law at time t > 0. Gaussian with
/// sigma_hi on the left half-line and sigma_lo on the right, with a common
/// normalizing constant.
inline double gnormal_density(double x, double t, const GNormalParams& p) {
    if (!(t > 0.0))
        throw std::domain_error("gnormal_density: time must be positive");
    const double sigma = x <= 0.0 ? p.sigma_hi : p.sigma_lo;
    const double norm = std::sqrt(2.0) / ((p.sigma_hi + p.sigma_lo) * std::sqrt(M_PI * t));
    return norm * std::exp(-x * x / (2.0 * sigma * sigma * t));
}

/// Worst-case distribution function F(x): the two-branch closed form built
/// from the standard normal CDF. Continuous and strictly increasing, with
/// F(0) = sigma_hi / (sigma_hi + sigma_lo).
inline double gnormal_cdf(double x, const GNormalParams& p) {
    const double s = p.sigma_hi + p.sigma_lo;
    if (x <= 0.0) return (2.0 * p.sigma_hi / s) * norm_cdf(x / p.sigma_hi);
    return 1.0 - (2.0 * p.sigma_lo / s) * norm_cdf(-x / p.sigma_lo);
}

/// Inverse of gnormal_cdf by analytic branch inversion, split at the branch
/// point F(0) = sigma_hi / (sigma_hi + sigma_lo).
inline double gnormal_quantile(double alpha, const GNormalParams& p) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("gnormal_quantile: probability must lie in (0,1)");
    const double s = p.sigma_hi + p.sigma_lo;
    const double branch = p.sigma_hi / s;
    if (alpha == branch) return 0.0;
    if (alpha < branch) return p.sigma_hi * norm_quantile(alpha * s / (2.0 * p.sigma_hi));
    return -p.sigma_lo * norm_quantile((1.0 - alpha) * s / (2.0 * p.sigma_lo));
}

/// G-VaR at level alpha: the negated alpha-quantile of the worst-case law.
/// Positive (a loss threshold) whenever alpha is below the branch point.
inline double g_var(double alpha, const GNormalParams& p) {
    return -gnormal_quantile(alpha, p);
}

/// First moment of the t = 1 density: sqrt(2/pi) (sigma_lo - sigma_hi) <= 0.
inline double gnormal_mean(const GNormalParams& p) {
    return std::sqrt(2.0 / M_PI) * (p.sigma_lo - p.sigma_hi);
}

namespace detail {

inline double golden_section_max(const std::function<double(double)>& phi, double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498948482;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = phi(c), fd = phi(d);
    while (b - a > 1e-12 * (1.0 + std::fabs(a) + std::fabs(b))) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = phi(d);
        }
    }
    return std::max(fc, fd);
}

} // namespace detail

/// Sublinear expectation of phi under a maximal distribution: the maximum of
/// phi over [mu_lo, mu_hi]. Dense grid scan (default 10,001 points) refined
/// by golden section around the best grid point; exact for monotone and
/// concave/convex phi up to ~1e-10.
inline double maximal_expectation(const std::function<double(double)>& phi, const MaximalParams& m,
                                  int grid_points = 10001) {
    if (grid_points < 2)
        throw std::invalid_argument("maximal_expectation: need at least 2 grid points");
    if (m.mu_lo == m.mu_hi) {
        const double v = phi(m.mu_lo);
        if (!std::isfinite(v))
            throw std::runtime_error("maximal_expectation: phi non-finite on the interval");
        return v;
    }
    const double h = (m.mu_hi - m.mu_lo) / (grid_points - 1);
    double best = -std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i < grid_points; ++i) {
        const double y = i + 1 == grid_points ? m.mu_hi : m.mu_lo + i * h;
        const double v = phi(y);
        if (!std::isfinite(v))
            throw std::runtime_error("maximal_expectation: phi non-finite on the interval");
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    const double lo = m.mu_lo + std::max(0, best_i - 1) * h;
    const double hi = std::min(m.mu_hi, m.mu_lo + (best_i + 1) * h);
    return std::max(best, detail::golden_section_max(phi, lo, hi));
}

} // namespace gvar
