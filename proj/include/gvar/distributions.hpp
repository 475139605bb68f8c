#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "gvar/errors.hpp"
#include "gvar/math/normal.hpp"
#include "gvar/math/special.hpp"

namespace gvar {

enum class Innovation { normal, student_t, skewed_t };

inline const char* to_string(Innovation d) {
    switch (d) {
        case Innovation::normal: return "normal";
        case Innovation::student_t: return "student_t";
        case Innovation::skewed_t: return "skewed_t";
    }
    return "unknown";
}

inline Innovation parse_innovation(const std::string& s) {
    if (s == "normal") return Innovation::normal;
    if (s == "student_t") return Innovation::student_t;
    if (s == "skewed_t") return Innovation::skewed_t;
    throw ConfigError("unknown innovation family: " + s);
}

/// Tail/skewness parameters; nu is ignored by the normal family, gamma by
/// everything except skewed_t.
struct InnovationParams {
    double nu = 0.0;
    double gamma = 1.0;
};

namespace detail {

inline void require_nu(double nu) {
    if (!(nu > 2.0))
        throw std::domain_error("innovation: tail parameter nu must exceed 2");
}

inline void require_gamma(double gamma) {
    if (!(gamma > 0.0))
        throw std::domain_error("innovation: skewness parameter gamma must be positive");
}

// --- classical Student-t with nu degrees of freedom -----------------------

inline double t_log_pdf(double x, double nu) {
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * M_PI) -
           0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

inline double t_cdf(double x, double nu) {
    const double ib = incbeta(0.5 * nu, 0.5, nu / (nu + x * x));
    return x >= 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

// Safeguarded Newton on the CDF, started from the normal quantile.
inline double t_quantile(double p, double nu) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("t_quantile: probability must lie in (0,1)");
    double x = norm_quantile(p);
    double lo = -1e308, hi = 1e308;
    for (int it = 0; it < 100; ++it) {
        const double err = t_cdf(x, nu) - p;
        if (err > 0.0) hi = std::min(hi, x);
        else lo = std::max(lo, x);
        const double pdf = std::exp(t_log_pdf(x, nu));
        double step = pdf > 1e-300 ? err / pdf : 0.0;
        double x_new = x - step;
        if (!(x_new > lo && x_new < hi))
            x_new = 0.5 * (std::max(lo, x - 8.0 * (1.0 + std::fabs(x))) +
                           std::min(hi, x + 8.0 * (1.0 + std::fabs(x))));
        if (std::fabs(x_new - x) <= 1e-14 * (1.0 + std::fabs(x))) return x_new;
        x = x_new;
    }
    return x;
}

// --- unit-variance scaling -------------------------------------------------

inline double t_unit_scale(double nu) { return std::sqrt((nu - 2.0) / nu); }

// Unit-variance Student-t: X = T * sqrt((nu-2)/nu).
inline double ut_log_pdf(double x, double nu) {
    const double s = t_unit_scale(nu);
    return t_log_pdf(x / s, nu) - std::log(s);
}
inline double ut_cdf(double x, double nu) { return t_cdf(x / t_unit_scale(nu), nu); }
inline double ut_quantile(double p, double nu) { return t_quantile(p, nu) * t_unit_scale(nu); }

// --- Fernandez-Steel skew applied to the unit-variance Student-t ----------
//
// g(x; gamma) = 2/(gamma + 1/gamma) [ f(x/gamma) 1(x>=0) + f(gamma x) 1(x<0) ],
// then standardized to zero mean / unit variance.

struct SkewTConsts {
    double mu;    // mean of the unstandardized skewed variable
    double sd;    // its standard deviation
    double p0;    // CDF mass left of zero: 1/(1+gamma^2)
};

inline SkewTConsts skew_t_consts(double nu, double gamma) {
    // E|X| of the unit-variance t.
    const double m1 = 2.0 * std::sqrt(nu - 2.0) *
                      std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
                      (std::sqrt(M_PI) * (nu - 1.0));
    const double g3 = gamma * gamma * gamma;
    const double mu = m1 * (gamma - 1.0 / gamma);
    const double ex2 = (g3 + 1.0 / g3) / (gamma + 1.0 / gamma);
    return SkewTConsts{mu, std::sqrt(ex2 - mu * mu), 1.0 / (1.0 + gamma * gamma)};
}

inline double skew_t_log_pdf(double z, double nu, double gamma) {
    const SkewTConsts c = skew_t_consts(nu, gamma);
    const double x = c.sd * z + c.mu;
    const double base = x >= 0.0 ? ut_log_pdf(x / gamma, nu) : ut_log_pdf(gamma * x, nu);
    return std::log(2.0 / (gamma + 1.0 / gamma)) + base + std::log(c.sd);
}

inline double skew_t_cdf(double z, double nu, double gamma) {
    const SkewTConsts c = skew_t_consts(nu, gamma);
    const double x = c.sd * z + c.mu;
    const double g2 = gamma * gamma;
    if (x <= 0.0) return 2.0 / (g2 + 1.0) * ut_cdf(gamma * x, nu);
    return c.p0 + 2.0 * g2 / (1.0 + g2) * (ut_cdf(x / gamma, nu) - 0.5);
}

inline double skew_t_quantile(double p, double nu, double gamma) {
    const SkewTConsts c = skew_t_consts(nu, gamma);
    const double g2 = gamma * gamma;
    double x;
    if (p <= c.p0)
        x = ut_quantile(0.5 * p * (g2 + 1.0), nu) / gamma;
    else
        x = gamma * ut_quantile((p - c.p0) * (1.0 + g2) / (2.0 * g2) + 0.5, nu);
    return (x - c.mu) / c.sd;
}

} // namespace detail

/// Quantile of the unit-variance innovation family.
inline double innovation_quantile(Innovation dist, const InnovationParams& p, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("innovation_quantile: probability must lie in (0,1)");
    switch (dist) {
        case Innovation::normal:
            return norm_quantile(alpha);
        case Innovation::student_t:
            detail::require_nu(p.nu);
            return detail::ut_quantile(alpha, p.nu);
        case Innovation::skewed_t:
            detail::require_nu(p.nu);
            detail::require_gamma(p.gamma);
            return detail::skew_t_quantile(alpha, p.nu, p.gamma);
    }
    throw std::logic_error("innovation_quantile: unreachable");
}

inline double innovation_cdf(Innovation dist, const InnovationParams& p, double z) {
    switch (dist) {
        case Innovation::normal:
            return norm_cdf(z);
        case Innovation::student_t:
            detail::require_nu(p.nu);
            return detail::ut_cdf(z, p.nu);
        case Innovation::skewed_t:
            detail::require_nu(p.nu);
            detail::require_gamma(p.gamma);
            return detail::skew_t_cdf(z, p.nu, p.gamma);
    }
    throw std::logic_error("innovation_cdf: unreachable");
}

inline double innovation_log_pdf(Innovation dist, const InnovationParams& p, double z) {
    switch (dist) {
        case Innovation::normal:
            return -0.5 * z * z - 0.5 * std::log(2.0 * M_PI);
        case Innovation::student_t:
            detail::require_nu(p.nu);
            return detail::ut_log_pdf(z, p.nu);
        case Innovation::skewed_t:
            detail::require_nu(p.nu);
            detail::require_gamma(p.gamma);
            return detail::skew_t_log_pdf(z, p.nu, p.gamma);
    }
    throw std::logic_error("innovation_log_pdf: unreachable");
}

} // namespace gvar
