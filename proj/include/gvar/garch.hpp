#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gvar/distributions.hpp"
#include "gvar/errors.hpp"
#include "gvar/estimation.hpp"
#include "gvar/math/nelder_mead.hpp"
#include "gvar/math/rng.hpp"

namespace gvar {

/// Fitted AR(1)-GARCH(1,1) model with a standardized innovation family.
struct GarchFit {
    double omega = 0.0;
    double alpha1 = 0.0;
    double beta1 = 0.0;
    Innovation dist = Innovation::normal;
    double nu = 0.0;    // t families
    double gamma = 1.0; // skewed_t
    double ar_coef = 0.0;
    double loglik = 0.0;
    bool converged = false;

    InnovationParams innovation_params() const { return InnovationParams{nu, gamma}; }
};

/// Fit failure that still carries the best parameter set encountered.
class GarchFitError : public std::runtime_error {
public:
    GarchFitError(const std::string& msg, GarchFit best)
        : std::runtime_error(msg), best_fit(std::move(best)) {}
    GarchFit best_fit;
};

struct GarchFitOptions {
    int restarts = 3; // jittered restarts after a non-converged first attempt
    std::uint64_t seed = 20240915;
    NelderMeadOptions nm{5000, 1e-9};
};

namespace detail {

// Innovation log-density with family constants hoisted out of the
// per-observation loop (the likelihood evaluates it thousands of times).
class StandardizedLogPdf {
public:
    StandardizedLogPdf(Innovation dist, const InnovationParams& p) : dist_(dist) {
        switch (dist) {
            case Innovation::normal:
                c0_ = -0.5 * std::log(2.0 * M_PI);
                break;
            case Innovation::student_t: {
                require_nu(p.nu);
                nu_ = p.nu;
                scale_ = t_unit_scale(p.nu);
                c0_ = std::lgamma(0.5 * (nu_ + 1.0)) - std::lgamma(0.5 * nu_) -
                      0.5 * std::log(nu_ * M_PI) - std::log(scale_);
                break;
            }
            case Innovation::skewed_t: {
                require_nu(p.nu);
                require_gamma(p.gamma);
                nu_ = p.nu;
                gamma_ = p.gamma;
                scale_ = t_unit_scale(p.nu);
                sk_ = skew_t_consts(p.nu, p.gamma);
                c0_ = std::lgamma(0.5 * (nu_ + 1.0)) - std::lgamma(0.5 * nu_) -
                      0.5 * std::log(nu_ * M_PI) - std::log(scale_) +
                      std::log(2.0 / (gamma_ + 1.0 / gamma_)) + std::log(sk_.sd);
                break;
            }
        }
    }

    double operator()(double z) const {
        switch (dist_) {
            case Innovation::normal:
                return c0_ - 0.5 * z * z;
            case Innovation::student_t: {
                const double t = z / scale_;
                return c0_ - 0.5 * (nu_ + 1.0) * std::log1p(t * t / nu_);
            }
            case Innovation::skewed_t: {
                const double x = sk_.sd * z + sk_.mu;
                const double y = (x >= 0.0 ? x / gamma_ : gamma_ * x) / scale_;
                return c0_ - 0.5 * (nu_ + 1.0) * std::log1p(y * y / nu_);
            }
        }
        return 0.0;
    }

private:
    Innovation dist_;
    double nu_ = 0.0, gamma_ = 1.0, scale_ = 1.0, c0_ = 0.0;
    SkewTConsts sk_{0.0, 1.0, 0.5};
};

inline double sigmoid(double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return std::min(1.0 - 1e-12, std::max(1e-12, s));
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline int garch_dim(Innovation dist) {
    switch (dist) {
        case Innovation::normal: return 4;
        case Innovation::student_t: return 5;
        case Innovation::skewed_t: return 6;
    }
    return 4;
}

// Unconstrained parameterization: [ar, log omega, logit(persistence),
// logit(alpha share), log(nu-2), log gamma]. The logit of the persistence
// keeps alpha1 + beta1 < 1 structurally, so non-stationary fits can never
// be produced.
inline GarchFit decode_garch_theta(const std::vector<double>& theta, Innovation dist) {
    GarchFit fit;
    fit.dist = dist;
    fit.ar_coef = theta[0];
    fit.omega = std::exp(theta[1]);
    const double persistence = sigmoid(theta[2]);
    const double share = sigmoid(theta[3]);
    fit.alpha1 = persistence * share;
    fit.beta1 = persistence * (1.0 - share);
    if (dist != Innovation::normal) fit.nu = 2.0 + std::exp(theta[4]);
    if (dist == Innovation::skewed_t) fit.gamma = std::exp(theta[5]);
    return fit;
}

/// Negative log-likelihood of the AR(1)-GARCH(1,1) recursion over a window.
/// The variance recursion is seeded with the window's uncentered variance.
inline double garch_negloglik(const GarchFit& fit, std::span<const double> r, double presample_var) {
    if (!std::isfinite(fit.omega) || fit.omega <= 0.0) return std::numeric_limits<double>::infinity();
    const StandardizedLogPdf log_pdf(fit.dist, fit.innovation_params());
    double sigma2 = presample_var;
    double prev_e2 = 0.0;
    double nll = 0.0;
    for (std::size_t t = 1; t < r.size(); ++t) {
        if (t >= 2) sigma2 = fit.omega + fit.alpha1 * prev_e2 + fit.beta1 * sigma2;
        const double e = r[t] - fit.ar_coef * r[t - 1];
        nll -= log_pdf(e / std::sqrt(sigma2)) - 0.5 * std::log(sigma2);
        prev_e2 = e * e;
    }
    return std::isfinite(nll) ? nll : std::numeric_limits<double>::infinity();
}

} // namespace detail

/// Joint MLE of the AR(1)-GARCH(1,1) parameters by derivative-free simplex
/// search over the unconstrained parameterization, with jittered restarts.
inline GarchFit fit_garch(std::span<const double> window, Innovation dist,
                          const GarchFitOptions& opts = {}) {
    if (window.size() < 250)
        throw std::invalid_argument("fit_garch: window must hold at least 250 observations");
    double presample = 0.0, mean = 0.0;
    for (double r : window) {
        presample += r * r;
        mean += r;
    }
    presample /= static_cast<double>(window.size());
    mean /= static_cast<double>(window.size());
    if (presample - mean * mean < kDegenerateVariance)
        throw DataError("fit_garch: degenerate (flat) window");

    double a0 = 0.0;
    try {
        a0 = fit_ar1(window);
    } catch (const DataError&) {
        a0 = 0.0;
    }

    const int dim = detail::garch_dim(dist);
    std::vector<double> theta0 = {a0, std::log(0.1 * presample), detail::logit(0.9), detail::logit(0.1),
                                  std::log(6.0), 0.0};
    theta0.resize(static_cast<std::size_t>(dim));
    std::vector<double> steps = {0.02, 0.5, 0.5, 0.5, 0.4, 0.1};
    steps.resize(static_cast<std::size_t>(dim));

    const auto objective = [&](const std::vector<double>& theta) {
        return detail::garch_negloglik(detail::decode_garch_theta(theta, dist), window, presample);
    };

    Rng rng(opts.seed);
    GarchFit best;
    double best_nll = std::numeric_limits<double>::infinity();
    bool best_converged = false;
    for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
        std::vector<double> start = theta0;
        if (attempt > 0)
            for (std::size_t i = 0; i < start.size(); ++i) start[i] += 0.5 * steps[i] * rng.normal();
        const NelderMeadResult res = nelder_mead(objective, start, steps, opts.nm);
        if (res.fx < best_nll) {
            best_nll = res.fx;
            best = detail::decode_garch_theta(res.x, dist);
            best_converged = res.converged;
        }
        if (best_converged && attempt >= 0 && std::isfinite(best_nll)) break;
    }
    best.loglik = -best_nll;
    best.converged = best_converged && std::isfinite(best_nll);
    if (!best.converged)
        throw GarchFitError("fit_garch: simplex search failed to converge after restarts", best);
    return best;
}

/// Filtered state of a fitted model over a window: residuals e_t, their
/// conditional variances, and the one-step-ahead mean/variance.
struct GarchPath {
    std::vector<double> resid;  // e_t for t = 1..m-1
    std::vector<double> sigma2; // conditional variance aligned with resid
    double sigma2_next = 0.0;
    double mu_next = 0.0;
};

inline GarchPath garch_filter(const GarchFit& fit, std::span<const double> window) {
    if (window.size() < 2)
        throw std::invalid_argument("garch_filter: window must hold at least 2 observations");
    double presample = 0.0;
    for (double r : window) presample += r * r;
    presample /= static_cast<double>(window.size());

    GarchPath path;
    path.resid.reserve(window.size() - 1);
    path.sigma2.reserve(window.size() - 1);
    double sigma2 = presample;
    for (std::size_t t = 1; t < window.size(); ++t) {
        if (t >= 2) {
            const double e_prev = path.resid.back();
            sigma2 = fit.omega + fit.alpha1 * e_prev * e_prev + fit.beta1 * sigma2;
        }
        path.resid.push_back(window[t] - fit.ar_coef * window[t - 1]);
        path.sigma2.push_back(sigma2);
    }
    const double e_last = path.resid.back();
    path.sigma2_next = fit.omega + fit.alpha1 * e_last * e_last + fit.beta1 * sigma2;
    path.mu_next = fit.ar_coef * window.back();
    return path;
}

/// One-step-ahead parametric VaR: -(mu + sigma * Q_alpha) for the fitted
/// standardized innovation family.
inline double garch_var_forecast(const GarchFit& fit, std::span<const double> window, double alpha) {
    const GarchPath path = garch_filter(fit, window);
    const double q = innovation_quantile(fit.dist, fit.innovation_params(), alpha);
    return -(path.mu_next + std::sqrt(path.sigma2_next) * q);
}

/// Simulation of the AR(1)-GARCH(1,1) process (inverse-CDF innovations),
/// used by recovery studies and synthetic fixtures.
struct GarchSimSpec {
    double ar_coef = 0.0;
    double omega = 0.05;
    double alpha1 = 0.10;
    double beta1 = 0.85;
    Innovation dist = Innovation::normal;
    double nu = 8.0;
    double gamma = 1.0;
};

inline std::vector<double> simulate_garch(const GarchSimSpec& spec, std::size_t n, Rng& rng,
                                          std::size_t burn_in = 1000) {
    const InnovationParams ip{spec.nu, spec.gamma};
    std::vector<double> out;
    out.reserve(n);
    double sigma2 = spec.omega / (1.0 - spec.alpha1 - spec.beta1);
    double prev_r = 0.0, prev_e = 0.0;
    for (std::size_t t = 0; t < n + burn_in; ++t) {
        if (t > 0) sigma2 = spec.omega + spec.alpha1 * prev_e * prev_e + spec.beta1 * sigma2;
        const double z = innovation_quantile(spec.dist, ip, rng.uniform01());
        const double e = std::sqrt(sigma2) * z;
        const double r = spec.ar_coef * prev_r + e;
        if (t >= burn_in) out.push_back(r);
        prev_r = r;
        prev_e = e;
    }
    return out;
}

} // namespace gvar
