#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "gvar/errors.hpp"
#include "gvar/math/nelder_mead.hpp"

namespace gvar {

/// Generalized Pareto fit of threshold exceedances (peaks over threshold).
struct GpdFit {
    double xi = 0.0;   // shape
    double beta = 0.0; // scale
    double u = 0.0;    // threshold (loss units)
    std::size_t n_exceed = 0;
    std::size_t n_total = 0;
    bool mle_converged = true; // false -> probability-weighted-moment fallback
};

namespace detail {

/// k-th smallest (1-indexed) of a copy of the data.
inline double order_statistic(std::span<const double> data, std::size_t k) {
    std::vector<double> copy(data.begin(), data.end());
    std::nth_element(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(k - 1), copy.end());
    return copy[k - 1];
}

/// Probability-weighted-moment estimates (Hosking & Wallis) for the GPD,
/// used as the simplex starting point and as the fallback estimator.
inline std::pair<double, double> gpd_pwm(std::span<const double> y) {
    std::vector<double> sorted(y.begin(), y.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    double b0 = 0.0, b1 = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        b0 += sorted[i];
        b1 += sorted[i] * (n - 1.0 - static_cast<double>(i)) / (n - 1.0);
    }
    b0 /= n;
    b1 /= n;
    const double denom = b0 - 2.0 * b1;
    if (denom <= 0.0) return {0.0, std::max(b0, 1e-12)};
    const double xi = 2.0 - b0 / denom;
    const double beta = 2.0 * b0 * b1 / denom;
    return {xi, std::max(beta, 1e-12)};
}

inline double gpd_negloglik(double xi, double beta, std::span<const double> y) {
    if (!(beta > 0.0) || !std::isfinite(beta) || !std::isfinite(xi))
        return std::numeric_limits<double>::infinity();
    const auto n = static_cast<double>(y.size());
    double nll = n * std::log(beta);
    if (std::fabs(xi) < 1e-10) {
        for (double v : y) nll += v / beta;
        return nll;
    }
    for (double v : y) {
        const double arg = xi * v / beta;
        if (arg <= -1.0) return std::numeric_limits<double>::infinity();
        nll += (1.0 + 1.0 / xi) * std::log1p(arg);
    }
    return std::isfinite(nll) ? nll : std::numeric_limits<double>::infinity();
}

} // namespace detail

/// Fits a GPD to the losses above the empirical (1 - tail_frac) quantile.
/// MLE by simplex search from the PWM starting point; PWM fallback (flagged)
/// if the search fails.
inline GpdFit fit_gpd_pot(std::span<const double> losses, double tail_frac = 0.10,
                          std::size_t min_exceed = 30) {
    if (!(tail_frac > 0.0 && tail_frac < 1.0))
        throw std::domain_error("fit_gpd_pot: tail_frac must lie in (0,1)");
    const std::size_t n = losses.size();
    if (n == 0) throw DataError("fit_gpd_pot: empty sample");

    const auto k_u = static_cast<std::size_t>(
        std::ceil((1.0 - tail_frac) * static_cast<double>(n) - 1e-9));
    const double u = detail::order_statistic(losses, std::max<std::size_t>(1, k_u));

    std::vector<double> exceed;
    for (double v : losses)
        if (v > u) exceed.push_back(v - u);
    if (exceed.size() < min_exceed)
        throw DataError("fit_gpd_pot: only " + std::to_string(exceed.size()) +
                        " exceedances above the threshold (need >= " + std::to_string(min_exceed) + ")");

    const auto [xi0, beta0] = detail::gpd_pwm(exceed);
    const auto objective = [&](const std::vector<double>& theta) {
        return detail::gpd_negloglik(theta[0], std::exp(theta[1]), exceed);
    };
    const NelderMeadResult res =
        nelder_mead(objective, {xi0, std::log(beta0)}, {0.1, 0.2}, NelderMeadOptions{2000, 1e-10});

    GpdFit fit;
    fit.u = u;
    fit.n_exceed = exceed.size();
    fit.n_total = n;
    if (res.converged && std::isfinite(res.fx)) {
        fit.xi = res.x[0];
        fit.beta = std::exp(res.x[1]);
        fit.mle_converged = true;
    } else {
        fit.xi = xi0;
        fit.beta = beta0;
        fit.mle_converged = false;
    }
    return fit;
}

/// Smith tail estimator: the loss quantile x_alpha extrapolated from the GPD
/// fit, valid for target probabilities inside the modeled tail.
inline double evt_tail_quantile(const GpdFit& fit, double alpha) {
    const double tail_prob = static_cast<double>(fit.n_exceed) / static_cast<double>(fit.n_total);
    if (!(alpha > 0.0) || alpha > tail_prob * (1.0 + 1e-12))
        throw std::domain_error("evt_tail_quantile: alpha must lie inside the modeled tail (0, " +
                                std::to_string(tail_prob) + "]");
    const double log_ratio = std::log(alpha / tail_prob); // <= 0
    if (fit.xi == 0.0) return fit.u - fit.beta * log_ratio;
    // (t^-xi - 1)/xi with t = alpha/tail_prob, continuous through xi -> 0.
    return fit.u + fit.beta * std::expm1(-fit.xi * log_ratio) / fit.xi;
}

} // namespace gvar
