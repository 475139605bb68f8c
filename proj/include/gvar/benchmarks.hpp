#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gvar/errors.hpp"
#include "gvar/evt.hpp"
#include "gvar/forecast.hpp"
#include "gvar/garch.hpp"
#include "gvar/parallel.hpp"

namespace gvar {

/// Historical simulation: the negated ceil(alpha * n)-th order statistic of
/// the window (lower empirical quantile).
inline double historical_simulation_var(std::span<const double> window, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("historical_simulation_var: alpha must lie in (0,1)");
    const auto n = static_cast<double>(window.size());
    if (n * alpha < 1.0)
        throw std::out_of_range("historical_simulation_var: window too short for the requested level");
    const auto k = static_cast<std::size_t>(std::ceil(alpha * n - 1e-9));
    return -detail::order_statistic(window, k);
}

/// AR(1)-GARCH(1,1)-skewed-t with a POT/GPD tail on the negated standardized
/// residuals: VaR = sigma_next * x_alpha - mu_next.
inline double garch_st_evt_var(const GarchFit& fit, std::span<const double> window, double alpha,
                               double tail_frac = 0.10) {
    const GarchPath path = garch_filter(fit, window);
    std::vector<double> losses(path.resid.size());
    for (std::size_t i = 0; i < path.resid.size(); ++i)
        losses[i] = -path.resid[i] / std::sqrt(path.sigma2[i]);
    const GpdFit tail = fit_gpd_pot(losses, tail_frac);
    const double x_alpha = evt_tail_quantile(tail, alpha);
    return std::sqrt(path.sigma2_next) * x_alpha - path.mu_next;
}

/// Convenience one-shot: fit the skewed-t GARCH on the window, then apply the
/// EVT tail.
inline double garch_st_evt_forecast(std::span<const double> window, double alpha,
                                    double tail_frac = 0.10, const GarchFitOptions& opts = {}) {
    const GarchFit fit = fit_garch(window, Innovation::skewed_t, opts);
    return garch_st_evt_var(fit, window, alpha, tail_frac);
}

/// What to run over a rolling window: model choice plus its knobs.
struct ModelSpec {
    ModelId model = ModelId::g_var;
    int w = 0;
    int w0 = 0;                     // g_var only
    GVarMode mode = GVarMode::raw;  // g_var only
    double tail_frac = 0.10;        // garch_st_evt only
    int refit_cadence = 25;         // garch family: refit every k origins
    std::uint64_t seed = 20240915;  // fit restarts
};

namespace detail {

inline Innovation garch_innovation(ModelId model) {
    switch (model) {
        case ModelId::garch_n: return Innovation::normal;
        case ModelId::garch_t: return Innovation::student_t;
        case ModelId::garch_st:
        case ModelId::garch_st_evt: return Innovation::skewed_t;
        default: throw std::logic_error("garch_innovation: not a GARCH model");
    }
}

/// Rolling GARCH-family forecasts. Refits happen every refit_cadence origins
/// and parameters are reused in between (the variance recursion itself is
/// recomputed on the current window every step). Blocks between refits are
/// independent, so they run in parallel with per-block seeds.
inline std::vector<VarForecast> rolling_garch_family(std::span<const double> returns,
                                                     const ModelSpec& spec, double alpha) {
    const std::size_t n = returns.size();
    const auto w = static_cast<std::size_t>(spec.w);
    const std::size_t n_origins = n - w;
    const std::size_t cadence = spec.refit_cadence < 1 ? 1 : static_cast<std::size_t>(spec.refit_cadence);
    const std::size_t n_blocks = (n_origins + cadence - 1) / cadence;
    const Innovation dist = garch_innovation(spec.model);

    std::vector<VarForecast> out(n_origins);
    parallel_for(n_blocks, [&](std::size_t block) {
        const std::size_t lo = block * cadence;
        const std::size_t hi = std::min(lo + cadence, n_origins);
        const std::size_t t_fit = w - 1 + lo;
        GarchFitOptions opts;
        opts.seed = spec.seed + block;
        GarchFit fit;
        try {
            fit = fit_garch(returns.subspan(t_fit + 1 - w, w), dist, opts);
        } catch (const GarchFitError& e) {
            fit = e.best_fit; // keep rolling with the best point found
        }
        for (std::size_t i = lo; i < hi; ++i) {
            const std::size_t t = w - 1 + i;
            const auto window = returns.subspan(t + 1 - w, w);
            VarForecast f;
            f.t_index = t;
            f.alpha = alpha;
            f.model = spec.model;
            f.garch = fit;
            f.ar1_coef = fit.ar_coef;
            f.var_value = spec.model == ModelId::garch_st_evt
                              ? garch_st_evt_var(fit, window, alpha, spec.tail_frac)
                              : garch_var_forecast(fit, window, alpha);
            out[i] = std::move(f);
        }
    });
    return out;
}

} // namespace detail

/// Rolling one-step-ahead forecasts for any supported model, one VarForecast
/// per origin t in [W-1, n-2].
inline std::vector<VarForecast> rolling_forecast(std::span<const double> returns, const ModelSpec& spec,
                                                 double alpha) {
    const std::size_t n = returns.size();
    if (spec.w < 2 || n < static_cast<std::size_t>(spec.w) + 2)
        throw std::invalid_argument("rolling_forecast: series must be longer than W+1");

    switch (spec.model) {
        case ModelId::g_var:
            return rolling_g_var_forecast(returns, spec.w, spec.w0, alpha, spec.mode);
        case ModelId::hs: {
            std::vector<VarForecast> out;
            out.reserve(n - static_cast<std::size_t>(spec.w));
            for (std::size_t t = static_cast<std::size_t>(spec.w) - 1; t + 1 < n; ++t) {
                const auto window = returns.subspan(t + 1 - static_cast<std::size_t>(spec.w),
                                                    static_cast<std::size_t>(spec.w));
                VarForecast f;
                f.t_index = t;
                f.alpha = alpha;
                f.model = ModelId::hs;
                f.var_value = historical_simulation_var(window, alpha);
                out.push_back(std::move(f));
            }
            return out;
        }
        default:
            return detail::rolling_garch_family(returns, spec, alpha);
    }
}

} // namespace gvar
