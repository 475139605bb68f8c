#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gvar/errors.hpp"
#include "gvar/estimation.hpp"
#include "gvar/garch.hpp"
#include "gvar/gnormal.hpp"

namespace gvar {

enum class ModelId { g_var, hs, garch_n, garch_t, garch_st, garch_st_evt };

inline const char* to_string(ModelId m) {
    switch (m) {
        case ModelId::g_var: return "g_var";
        case ModelId::hs: return "hs";
        case ModelId::garch_n: return "garch_n";
        case ModelId::garch_t: return "garch_t";
        case ModelId::garch_st: return "garch_st";
        case ModelId::garch_st_evt: return "garch_st_evt";
    }
    return "unknown";
}

inline ModelId parse_model_id(const std::string& s) {
    if (s == "g_var") return ModelId::g_var;
    if (s == "hs") return ModelId::hs;
    if (s == "garch_n") return ModelId::garch_n;
    if (s == "garch_t") return ModelId::garch_t;
    if (s == "garch_st") return ModelId::garch_st;
    if (s == "garch_st_evt") return ModelId::garch_st_evt;
    throw ConfigError("unknown model id: " + s);
}

enum class GVarMode { raw, ar1 };

inline const char* to_string(GVarMode m) { return m == GVarMode::raw ? "raw" : "ar1"; }

inline GVarMode parse_g_var_mode(const std::string& s) {
    if (s == "raw") return GVarMode::raw;
    if (s == "ar1") return GVarMode::ar1;
    throw ConfigError("unknown G-VaR mode: " + s);
}

/// One-step-ahead VaR at a forecast origin (predicting t_index + 1).
/// var_value is a loss threshold: positive means a loss. The parameter
/// snapshot records whatever the model used: sigma bounds for G-VaR, the
/// GarchFit for the parametric benchmarks.
struct VarForecast {
    std::size_t t_index = 0;
    double alpha = 0.0;
    double var_value = 0.0;
    ModelId model = ModelId::g_var;
    std::optional<SigmaBounds> bounds;  // G-VaR models
    std::optional<GarchFit> garch;      // GARCH-family models
    std::optional<double> ar1_coef;     // when an AR(1) filter was applied
};

namespace detail {

inline void require_origin(std::size_t n, std::size_t t, int w) {
    if (t >= n || t + 1 < static_cast<std::size_t>(w))
        throw std::out_of_range("g_var_forecast: not enough history before the forecast origin");
}

/// AR(1)-filtered forecast pieces at one origin: the fitted slope, and bounds
/// of the residual series inside the window.
inline std::pair<double, SigmaBounds> ar1_pieces(std::span<const double> returns, std::size_t t, int w,
                                                 int w0) {
    if (w0 > w - 1)
        throw ConfigError("g_var_forecast: ar1 mode needs W0 <= W-1 (residual history is W-1 long)");
    const std::size_t start = t + 1 - static_cast<std::size_t>(w);
    const auto window = returns.subspan(start, static_cast<std::size_t>(w));
    const double a = fit_ar1(window);
    std::vector<double> resid(window.size() - 1);
    for (std::size_t s = 1; s < window.size(); ++s) resid[s - 1] = window[s] - a * window[s - 1];
    SigmaBounds b = sigma_bounds_overlapping(resid, resid.size() - 1, w - 1, w0);
    b.t_index = t;
    return {a, b};
}

} // namespace detail

/// One-step-ahead G-VaR at origin t.
///  raw : overlapping bounds on the returns themselves, quantile negated.
///  ar1 : slope fitted on the window, bounds taken on the AR(1) residuals,
///        forecast recentered by the conditional mean a * r_t.
inline VarForecast g_var_forecast(std::span<const double> returns, std::size_t t, int w, int w0,
                                  double alpha, GVarMode mode = GVarMode::raw) {
    detail::require_origin(returns.size(), t, w);
    VarForecast f;
    f.t_index = t;
    f.alpha = alpha;
    f.model = ModelId::g_var;
    if (mode == GVarMode::raw) {
        const SigmaBounds b = sigma_bounds_overlapping(returns, t, w, w0);
        f.var_value = g_var(alpha, GNormalParams(b.sigma_lo(), b.sigma_hi()));
        f.bounds = b;
    } else {
        const auto [a, b] = detail::ar1_pieces(returns, t, w, w0);
        const double resid_q = gnormal_quantile(alpha, GNormalParams(b.sigma_lo(), b.sigma_hi()));
        f.var_value = -(a * returns[t] + resid_q);
        f.bounds = b;
        f.ar1_coef = a;
    }
    return f;
}

/// Rolling one-step-ahead G-VaR forecasts for every origin t in [W-1, n-2].
inline std::vector<VarForecast> rolling_g_var_forecast(std::span<const double> returns, int w, int w0,
                                                       double alpha, GVarMode mode = GVarMode::raw) {
    const std::size_t n = returns.size();
    if (n < static_cast<std::size_t>(w) + 2)
        throw std::invalid_argument("rolling_g_var_forecast: series must be longer than W+1");
    std::vector<VarForecast> out;
    out.reserve(n - static_cast<std::size_t>(w));
    if (mode == GVarMode::raw) {
        detail::RollingBoundsScanner scanner(returns, w, w0);
        for (std::size_t t = static_cast<std::size_t>(w) - 1; t + 1 < n; ++t) {
            const SigmaBounds b = scanner.at(t);
            VarForecast f;
            f.t_index = t;
            f.alpha = alpha;
            f.model = ModelId::g_var;
            f.var_value = g_var(alpha, GNormalParams(b.sigma_lo(), b.sigma_hi()));
            f.bounds = b;
            out.push_back(std::move(f));
        }
    } else {
        for (std::size_t t = static_cast<std::size_t>(w) - 1; t + 1 < n; ++t)
            out.push_back(g_var_forecast(returns, t, w, w0, alpha, mode));
    }
    return out;
}

} // namespace gvar
