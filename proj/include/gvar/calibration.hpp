#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "gvar/errors.hpp"
#include "gvar/estimation.hpp"
#include "gvar/forecast.hpp"
#include "gvar/parallel.hpp"

namespace gvar {

/// Outcome of the adaptive-window search: the selected W0, the whole
/// candidate grid with realized violation rates, and the span it was run on.
struct CalibrationResult {
    int w0_star = 0;
    double alpha_target = 0.0;
    std::vector<std::pair<int, double>> grid; // (candidate W0, realized violation rate)
    double deviation = 0.0;
    std::size_t span_begin = 0; // first forecast origin used (inclusive)
    std::size_t span_end = 0;   // one past the last origin
    GVarMode mode = GVarMode::raw;
};

struct CalibrationConfig {
    int w = 0;
    double alpha = 0.0;
    std::vector<int> candidates;          // empty -> default_w0_grid(w, alpha)
    std::size_t span_begin = 0;           // clamped to the forecastable range
    std::size_t span_end = SIZE_MAX;
    std::size_t min_span = 500;           // floor on forecastable dates in the span
    double acceptance_band = -1.0;        // max |rate - alpha|; <0 -> 0.5 * alpha
    GVarMode mode = GVarMode::raw;
};

/// Candidate grid {5, 10, ..., W} (plus W itself when W is not a multiple of
/// five); floored at 20 for alpha <= 0.01 where tiny sub-windows destabilize
/// the tail estimate.
inline std::vector<int> default_w0_grid(int w, double alpha) {
    const int lo = alpha <= 0.01 ? 20 : 5;
    std::vector<int> grid;
    for (int c = 5; c <= w; c += 5)
        if (c >= lo) grid.push_back(c);
    if (w % 5 != 0 && w >= lo) grid.push_back(w);
    return grid;
}

/// Hook producing the var_value series for all origins t in [W-1, n-2];
/// lets callers calibrate W0 for a custom forecaster.
using ForecastHook =
    std::function<std::vector<double>(std::span<const double> returns, int w, int w0, double alpha)>;

namespace detail {

inline std::vector<double> raw_g_var_values(std::span<const double> returns, int w, int w0, double alpha) {
    RollingBoundsScanner scanner(returns, w, w0);
    const std::size_t n = returns.size();
    std::vector<double> values;
    values.reserve(n - static_cast<std::size_t>(w));
    for (std::size_t t = static_cast<std::size_t>(w) - 1; t + 1 < n; ++t) {
        const SigmaBounds b = scanner.at(t);
        values.push_back(g_var(alpha, GNormalParams(b.sigma_lo(), b.sigma_hi())));
    }
    return values;
}

} // namespace detail

/// Searches the candidate grid for the W0 whose realized violation rate over
/// the span is closest to alpha (ties -> smallest W0). Fails when no
/// candidate lands inside the acceptance band, mirroring the situation where
/// no adaptive window exists for the series.
inline CalibrationResult calibrate_w0(std::span<const double> returns, const CalibrationConfig& cfg,
                                      const ForecastHook& forecaster = {}) {
    const std::size_t n = returns.size();
    if (cfg.w < 2 || n < static_cast<std::size_t>(cfg.w) + 2)
        throw ConfigError("calibrate_w0: series must be longer than W+1");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw std::domain_error("calibrate_w0: alpha must lie in (0,1)");

    const int w0_cap = cfg.mode == GVarMode::ar1 ? cfg.w - 1 : cfg.w;
    std::vector<int> candidates = cfg.candidates;
    if (candidates.empty()) {
        candidates = default_w0_grid(cfg.w, cfg.alpha);
        std::erase_if(candidates, [&](int c) { return c > w0_cap; });
    }
    if (candidates.empty())
        throw ConfigError("calibrate_w0: empty candidate grid");
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (int c : candidates)
        if (c < 1 || c > w0_cap)
            throw ConfigError("calibrate_w0: candidate W0 outside [1, " + std::to_string(w0_cap) + "]");

    const std::size_t first_origin = static_cast<std::size_t>(cfg.w) - 1;
    const std::size_t last_origin_end = n - 1; // origins run over [W-1, n-2]
    const std::size_t begin = std::clamp(cfg.span_begin, first_origin, last_origin_end);
    const std::size_t end = std::clamp(cfg.span_end, begin, last_origin_end);
    const std::size_t span_len = end - begin;
    if (span_len < cfg.min_span) {
        std::ostringstream msg;
        msg << "calibrate_w0: span holds " << span_len << " forecastable dates, below the floor "
            << cfg.min_span;
        throw ConfigError(msg.str());
    }

    const double band = cfg.acceptance_band < 0.0 ? 0.5 * cfg.alpha : cfg.acceptance_band;

    std::vector<double> rates(candidates.size(), 0.0);
    const std::size_t value_offset = begin - first_origin;
    parallel_for(candidates.size(), [&](std::size_t ci) {
        std::vector<double> values;
        if (forecaster)
            values = forecaster(returns, cfg.w, candidates[ci], cfg.alpha);
        else if (cfg.mode == GVarMode::raw)
            values = detail::raw_g_var_values(returns, cfg.w, candidates[ci], cfg.alpha);
        else {
            const auto forecasts = rolling_g_var_forecast(returns, cfg.w, candidates[ci], cfg.alpha, cfg.mode);
            values.reserve(forecasts.size());
            for (const auto& f : forecasts) values.push_back(f.var_value);
        }
        std::size_t m1 = 0;
        for (std::size_t t = begin; t < end; ++t)
            if (returns[t + 1] < -values[value_offset + (t - begin)]) ++m1;
        rates[ci] = static_cast<double>(m1) / static_cast<double>(span_len);
    });

    CalibrationResult result;
    result.alpha_target = cfg.alpha;
    result.span_begin = begin;
    result.span_end = end;
    result.mode = cfg.mode;
    result.deviation = std::numeric_limits<double>::infinity();
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        result.grid.emplace_back(candidates[ci], rates[ci]);
        const double dev = std::fabs(rates[ci] - cfg.alpha);
        if (dev < result.deviation) { // strict: ties keep the smallest W0
            result.deviation = dev;
            result.w0_star = candidates[ci];
        }
    }

    if (result.deviation > band) {
        std::ostringstream msg;
        msg << "calibrate_w0: no candidate W0 within the acceptance band (best |rate-alpha|="
            << result.deviation << " > " << band << "); no adaptive window exists for this series";
        throw CalibrationError(msg.str());
    }
    return result;
}

} // namespace gvar
