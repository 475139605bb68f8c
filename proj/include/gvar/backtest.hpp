#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gvar/forecast.hpp"
#include "gvar/math/normal.hpp"

namespace gvar {

/// Violation indicators: indicator_t = 1 iff r_{t+1} < -var_value_t.
struct Violations {
    std::vector<std::uint8_t> indicators;
    std::size_t m1 = 0;
};

inline Violations violations(std::span<const double> returns, std::span<const VarForecast> forecasts) {
    Violations v;
    v.indicators.reserve(forecasts.size());
    for (const VarForecast& f : forecasts) {
        if (f.t_index + 1 >= returns.size())
            throw std::invalid_argument(
                "violations: forecast at origin " + std::to_string(f.t_index) +
                " has no realized return at t+1 (misaligned inputs)");
        const std::uint8_t hit = returns[f.t_index + 1] < -f.var_value ? 1 : 0;
        v.indicators.push_back(hit);
        v.m1 += hit;
    }
    return v;
}

/// Element n (1-based) is the violation frequency over the first n indicators.
inline std::vector<double> running_violation_rate(std::span<const std::uint8_t> indicators) {
    if (indicators.empty())
        throw std::invalid_argument("running_violation_rate: empty indicator sequence");
    std::vector<double> rates(indicators.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < indicators.size(); ++i) {
        hits += indicators[i];
        rates[i] = static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    return rates;
}

/// Mean and standard deviation of the running rate over its converging tail
/// (entries with ordinal n > min_n).
struct RateSummary {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t count = 0;
};

inline RateSummary running_rate_summary(std::span<const double> rates, std::size_t min_n = 3000) {
    RateSummary s;
    double sum = 0.0;
    for (std::size_t i = min_n; i < rates.size(); ++i) {
        sum += rates[i];
        ++s.count;
    }
    if (s.count == 0) return s;
    s.mean = sum / static_cast<double>(s.count);
    double ss = 0.0;
    for (std::size_t i = min_n; i < rates.size(); ++i) {
        const double d = rates[i] - s.mean;
        ss += d * d;
    }
    s.stddev = s.count > 1 ? std::sqrt(ss / static_cast<double>(s.count - 1)) : 0.0;
    return s;
}

struct KupiecResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Unconditional-coverage likelihood ratio (Kupiec): twice the binomial
/// log-likelihood ratio of the observed violation frequency against alpha,
/// with the 0 * log(0/...) = 0 convention; p-value from chi-squared(1).
inline KupiecResult kupiec_lr_uc(std::size_t m0, std::size_t m1, double alpha) {
    if (m0 + m1 == 0)
        throw std::domain_error("kupiec_lr_uc: no observations");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("kupiec_lr_uc: alpha must lie in (0,1)");
    const double n = static_cast<double>(m0 + m1);
    const double hat = static_cast<double>(m1) / n;
    double stat = 0.0;
    if (m1 > 0) stat += static_cast<double>(m1) * std::log(hat / alpha);
    if (m0 > 0) stat += static_cast<double>(m0) * std::log((1.0 - hat) / (1.0 - alpha));
    stat *= 2.0;
    if (stat < 0.0) stat = 0.0; // rounding guard; the LR statistic is nonnegative
    return KupiecResult{stat, chi2_survival_1df(stat)};
}

/// Backtest summary in the layout of the published VaR comparison tables.
/// mean_var is reported in the usual display convention: VaR forecasts are
/// made on log-returns scaled by 100, so the mean forecast itself is the
/// "100 x average VaR" column.
struct BacktestReport {
    double alpha = 0.0;
    int w = 0;
    std::optional<int> w0;
    std::string model_id;
    std::size_t n_forecasts = 0;
    std::size_t m1 = 0;
    double viol_rate = 0.0;
    double lr_stat = 0.0;
    double p_value = 1.0;
    double mean_var_x100 = 0.0;
    std::vector<double> running_rate;
    // mode flags
    std::string mode = "raw";
    std::string calibration_span = "full";
    int refit_cadence = 0;
    std::uint64_t seed = 0;

    bool operator==(const BacktestReport&) const = default;
};

struct ReportMeta {
    ModelId model = ModelId::g_var;
    int w = 0;
    std::optional<int> w0;
    GVarMode mode = GVarMode::raw;
    std::string calibration_span = "full";
    int refit_cadence = 0;
    std::uint64_t seed = 0;
};

inline BacktestReport summarize(std::span<const double> returns, std::span<const VarForecast> forecasts,
                                double alpha, const ReportMeta& meta) {
    if (forecasts.empty())
        throw std::invalid_argument("summarize: no forecasts");
    const Violations v = violations(returns, forecasts);

    BacktestReport rep;
    rep.alpha = alpha;
    rep.w = meta.w;
    rep.w0 = meta.w0;
    rep.model_id = to_string(meta.model);
    rep.n_forecasts = forecasts.size();
    rep.m1 = v.m1;
    rep.viol_rate = static_cast<double>(v.m1) / static_cast<double>(forecasts.size());
    const KupiecResult k = kupiec_lr_uc(forecasts.size() - v.m1, v.m1, alpha);
    rep.lr_stat = k.statistic;
    rep.p_value = k.p_value;
    double sum = 0.0;
    for (const VarForecast& f : forecasts) sum += f.var_value;
    rep.mean_var_x100 = sum / static_cast<double>(forecasts.size());
    rep.running_rate = running_violation_rate(v.indicators);
    rep.mode = to_string(meta.mode);
    rep.calibration_span = meta.calibration_span;
    rep.refit_cadence = meta.refit_cadence;
    rep.seed = meta.seed;
    return rep;
}

} // namespace gvar
