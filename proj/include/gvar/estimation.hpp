#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "gvar/errors.hpp"

namespace gvar {

enum class BoundsMethod { overlapping, disjoint };

inline const char* to_string(BoundsMethod m) {
    return m == BoundsMethod::overlapping ? "overlapping" : "disjoint";
}

/// Estimated variance-uncertainty interval at a forecast origin.
struct SigmaBounds {
    double sigma2_lo = 0.0;
    double sigma2_hi = 0.0;
    std::size_t t_index = 0;
    int w = 0;
    int w0 = 0;
    BoundsMethod method = BoundsMethod::overlapping;

    double sigma_lo() const { return std::sqrt(sigma2_lo); }
    double sigma_hi() const { return std::sqrt(sigma2_hi); }
};

// A window variance below this is treated as a dead-flat window; it cannot
// parameterize a G-normal law.
inline constexpr double kDegenerateVariance = 1e-12;

/// Zero-mean sample variance over the trailing w0 observations ending at s:
/// the plain mean of squares, no mean subtraction.
inline double rolling_variance(std::span<const double> returns, std::size_t s, int w0) {
    if (w0 < 1) throw std::invalid_argument("rolling_variance: window must be positive");
    if (s >= returns.size() || s + 1 < static_cast<std::size_t>(w0))
        throw std::out_of_range("rolling_variance: window does not fit the history");
    double sum = 0.0;
    for (std::size_t j = s + 1 - static_cast<std::size_t>(w0); j <= s; ++j)
        sum += returns[j] * returns[j];
    return sum / static_cast<double>(w0);
}

namespace detail {

/// Prefix sums of squares; window mean-squares in O(1). All bound estimators
/// share this path so that min/max comparisons see identical values.
class VarianceScanner {
public:
    explicit VarianceScanner(std::span<const double> returns) : prefix_(returns.size() + 1, 0.0) {
        for (std::size_t i = 0; i < returns.size(); ++i)
            prefix_[i + 1] = prefix_[i] + returns[i] * returns[i];
    }

    double window_mean_square(std::size_t end_inclusive, int w0) const {
        return (prefix_[end_inclusive + 1] - prefix_[end_inclusive + 1 - static_cast<std::size_t>(w0)]) /
               static_cast<double>(w0);
    }

private:
    std::vector<double> prefix_;
};

inline void check_bounds_preconditions(std::size_t n, std::size_t t, int w, int w0) {
    if (w0 < 1 || w < 1 || w0 > w)
        throw std::invalid_argument("sigma_bounds: need 1 <= W0 <= W");
    if (t >= n || t + 1 < static_cast<std::size_t>(w))
        throw std::out_of_range("sigma_bounds: not enough history before the forecast origin");
}

inline SigmaBounds finalize_bounds(double lo, double hi, std::size_t t, int w, int w0, BoundsMethod method) {
    if (lo < kDegenerateVariance) {
        std::ostringstream msg;
        msg << "sigma_bounds: degenerate lower variance " << lo << " at t=" << t
            << " (dead-flat window cannot parameterize a G-normal)";
        throw DataError(msg.str());
    }
    return SigmaBounds{lo, hi, t, w, w0, method};
}

} // namespace detail

/// Overlapping min/max variance bounds: extremes of the rolling zero-mean
/// variance over every sub-window of length w0 inside the trailing w-window.
inline SigmaBounds sigma_bounds_overlapping(std::span<const double> returns, std::size_t t, int w, int w0) {
    detail::check_bounds_preconditions(returns.size(), t, w, w0);
    const detail::VarianceScanner scan(returns);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int s = 0; s <= w - w0; ++s) {
        const double v = scan.window_mean_square(t - static_cast<std::size_t>(s), w0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return detail::finalize_bounds(lo, hi, t, w, w0, BoundsMethod::overlapping);
}

/// Disjoint variant: extremes over the k = floor(w/w0) non-overlapping
/// sub-windows at offsets 0, w0, 2 w0, ...
inline SigmaBounds sigma_bounds_disjoint(std::span<const double> returns, std::size_t t, int w, int w0) {
    detail::check_bounds_preconditions(returns.size(), t, w, w0);
    const detail::VarianceScanner scan(returns);
    const int k = w / w0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
        const double v = scan.window_mean_square(t - static_cast<std::size_t>(j) * w0, w0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return detail::finalize_bounds(lo, hi, t, w, w0, BoundsMethod::disjoint);
}

inline SigmaBounds sigma_bounds(std::span<const double> returns, std::size_t t, int w, int w0,
                                BoundsMethod method) {
    return method == BoundsMethod::overlapping ? sigma_bounds_overlapping(returns, t, w, w0)
                                               : sigma_bounds_disjoint(returns, t, w, w0);
}

/// No-intercept AR(1) slope over a window: a = sum r_t r_{t-1} / sum r_{t-1}^2.
inline double fit_ar1(std::span<const double> window) {
    if (window.size() < 30)
        throw std::invalid_argument("fit_ar1: window must hold at least 30 observations");
    double num = 0.0, den = 0.0;
    for (std::size_t s = 1; s < window.size(); ++s) {
        num += window[s] * window[s - 1];
        den += window[s - 1] * window[s - 1];
    }
    if (den < kDegenerateVariance)
        throw DataError("fit_ar1: zero-variance window");
    return num / den;
}

namespace detail {

/// Amortized O(1) sliding min/max of window mean-squares across consecutive
/// forecast origins (monotonic deques over the same scanner values).
class RollingBoundsScanner {
public:
    RollingBoundsScanner(std::span<const double> returns, int w, int w0)
        : scan_(returns), n_(returns.size()), w_(w), w0_(w0) {
        if (w0 < 1 || w0 > w) throw std::invalid_argument("RollingBoundsScanner: need 1 <= W0 <= W");
    }

    /// Bounds at origin t; origins must be queried in increasing order.
    SigmaBounds at(std::size_t t) {
        check_bounds_preconditions(n_, t, w_, w0_);
        const std::size_t lo_end = t - static_cast<std::size_t>(w_ - w0_); // oldest window end
        while (next_end_ <= t) {
            if (next_end_ + 1 >= static_cast<std::size_t>(w0_)) push(next_end_);
            ++next_end_;
        }
        while (!min_q_.empty() && min_q_.front().first < lo_end) min_q_.pop_front();
        while (!max_q_.empty() && max_q_.front().first < lo_end) max_q_.pop_front();
        return finalize_bounds(min_q_.front().second, max_q_.front().second, t, w_, w0_,
                               BoundsMethod::overlapping);
    }

private:
    void push(std::size_t end) {
        const double v = scan_.window_mean_square(end, w0_);
        while (!min_q_.empty() && min_q_.back().second >= v) min_q_.pop_back();
        min_q_.emplace_back(end, v);
        while (!max_q_.empty() && max_q_.back().second <= v) max_q_.pop_back();
        max_q_.emplace_back(end, v);
    }

    VarianceScanner scan_;
    std::size_t n_;
    int w_;
    int w0_;
    std::size_t next_end_ = 0;
    std::deque<std::pair<std::size_t, double>> min_q_;
    std::deque<std::pair<std::size_t, double>> max_q_;
};

} // namespace detail

} // namespace gvar
