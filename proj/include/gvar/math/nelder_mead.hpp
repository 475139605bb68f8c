#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gvar {

struct NelderMeadOptions {
    int max_iter = 4000;
    double tol_f = 1e-11; // spread of function values across the simplex
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Downhill simplex minimization (Nelder-Mead). Objectives may return +inf
/// to mark infeasible points; the initial point must be finite.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    const std::vector<double>& x0,
                                    const std::vector<double>& step,
                                    const NelderMeadOptions& opts = {}) {
    const std::size_t n = x0.size();
    if (n == 0 || step.size() != n)
        throw std::invalid_argument("nelder_mead: bad initial point / step sizes");

    constexpr double refl = 1.0, expn = 2.0, ctr = 0.5, shrink = 0.5;

    std::vector<std::vector<double>> x(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) x[i + 1][i] += step[i];
    std::vector<double> fx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fx[i] = f(x[i]);

    std::vector<std::size_t> idx(n + 1);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<double> xc(n), xr(n), xe(n), xk(n);

    NelderMeadResult result;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        const double fbest = fx[idx[0]];
        const double fworst = fx[idx[n]];
        if (std::isfinite(fworst) && fworst - fbest <= opts.tol_f) {
            result.converged = true;
            break;
        }

        std::fill(xc.begin(), xc.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) xc[j] += x[idx[i]][j];
        for (std::size_t j = 0; j < n; ++j) xc[j] /= static_cast<double>(n);

        const std::vector<double>& xw = x[idx[n]];
        for (std::size_t j = 0; j < n; ++j) xr[j] = xc[j] + refl * (xc[j] - xw[j]);
        const double fr = f(xr);
        const double fsecond = fx[idx[n - 1]];

        if (fr < fbest) {
            for (std::size_t j = 0; j < n; ++j) xe[j] = xc[j] + expn * (xr[j] - xc[j]);
            const double fe = f(xe);
            if (fe < fr) {
                x[idx[n]] = xe;
                fx[idx[n]] = fe;
            } else {
                x[idx[n]] = xr;
                fx[idx[n]] = fr;
            }
            continue;
        }
        if (fr < fsecond) {
            x[idx[n]] = xr;
            fx[idx[n]] = fr;
            continue;
        }
        if (fr < fx[idx[n]]) {
            for (std::size_t j = 0; j < n; ++j) xk[j] = xc[j] + ctr * (xr[j] - xc[j]);
        } else {
            for (std::size_t j = 0; j < n; ++j) xk[j] = xc[j] + ctr * (xw[j] - xc[j]);
        }
        const double fk = f(xk);
        if (fk < fx[idx[n]]) {
            x[idx[n]] = xk;
            fx[idx[n]] = fk;
            continue;
        }
        const std::vector<double>& xb = x[idx[0]];
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                x[idx[i]][j] = xb[j] + shrink * (x[idx[i]][j] - xb[j]);
            fx[idx[i]] = f(x[idx[i]]);
        }
    }

    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    result.x = x[idx[0]];
    result.fx = fx[idx[0]];
    result.iterations = it;
    return result;
}

} // namespace gvar
