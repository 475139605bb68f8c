#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "gvar/errors.hpp"
#include "gvar/gnormal.hpp"

namespace gvar {

/// Uniform space-time grid for the explicit finite-difference solver.
struct GridSpec {
    double x_min;
    double x_max;
    double dx;
    double t_end;
    double dt;

    static constexpr double cfl_safety = 0.45;

    void validate() const {
        if (!(x_min < 0.0) || !(x_max > 0.0))
            throw ConfigError("GridSpec: domain must straddle zero");
        if (!(dx > 0.0) || !(dt > 0.0) || !(t_end > 0.0))
            throw ConfigError("GridSpec: dx, dt, t_end must be positive");
    }
};

/// Default truncation [-8 sigma_hi sqrt(t), 8 sigma_hi sqrt(t)]; the tail mass
/// beyond eight standard deviations is below 1e-14.
inline GridSpec default_grid(const GNormalParams& p, double t_end = 1.0, double dx = 0.01) {
    const double half = 8.0 * p.sigma_hi * std::sqrt(t_end);
    return GridSpec{-half, half, dx, t_end, GridSpec::cfl_safety * dx * dx / (p.sigma_hi * p.sigma_hi)};
}

struct PdeSolution {
    std::vector<double> x_nodes;
    std::vector<double> u_values;
    GridSpec grid;
};

/// Explicit time stepping for  u_t = G(u_xx)  with step initial data
/// (0 left of the origin, 1 right of it, 1/2 at the node nearest zero) and
/// Dirichlet boundaries u(x_min) = 0, u(x_max) = 1. Solves up to t_end.
inline PdeSolution solve_nonlinear_heat(const GNormalParams& p, const GridSpec& g) {
    g.validate();
    const double dt_max = GridSpec::cfl_safety * g.dx * g.dx / (p.sigma_hi * p.sigma_hi);
    if (g.dt > dt_max * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "solve_nonlinear_heat: dt=" << g.dt << " violates the CFL bound; "
            << "maximal admissible dt=" << dt_max;
        throw ConfigError(msg.str());
    }

    const auto n_nodes = static_cast<std::size_t>(std::llround((g.x_max - g.x_min) / g.dx)) + 1;
    if (n_nodes < 3)
        throw ConfigError("solve_nonlinear_heat: grid needs at least one interior node");
    std::vector<double> x(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) x[i] = g.x_min + static_cast<double>(i) * g.dx;

    std::vector<double> u(n_nodes);
    std::size_t nearest = 0;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        u[i] = x[i] >= 0.0 ? 1.0 : 0.0;
        if (std::fabs(x[i]) < std::fabs(x[nearest])) nearest = i;
    }
    u[nearest] = 0.5;
    u.front() = 0.0;
    u.back() = 1.0;

    const auto n_steps = static_cast<std::size_t>(std::ceil(g.t_end / g.dt - 1e-12));
    const double dt = g.t_end / static_cast<double>(n_steps);
    const double inv_dx2 = 1.0 / (g.dx * g.dx);
    const std::size_t checkpoint = std::max<std::size_t>(1, n_steps / 10);

    std::vector<double> next(u);
    for (std::size_t step = 0; step < n_steps; ++step) {
        for (std::size_t i = 1; i + 1 < n_nodes; ++i) {
            const double d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_dx2;
            next[i] = u[i] + dt * g_function(d2, p);
        }
        u.swap(next);
        if ((step + 1) % checkpoint == 0) {
            // Monotone scheme under the CFL bound: profiles stay non-decreasing.
            for (std::size_t i = 1; i < n_nodes; ++i)
                if (u[i] < u[i - 1] - 1e-12)
                    throw std::logic_error("solve_nonlinear_heat: monotonicity lost");
        }
    }

    return PdeSolution{std::move(x), std::move(u), GridSpec{g.x_min, g.x_max, g.dx, g.t_end, dt}};
}

struct PdeErrorReport {
    double max_abs_error = 0.0;
    double worst_x = 0.0;
    PdeSolution solution;
};

/// Maximum node-wise gap between the finite-difference solution at t_end and
/// the closed-form CDF mapped through the self-similarity u(t, x) = F(x/sqrt(t)).
inline PdeErrorReport verify_closed_form(const GNormalParams& p, const GridSpec& g) {
    PdeErrorReport report;
    report.solution = solve_nonlinear_heat(p, g);
    const double inv_sqrt_t = 1.0 / std::sqrt(g.t_end);
    for (std::size_t i = 0; i < report.solution.x_nodes.size(); ++i) {
        const double exact = gnormal_cdf(report.solution.x_nodes[i] * inv_sqrt_t, p);
        const double err = std::fabs(report.solution.u_values[i] - exact);
        if (err > report.max_abs_error) {
            report.max_abs_error = err;
            report.worst_x = report.solution.x_nodes[i];
        }
    }
    return report;
}

} // namespace gvar
