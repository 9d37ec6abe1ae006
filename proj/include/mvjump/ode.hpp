// Fixed-step classical RK4 for scalar linear ODEs x' = a(t) x + b(t).

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mvjump/errors.hpp"
#include "mvjump/grid.hpp"

namespace mvjump {

enum class Direction { Forward, Backward };

enum class StagePos { Left, Mid, Right };

/// Where inside a grid cell an RK4 stage is evaluated. Coefficient lookups
/// key on `cell` so values at a breakpoint node come from the cell being
/// stepped across, never from its neighbour.
struct Stage {
    std::size_t cell;
    StagePos pos;
    double t;
};

/// Solves x' = a x + b on `spec` with the boundary value placed at t0
/// (Forward) or t1 (Backward). Backward problems are stepped in reversed time.
/// `a` and `b` are callables `double(const Stage&)`.
template <class A, class B>
SolutionGrid integrate_scalar_linear(A&& a, B&& b, double boundary, Direction dir,
                                     const GridSpec& spec) {
    spec.check();
    const std::size_t n = spec.n;
    const double h = spec.step();
    std::vector<double> x(n + 1);

    auto f = [&](const Stage& s, double v) { return a(s) * v + b(s); };

    if (dir == Direction::Forward) {
        x[0] = boundary;
        for (std::size_t k = 0; k < n; ++k) {
            const Stage left{k, StagePos::Left, spec.node(k)};
            const Stage mid{k, StagePos::Mid, spec.cell_mid(k)};
            const Stage right{k, StagePos::Right, spec.node(k + 1)};
            const double v = x[k];
            const double k1 = f(left, v);
            const double k2 = f(mid, v + 0.5 * h * k1);
            const double k3 = f(mid, v + 0.5 * h * k2);
            const double k4 = f(right, v + h * k3);
            x[k + 1] = v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!std::isfinite(x[k + 1])) throw IntegrationError("non-finite ODE value", k + 1);
        }
    } else {
        x[n] = boundary;
        for (std::size_t k = n; k-- > 0;) {
            const Stage right{k, StagePos::Right, spec.node(k + 1)};
            const Stage mid{k, StagePos::Mid, spec.cell_mid(k)};
            const Stage left{k, StagePos::Left, spec.node(k)};
            const double v = x[k + 1];
            const double k1 = f(right, v);
            const double k2 = f(mid, v - 0.5 * h * k1);
            const double k3 = f(mid, v - 0.5 * h * k2);
            const double k4 = f(left, v - h * k3);
            x[k] = v - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!std::isfinite(x[k])) throw IntegrationError("non-finite ODE value", n - k);
        }
    }
    return SolutionGrid(spec, std::move(x));
}

/// Value of a grid function at a stage. Node stages read the grid directly;
/// midpoints use the cubic Hermite rule with the one-sided slopes `d_left`,
/// `d_right` supplied by the caller, which keeps coupled solves fourth order.
inline double stage_value(const SolutionGrid& g, const Stage& s, double d_left, double d_right) {
    switch (s.pos) {
        case StagePos::Left: return g[s.cell];
        case StagePos::Right: return g[s.cell + 1];
        case StagePos::Mid: break;
    }
    const double h = g.spec().step();
    return 0.5 * (g[s.cell] + g[s.cell + 1]) + h * (d_left - d_right) / 8.0;
}

}  // namespace mvjump
