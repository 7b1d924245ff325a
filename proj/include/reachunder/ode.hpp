#ifndef REACHUNDER_ODE_HPP
#define REACHUNDER_ODE_HPP

#include <algorithm>
#include <cmath>
#include <span>

#include "reachunder/dynamics.hpp"

namespace reachunder {

/// Lower bound on RK4 steps per panel; short panels near singular points
/// still get enough steps for the local error to stay small.
inline constexpr int min_panel_steps = 16;

/// Classic fourth-order Runge-Kutta over consecutive panels.
///
/// Each panel [edges[p], edges[p+1]] gets max(min_steps, ceil(len / h_max))
/// equal steps. `rhs(t, side, y)` returns dy/dt; stages at a panel's left
/// edge see Side::right and stages at its right edge see Side::left, so
/// piecewise data is sampled from inside the panel.
template <class State, class Rhs>
State rk4_panels(State y, std::span<const double> edges, double h_max, int min_steps, Rhs&& rhs)
{
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double a = edges[p];
        const double b = edges[p + 1];
        const double len = b - a;
        if (len <= 0.0) {
            continue;
        }
        const int steps = std::max(min_steps, static_cast<int>(std::ceil(len / h_max - 1e-9)));
        const double h = len / steps;
        for (int k = 0; k < steps; ++k) {
            const double t0 = a + k * h;
            const double t1 = k + 1 == steps ? b : a + (k + 1) * h;
            const double tm = 0.5 * (t0 + t1);
            const State k1 = rhs(t0, Side::right, y);
            const State k2 = rhs(tm, Side::right, State(y + (0.5 * h) * k1));
            const State k3 = rhs(tm, Side::right, State(y + (0.5 * h) * k2));
            const State k4 = rhs(t1, Side::left, State(y + h * k3));
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return y;
}

}  // namespace reachunder

#endif
