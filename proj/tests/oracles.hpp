#pragma once

// Independent reference computations used by the unit tests and the
// acceptance binary. Nothing here is called by the library.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "lyo/solver.hpp"

namespace oracle {

// Composite Simpson rule over every accepted step, with the midpoint taken
// from the step's dense interpolant.
inline double integrate_along(const lyo::Solution& sol,
                              const std::function<double(double, std::span<const double>)>& g) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < sol.size(); ++i) {
        const auto seg = sol.segment(i);
        const double h = seg.t1 - seg.t0;
        if (h <= 0.0) continue;
        const double tm = 0.5 * (seg.t0 + seg.t1);
        const auto ym = seg.eval(tm);
        total += h / 6.0 * (g(seg.t0, sol.y[i]) + 4.0 * g(tm, ym) + g(seg.t1, sol.y[i + 1]));
    }
    return total;
}

// Plain trapezoid on tabulated samples.
inline double trapezoid(const std::vector<double>& t, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) s += 0.5 * (t[i + 1] - t[i]) * (v[i] + v[i + 1]);
    return s;
}

// Fixed-point solution of the adiabatic nucleation balance
//   (T - T_n) C = x dH,  T_fw - T = beta / (m_w - x).
struct Jump {
    double T;
    double x;
};
inline Jump nucleation_fixed_point(double T_n, double C, double dH, double beta, double m_w,
                                   double T_fw) {
    double x = 0.0;
    for (int it = 0; it < 1000; ++it) {
        const double T = T_fw - beta / (m_w - x);
        const double x_new = (T - T_n) * C / dH;
        if (std::abs(x_new - x) < 1e-18) {
            x = x_new;
            break;
        }
        x = x_new;
    }
    return {T_n + x * dH / C, x};
}

}  // namespace oracle
