#pragma once

// Adaptive Dormand-Prince integration of the 2x2 mode system, independent of
// the closed-form propagator.

#include <array>

#include <boost/numeric/odeint.hpp>

#include "../linear_propagator.hpp"

namespace lagns::harness {

/// (a(t), u(t)) of a' = -alpha |xi| u, u' = beta |xi| a - mu xi^2 u from real data.
inline std::array<double, 2> mode_ode(double a0, double u0, double xi, double t, const LinearParams& p,
                                      double rel_tol = 1e-14) {
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 2>;
    const double ax = std::abs(xi);
    auto rhs = [&](const State& z, State& dz, double) {
        dz[0] = -p.alpha * ax * z[1];
        dz[1] = p.beta * ax * z[0] - p.mu * ax * ax * z[1];
    };
    State z{a0, u0};
    if (t == 0.0) return z;
    const double scale = std::max(std::abs(a0), std::abs(u0));
    const double h0 = std::min(t, 1e-3 / (1.0 + p.mu * ax * ax + std::sqrt(std::abs(p.alpha * p.beta)) * ax));
    auto stepper = ode::make_controlled(1e-300 * scale, rel_tol, ode::runge_kutta_dopri5<State>());
    ode::integrate_adaptive(stepper, rhs, z, 0.0, t, h0);
    return z;
}

}  // namespace lagns::harness
