#pragma once

// Eulerian <-> mass-Lagrangian coordinates on the torus, the reduction and
// normalizing rescalings, and the effective velocity.

#include <cmath>
#include <vector>

// Boost 1.74's pchip calls isnan unqualified.
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>

#include "model.hpp"

namespace lagns {

/// Density and velocity on an Eulerian torus of length L_x.
struct EulerianState {
    SpectralField rho;
    SpectralField u;

    double length() const { return rho.length(); }
    double mass() const { return rho.mean() * rho.length(); }
};

/// Sampled coordinate map between an Eulerian grid (length L_x) and a
/// Lagrangian grid (length M, total mass). y_of_x[i] = y(x_i) and
/// x_of_y[i] = x(y_i), both strictly increasing.
struct CoordinateMap {
    Grid x_grid;
    Grid y_grid;
    std::vector<double> y_of_x;
    std::vector<double> x_of_y;
};

namespace detail {

// Nondecreasing lift of a circle map: X(s) = c*s + P(s) - P(0) with P periodic.
// Solves X(s) = target for every target on a uniform grid of [0, c*L).
// The monotone cubic through the samples gives the first guess; Newton on the
// trigonometric interpolant then polishes it to round-off.
inline std::vector<double> invert_lift(const SpectralField& density, const SpectralField& periodic_part,
                                       double slope, std::size_t n_out) {
    const Grid& g = density.grid();
    const double p0 = periodic_part.samples()[0];
    const double span = slope * g.length;

    std::vector<double> s(g.n + 1), x(g.n + 1);
    for (std::size_t i = 0; i <= g.n; ++i) {
        s[i] = g.point(i);
        x[i] = slope * s[i] + periodic_part.samples()[i % g.n] - p0;
    }
    for (std::size_t i = 1; i <= g.n; ++i)
        if (!(x[i] > x[i - 1])) throw Error("coordinate map is not strictly increasing");

    // pchip wants (abscissa = lifted value, ordinate = parameter).
    std::vector<double> xs(x), ss(s);
    boost::math::interpolators::pchip<std::vector<double>> guess(std::move(xs), std::move(ss));

    std::vector<double> out(n_out);
    const double dt = span / static_cast<double>(n_out);
    for (std::size_t i = 0; i < n_out; ++i) {
        const double target = dt * static_cast<double>(i);
        double si = guess(target);
        for (int it = 0; it < 30; ++it) {
            const double f = slope * si + evaluate(periodic_part, si) - p0 - target;
            const double d = evaluate(density, si);
            const double step = f / d;
            si -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(si))) break;
        }
        out[i] = si;
    }
    return out;
}

}  // namespace detail

/// y(x) = integral of rho from 0 to x; eta = 1/rho and v = u resampled on a
/// uniform grid of n_y points over [0, M).
struct LagrangianData {
    SpectralField eta;
    SpectralField v;
    CoordinateMap map;
};

inline LagrangianData to_lagrangian(const EulerianState& s, std::size_t n_y) {
    if (!(s.rho.grid() == s.u.grid())) throw Error("density and velocity live on different grids");
    if (!(s.rho.min() > 0.0)) throw Error("nonpositive density");
    const Grid& gx = s.rho.grid();
    const double rho0 = s.rho.mean();
    const double mass = rho0 * gx.length;
    const Grid gy{n_y, mass};
    gy.validate();

    const auto prim = antiderivative(s.rho);
    CoordinateMap map{gx, gy, {}, {}};
    map.y_of_x.resize(gx.n);
    for (std::size_t i = 0; i < gx.n; ++i)
        map.y_of_x[i] = rho0 * gx.point(i) + prim.samples()[i] - prim.samples()[0];
    map.x_of_y = detail::invert_lift(s.rho, prim, rho0, n_y);

    std::vector<double> eta(n_y), v(n_y);
    for (std::size_t i = 0; i < n_y; ++i) {
        eta[i] = 1.0 / evaluate(s.rho, map.x_of_y[i]);
        v[i] = evaluate(s.u, map.x_of_y[i]);
    }
    return {SpectralField::from_samples(gy, std::move(eta)), SpectralField::from_samples(gy, std::move(v)),
            std::move(map)};
}

/// x(y) = integral of eta from 0 to y; rho = 1/eta and u = v resampled on a
/// uniform grid of n_x points over [0, L_x), L_x = integral of eta.
inline EulerianState to_eulerian(const SpectralField& eta, const SpectralField& v, std::size_t n_x) {
    if (!(eta.grid() == v.grid())) throw Error("specific volume and velocity live on different grids");
    if (!(eta.min() > 0.0)) throw Error("nonpositive specific volume");
    const double eta0 = eta.mean();
    const Grid gx{n_x, eta0 * eta.length()};
    gx.validate();
    const auto prim = antiderivative(eta);
    const auto y_of_x = detail::invert_lift(eta, prim, eta0, n_x);

    std::vector<double> rho(n_x), u(n_x);
    for (std::size_t i = 0; i < n_x; ++i) {
        rho[i] = 1.0 / evaluate(eta, y_of_x[i]);
        u[i] = evaluate(v, y_of_x[i]);
    }
    return {SpectralField::from_samples(gx, std::move(rho)), SpectralField::from_samples(gx, std::move(u))};
}

enum class Direction { forward, backward };

/// eta = eta_bar * eta~, v = eta_bar * v~. Forward maps physical (a, v) with
/// a = eta - eta_bar to the reduced perturbation a~ = eta~ - 1.
inline FluidState reduce_reference_volume(const FluidState& s, double eta_bar, Direction dir) {
    const double f = dir == Direction::forward ? 1.0 / eta_bar : eta_bar;
    return {f * s.a, f * s.v, s.t};
}

/// Scale factors of the normalizing change of variables:
/// T = Ma^-2 nu_bar^-1, Y = Ma^-1 nu_bar^-1, V = Ma^-1.
struct Scaling {
    double T = 1.0;
    double Y = 1.0;
    double V = 1.0;

    static Scaling of(const ModelParams& m) {
        return {1.0 / (m.Ma * m.Ma * m.nu_bar), 1.0 / (m.Ma * m.nu_bar), 1.0 / m.Ma};
    }
};

/// eta~(t, y) = eta_n(T t, Y y), v~(t, y) = V v_n(T t, Y y).
///
/// On a uniform periodic grid the dilation only relabels the domain length
/// (L -> Y L) and the time stamp (t -> T t); the samples of a are unchanged
/// and those of v are divided by V. No interpolation is needed for any Y.
inline FluidState rescale_normalize(const FluidState& s, const ModelParams& m, Direction dir) {
    const Scaling k = Scaling::of(m);
    if (dir == Direction::forward) {
        const double len = k.Y * s.a.length();
        return {s.a.with_length(len), (1.0 / k.V) * s.v.with_length(len), k.T * s.t};
    }
    const double len = s.a.length() / k.Y;
    return {s.a.with_length(len), k.V * s.v.with_length(len), s.t / k.T};
}

/// (eta, v)(t, y) = (eta_d, v_d / nu_bar)(t / nu_bar, y). Forward maps (eta, v)
/// to the diffusive variables (eta_d, v_d).
inline FluidState diffusive_rescale(const FluidState& s, double nu_bar, Direction dir) {
    if (!(nu_bar > 0.0)) throw Error("nonpositive viscosity");
    if (dir == Direction::forward) return {s.a, nu_bar * s.v, s.t / nu_bar};
    return {s.a, (1.0 / nu_bar) * s.v, s.t * nu_bar};
}

/// w = v + A with A the zero-mean antiderivative of a.
inline SpectralField effective_velocity(const SpectralField& a, const SpectralField& v) {
    if (std::abs(a.mean()) > 1e-10) throw Error("antiderivative not periodic");
    return v + antiderivative(a);
}

}  // namespace lagns
