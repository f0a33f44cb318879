#pragma once

// Exact Fourier-mode flow of the linearized system
//   a_t + alpha |D| u = 0,   u_t - mu u_yy - beta |D| a = 0,
// whose symbol is A(xi) = [[0, -alpha|xi|], [beta|xi|, -mu xi^2]].
//
// On the Lagrangian side the velocity v is tied to u by u^ = i sgn(xi) v^, so
// the normalized system a_t = v_y, v_t = a_y + v_yy is alpha = beta = -1, mu = 1.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "trajectory.hpp"

namespace lagns {

struct LinearParams {
    double alpha = -1.0;
    double beta = -1.0;
    double mu = 1.0;

    void validate() const {
        if (alpha == 0.0 || beta == 0.0 || (alpha > 0.0) != (beta > 0.0))
            throw Error("coupling constants must share a nonzero sign");
        if (!(mu > 0.0)) throw Error("viscosity coefficient must be positive");
    }

    /// Normalized Lagrangian system.
    static LinearParams normalized() { return {-1.0, -1.0, 1.0}; }
    /// Linearization of the reduced system with parameters Ma, nu_bar.
    static LinearParams reduced(double Ma, double nu_bar) { return {-1.0, -1.0 / (Ma * Ma), nu_bar}; }
    /// Linearization of the diffusively rescaled system.
    static LinearParams diffusive(double Ma, double nu_bar) {
        return {-1.0, -nu_bar * nu_bar / (Ma * Ma), nu_bar * nu_bar};
    }
};

enum class Regime { real, oscillatory, degenerate };

inline constexpr double degenerate_window = 1e-8;

/// Eigen-data of one mode. R is the principal square root of
/// 1 - 4 alpha beta / (mu xi)^2: real in the real regime, purely imaginary
/// in the oscillatory one. lambda_pm = -mu xi^2 (1 +- R) / 2.
struct ModeSolution {
    double xi = 0.0;
    Regime regime = Regime::real;
    cplx lambda_plus;
    cplx lambda_minus;
    cplx R;
    cplx one_minus_R;  ///< 1 - R without cancellation at large |xi|

    /// 1 - 1/R, likewise.
    cplx one_minus_inv_R() const { return -one_minus_R / R; }
};

inline ModeSolution mode_spectrum(double xi, const LinearParams& p) {
    if (xi == 0.0) throw Error("zero frequency has no modal decomposition");
    p.validate();
    const double ax = std::abs(xi);
    const double q = 4.0 * p.alpha * p.beta / (p.mu * p.mu * ax * ax);
    const double r2 = 1.0 - q;
    ModeSolution s;
    s.xi = xi;
    s.regime = std::abs(r2) < degenerate_window ? Regime::degenerate : r2 > 0.0 ? Regime::real : Regime::oscillatory;
    s.R = std::sqrt(cplx(r2, 0.0));
    s.one_minus_R = q / (1.0 + s.R);
    const double half = -0.5 * p.mu * ax * ax;
    s.lambda_plus = half * (1.0 + s.R);
    s.lambda_minus = half * s.one_minus_R;
    return s;
}

/// Real 2x2 matrix acting on (a^, u^).
using Mat2 = std::array<std::array<double, 2>, 2>;

namespace detail {

// cosh(sqrt z) and sinh(sqrt z)/sqrt z for real z of either sign.
inline std::pair<double, double> cosh_sinhc(double z) {
    if (std::abs(z) < 1.0) {
        double c = 0.0, s = 0.0, term = 1.0;
        for (int k = 0; k < 30; ++k) {
            // term = z^k / (2k)!
            c += term;
            s += term / (2.0 * k + 1.0);
            term *= z / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
        }
        return {c, s};
    }
    if (z > 0.0) {
        const double r = std::sqrt(z);
        return {std::cosh(r), std::sinh(r) / r};
    }
    const double r = std::sqrt(-z);
    return {std::cos(r), std::sin(r) / r};
}

}  // namespace detail

/// exp(t A(xi)) with no sign restriction on t.
inline Mat2 mode_flow_unchecked(double xi, double t, const LinearParams& p) {
    const auto s = mode_spectrum(xi, p);
    if (t == 0.0) return {{{1.0, 0.0}, {0.0, 1.0}}};
    const double ax = std::abs(xi);
    const double mx2 = p.mu * ax * ax;
    if (s.regime == Regime::degenerate) {
        // e^{lt}[cosh(dt) I + t sinhc(dt) (A - l I)], l = -mu xi^2 / 2,
        // d^2 = mu^2 xi^4 / 4 - alpha beta xi^2. Entire in d^2, exact at d = 0.
        const double lam = -0.5 * mx2;
        const double d2 = 0.25 * mx2 * mx2 - p.alpha * p.beta * ax * ax;
        const auto [c, sc] = detail::cosh_sinhc(d2 * t * t);
        const double e = std::exp(lam * t);
        const double ts = t * sc;
        return {{{e * (c - lam * ts), e * ts * (-p.alpha * ax)},
                 {e * ts * (p.beta * ax), e * (c + (-mx2 - lam) * ts)}}};
    }
    const cplx em = std::exp(s.lambda_minus * t);
    const cplx ep = std::exp(s.lambda_plus * t);
    const cplx inv_r = 1.0 / s.R;
    const cplx lo = 0.5 * s.one_minus_inv_R();
    const cplx diff = (em - ep) * inv_r / (p.mu * ax);
    return {{{(0.5 * (1.0 + inv_r) * em + lo * ep).real(), (-p.alpha * diff).real()},
             {(p.beta * diff).real(), (lo * em + 0.5 * (1.0 + inv_r) * ep).real()}}};
}

inline Mat2 mode_flow(double xi, double t, const LinearParams& p) {
    if (t < 0.0) throw Error("negative propagation time");
    return mode_flow_unchecked(xi, t, p);
}

/// (a^(t), u^(t)) from (a^_0, u^_0).
inline std::pair<cplx, cplx> propagate_mode(cplx a0, cplx u0, double xi, double t, const LinearParams& p) {
    const Mat2 m = mode_flow(xi, t, p);
    return {m[0][0] * a0 + m[0][1] * u0, m[1][0] * a0 + m[1][1] * u0};
}

/// Complex 2x2 action on (a^_k, v^_k) for one nonnegative mode index k.
struct ModeAction {
    cplx aa, av, va, vv;
};

/// Per-mode flow of one time increment on one grid, in (a, v) variables.
///
/// Interior modes use u^ = i v^. The zero mode is left unchanged. At the
/// Nyquist mode odd derivatives vanish, so a is frozen and v decays by
/// exp(-mu xi^2 t).
class ModeTable {
  public:
    ModeTable() = default;
    ModeTable(const Grid& g, double t, const LinearParams& p, bool allow_negative = false) : grid_(g), t_(t) {
        if (t < 0.0 && !allow_negative) throw Error("negative propagation time");
        const std::size_t nyq = g.nyquist();
        actions_.resize(nyq + 1);
        actions_[0] = {1.0, 0.0, 0.0, 1.0};
        for (std::size_t k = 1; k < nyq; ++k) {
            const Mat2 m = mode_flow_unchecked(g.wavenumber(k), t, p);
            const cplx i(0.0, 1.0);
            actions_[k] = {m[0][0], i * m[0][1], -i * m[1][0], m[1][1]};
        }
        const double xn = g.wavenumber(nyq);
        actions_[nyq] = {1.0, 0.0, 0.0, std::exp(-p.mu * xn * xn * t)};
    }

    const Grid& grid() const { return grid_; }
    double time() const { return t_; }
    const ModeAction& operator[](std::size_t k) const { return actions_[k]; }

    FluidState apply(const FluidState& s) const {
        if (!(s.grid() == grid_)) throw Error("state and propagator live on different grids");
        const auto ca = s.a.coefficients();
        const auto cv = s.v.coefficients();
        std::vector<cplx> na(ca.size()), nv(cv.size());
        for (std::size_t k = 0; k < ca.size(); ++k) {
            const auto& m = actions_[k];
            na[k] = m.aa * ca[k] + m.av * cv[k];
            nv[k] = m.va * ca[k] + m.vv * cv[k];
        }
        return {SpectralField::from_coefficients(grid_, std::move(na)),
                SpectralField::from_coefficients(grid_, std::move(nv)), s.t + t_};
    }

  private:
    Grid grid_{};
    double t_ = 0.0;
    std::vector<ModeAction> actions_;
};

/// Exact linear flow of a whole state over time t.
inline FluidState propagate_field(const FluidState& s, double t, const LinearParams& p) {
    return ModeTable(s.grid(), t, p).apply(s);
}

/// Linear flow run backwards in time (only meaningful for the linear system).
inline FluidState propagate_field_reverse(const FluidState& s, double t, const LinearParams& p) {
    return ModeTable(s.grid(), -t, p, true).apply(s);
}

/// Heat-only flow a -> a, v -> exp(t mu d_yy) v: the velocity channel with the
/// coupling removed. Used as a diffusion control.
inline FluidState propagate_heat(const FluidState& s, double t, double mu = 1.0) {
    auto v = apply_multiplier(s.v, [&](std::size_t, double xi) -> cplx { return std::exp(-mu * xi * xi * t); });
    return {s.a, std::move(v), s.t + t};
}

/// Fourier transform of w_y = v_y + beta/(alpha mu) a at time t from the data
/// (w_{0,y}^, v_{0,y}^) at one frequency.
inline cplx effective_flux_hat(cplx w0y, cplx v0y, double xi, double t, const LinearParams& p) {
    if (t < 0.0) throw Error("negative propagation time");
    const auto s = mode_spectrum(xi, p);
    const double c = p.beta / (p.alpha * p.mu);
    if (s.regime == Regime::degenerate) {
        const cplx i(0.0, 1.0);
        const cplx v0 = v0y / (i * xi);
        const cplx a0 = (w0y - v0y) / c;
        const double sg = xi > 0 ? 1.0 : -1.0;
        const auto [a, u] = propagate_mode(a0, i * sg * v0, xi, t, p);
        const cplx v = -i * sg * u;
        return i * xi * v + c * a;
    }
    const cplx em = std::exp(s.lambda_minus * t);
    const cplx ep = std::exp(s.lambda_plus * t);
    const cplx inv_r = 1.0 / s.R;
    const cplx w = 0.5 * (s.one_minus_inv_R() * em + (1.0 + inv_r) * ep) * w0y +
                   (em - ep) * inv_r * (p.alpha * p.beta / (p.mu * p.mu * xi * xi)) * v0y;
    return w;
}

}  // namespace lagns
