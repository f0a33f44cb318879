#pragma once

// Pressure and viscosity laws in Lagrangian form, their normalization to the
// reference state (eta_bar = 1, Q'(1) = -1, nu(1) = 1), the nonlinearities
// a K(a) and L(a), and the solution, data and decay functionals.

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "trajectory.hpp"

namespace lagns {

/// Smooth scalar law with its first derivative.
struct ScalarLaw {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative;

    double operator()(double x) const { return value(x); }
};

namespace laws {

/// Q(eta) = -slope * (eta - eta_bar).
inline ScalarLaw affine_pressure(double slope, double eta_bar) {
    return {"affine", [=](double e) { return -slope * (e - eta_bar); }, [=](double) { return -slope; }};
}

/// Q(eta) = P(1/eta) - P(1/eta_bar) for P(rho) = A rho^gamma.
inline ScalarLaw gamma_pressure(double A, double gamma, double eta_bar) {
    const double ref = A * std::pow(eta_bar, -gamma);
    return {"gamma", [=](double e) { return A * std::pow(e, -gamma) - ref; },
            [=](double e) { return -A * gamma * std::pow(e, -gamma - 1.0); }};
}

/// Constant Eulerian viscosity mu: nu(eta) = mu / eta.
inline ScalarLaw constant_eulerian_viscosity(double mu) {
    return {"constant_eulerian", [=](double e) { return mu / e; }, [=](double e) { return -mu / (e * e); }};
}

/// Eulerian viscosity proportional to specific volume: nu(eta) = nu_bar.
inline ScalarLaw constant_lagrangian_viscosity(double nu_bar) {
    return {"constant_lagrangian", [=](double) { return nu_bar; }, [](double) { return 0.0; }};
}

}  // namespace laws

/// Admissible normalized specific volume interval [1/4, 4].
inline constexpr double admissible_low = 0.25;
inline constexpr double admissible_high = 4.0;

/// Reference state, scalar parameters and normalized laws.
///
/// q_check and nu_check_law are the normalized laws
///   Q^(x) = Ma^2 / eta_bar * (Q(eta_bar x) - Q(eta_bar)),  nu^(x) = nu(eta_bar x) / nu_bar,
/// so that Q^(1) = 0, Q^'(1) = -1 and nu^(1) = 1.
struct ModelParams {
    double eta_bar = 1.0;
    double Ma = 1.0;
    double nu_bar = 1.0;
    double nu_check = 1.0;  ///< Ma * nu_bar
    ScalarLaw pressure;
    ScalarLaw viscosity;
    ScalarLaw q_check;
    ScalarLaw nu_check_law;

    /// Parameters under which the diffusively rescaled system takes the
    /// normalized form: Ma -> Ma / nu_bar, nu_bar -> nu_bar^2, same laws.
    ModelParams diffusive() const {
        ModelParams d = *this;
        d.Ma = Ma / nu_bar;
        d.nu_bar = nu_bar * nu_bar;
        d.nu_check = d.Ma * d.nu_bar;
        return d;
    }

    /// Right-hand side of the pointwise limit ODE, nu_bar * (Q / nu)(theta),
    /// written through the normalized laws so it stays exact for any nu_bar.
    double limit_rate(double theta) const {
        const double x = theta / eta_bar;
        return eta_bar / (Ma * Ma) * q_check(x) / nu_check_law(x);
    }
};

inline ModelParams normalize(const ScalarLaw& pressure, const ScalarLaw& viscosity, double eta_bar) {
    if (!(eta_bar > 0.0)) throw Error("reference specific volume must be positive");
    const double dq = pressure.derivative(eta_bar);
    if (!(dq < 0.0)) throw Error("unstable reference state");
    const double nu_bar = viscosity(eta_bar);
    if (!(nu_bar > 0.0)) throw Error("nonpositive viscosity");

    ModelParams m;
    m.eta_bar = eta_bar;
    m.Ma = 1.0 / std::sqrt(-dq);
    m.nu_bar = nu_bar;
    m.nu_check = m.Ma * nu_bar;
    m.pressure = pressure;
    m.viscosity = viscosity;
    const double ma2 = m.Ma * m.Ma;
    const double q_ref = pressure(eta_bar);
    m.q_check = {"normalized " + pressure.name,
                 [=](double x) { return ma2 / eta_bar * (pressure(eta_bar * x) - q_ref); },
                 [=](double x) { return ma2 * pressure.derivative(eta_bar * x); }};
    m.nu_check_law = {"normalized " + viscosity.name, [=](double x) { return viscosity(eta_bar * x) / nu_bar; },
                      [=](double x) { return eta_bar * viscosity.derivative(eta_bar * x) / nu_bar; }};
    return m;
}

/// Throws unless every normalized specific volume 1 + a lies in the admissible interval.
inline void check_admissible(const SpectralField& a) {
    const double lo = 1.0 + a.min();
    const double hi = 1.0 + a.max();
    if (!(lo > 0.0)) throw Error("vacuum/negative specific volume");
    if (lo < admissible_low || hi > admissible_high) throw Error("state left perturbative regime");
}

/// Pointwise a K(a) = -(Q^(1+a) + a). K itself is never formed.
inline SpectralField eval_aK(const SpectralField& a, const ModelParams& m) {
    check_admissible(a);
    return pointwise(a, [&](double x) { return -(m.q_check(1.0 + x) + x); });
}

/// Pointwise L(a) = nu^(1+a) - 1.
inline SpectralField eval_L(const SpectralField& a, const ModelParams& m) {
    check_admissible(a);
    return pointwise(a, [&](double x) { return m.nu_check_law(1.0 + x) - 1.0; });
}

/// Left-hand side of the global-existence smallness condition (physical
/// variables, a0 = eta0 - eta_bar), split at j0 - log2(nu_check).
inline double smallness_lhs(const SpectralField& a0, const SpectralField& v0, const ModelParams& m, double p,
                            const DyadicFilterBank& bank, int j0 = 0) {
    const double alpha = 1.0 / m.nu_check;
    const BesovSpec low{2.0, 1.0, -0.5, FrequencyRange::low, j0, alpha};
    const BesovSpec a_high{p, 1.0, 1.0 / p, FrequencyRange::high, j0, alpha};
    const BesovSpec v_high{p, 1.0, -1.0 + 1.0 / p, FrequencyRange::high, j0, alpha};
    return besov_norm(a0, low, bank) / m.Ma + m.nu_bar * besov_norm(a0, a_high, bank) + besov_norm(v0, low, bank) +
           besov_norm(v0, v_high, bank);
}

/// Data functional X_{p,0} in normalized variables (alpha = 1).
inline double data_functional(const SpectralField& a0, const SpectralField& v0, double p,
                              const DyadicFilterBank& bank, int j0 = 0) {
    const BesovSpec low{2.0, 1.0, -0.5, FrequencyRange::low, j0, 1.0};
    const BesovSpec high{p, 1.0, -1.0 + 1.0 / p, FrequencyRange::high, j0, 1.0};
    return besov_norm(a0, low, bank) + besov_norm(v0, low, bank) + besov_norm(derivative(a0), high, bank) +
           besov_norm(v0, high, bank);
}

/// Solution functional X_p(t) at every snapshot, from the trajectory's
/// histories (a@2, v@2, a_y@p, v@p, v_yy@p, v_t@p).
inline std::vector<double> solution_functional_series(const Trajectory& traj, double p, int j0 = 0) {
    if (traj.empty()) throw Error("empty trajectory");
    const double inf = std::numeric_limits<double>::infinity();
    const BesovSpec lo_sup{2.0, 1.0, -0.5, FrequencyRange::low, j0, 1.0};
    const BesovSpec lo_int{2.0, 1.0, 1.5, FrequencyRange::low, j0, 1.0};
    const BesovSpec hi{p, 1.0, -1.0 + 1.0 / p, FrequencyRange::high, j0, 1.0};
    std::vector<double> out(traj.size(), 0.0);
    auto add = [&](const std::string& name, double m, const BesovSpec& s) {
        const auto v = tilde_norm_series(traj.history(name), m, s);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += v[k];
    };
    add(track::a2, inf, lo_sup);
    add(track::v2, inf, lo_sup);
    add(track::ay_p, inf, hi);
    add(track::v_p, inf, hi);
    add(track::a2, 1.0, lo_int);
    add(track::v2, 1.0, lo_int);
    add(track::ay_p, 1.0, hi);
    add(track::vyy_p, 1.0, hi);
    add(track::vt_p, 1.0, hi);
    return out;
}

struct DecayFunctionals {
    std::vector<double> times;
    std::vector<double> low;     ///< D^l(t)
    std::vector<double> high_a;  ///< D^h_a(t)
    std::vector<double> high_v;  ///< weighted high-frequency velocity functional

    std::vector<double> total() const {
        std::vector<double> s(times.size());
        for (std::size_t k = 0; k < s.size(); ++k) s[k] = low[k] + high_a[k] + high_v[k];
        return s;
    }
};

/// Time-weighted decay functionals (p = 2, normalized variables, alpha = 1).
/// Weights <t> = sqrt(1 + t^2) are applied per snapshot before the per-ring
/// time norms.
inline DecayFunctionals decay_functionals(const Trajectory& traj, const DyadicFilterBank& bank, int j0 = 0) {
    if (traj.empty()) throw Error("empty trajectory");
    const auto& ha = traj.history(track::a2);
    const auto& hv = traj.history(track::v2);
    if (ha.j_min() != bank.j_min() || ha.rings() != bank.count()) throw Error("history does not match filter bank");
    const double inf = std::numeric_limits<double>::infinity();
    auto bracket = [](double t) { return std::sqrt(1.0 + t * t); };

    const BesovSpec lo_32{2.0, 1.0, 1.5, FrequencyRange::low, j0, 1.0};
    const BesovSpec lo_52{2.0, 1.0, 2.5, FrequencyRange::low, j0, 1.0};
    const BesovSpec hi_12{2.0, 1.0, 0.5, FrequencyRange::high, j0, 1.0};
    const BesovSpec hi_32{2.0, 1.0, 1.5, FrequencyRange::high, j0, 1.0};

    const auto wa = ha.weighted(bracket);
    const auto wv = hv.weighted(bracket);
    const auto wa32 = ha.weighted([&](double t) { return std::pow(bracket(t), 1.5); });
    const auto wv_t = hv.weighted([&](double t) { return t * std::sqrt(bracket(t)); });

    DecayFunctionals d;
    d.times.assign(ha.times().begin(), ha.times().end());
    d.low.assign(d.times.size(), 0.0);
    for (const auto* h : {&wa, &wv}) {
        const auto s1 = tilde_norm_series(*h, inf, lo_32);
        const auto s2 = tilde_norm_series(*h, 2.0, lo_52);
        for (std::size_t k = 0; k < d.low.size(); ++k) d.low[k] += s1[k] + s2[k];
    }
    d.high_a = tilde_norm_series(wa32, inf, hi_12);
    d.high_v = tilde_norm_series(wv_t, inf, hi_32);
    return d;
}

}  // namespace lagns
