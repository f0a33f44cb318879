#pragma once

// Exponential time differencing for
//   a_t - v_y = 0,   v_t - a_y - v_yy = g = (a K(a))_y + (L(a) v_y)_y,
// the diffusively scaled variant (solved through the normalizing rescaling),
// the Picard construction, the pointwise limit ODE and the diagnostic monitors.

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "linear_propagator.hpp"
#include "transforms.hpp"

namespace lagns {

enum class Scheme { etd1, etd2 };
enum class Variant { normalized, diffusive };

struct SolverConfig {
    double dt = 1e-2;
    double t_end = 1.0;
    Scheme scheme = Scheme::etd2;
    bool dealias = true;
    std::size_t snapshot_stride = 1;
    Variant variant = Variant::normalized;
    bool keep_states = true;
    bool nonlinear = true;   ///< false forces g = 0
    double p = 2.0;          ///< Lebesgue exponent of the recorded high-frequency histories
    int j0 = 0;
    std::size_t ramp_steps = 0;  ///< geometric warm-up from dt_min to dt
    double dt_min = 0.0;

    void validate() const {
        if (!(dt > 0.0)) throw Error("time step must be positive");
        if (!(t_end >= 0.0)) throw Error("horizon must be nonnegative");
        if (snapshot_stride < 1) throw Error("snapshot stride must be >= 1");
        if (!(p >= 1.0)) throw Error("Lebesgue exponent must be >= 1");
        if (ramp_steps > 0 && !(dt_min > 0.0 && dt_min < dt)) throw Error("ramp needs 0 < dt_min < dt");
    }
};

/// Fourier coefficients of g for the normalized system; zero and Nyquist
/// modes vanish, and modes above the 2/3 cutoff are dropped when dealiasing.
inline std::vector<cplx> nonlinear_hat(const FluidState& s, const ModelParams& m, bool dealiased = true) {
    const Grid& g = s.grid();
    try {
        check_admissible(s.a);
    } catch (const Error& e) {
        std::ostringstream os;
        os << e.what() << " at t=" << s.t;
        throw Error(os.str());
    }
    const auto vy_field = derivative(s.v);
    const auto vy = vy_field.samples();
    const auto a = s.a.samples();
    std::vector<double> flux(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = 1.0 + a[i];
        flux[i] = -(m.q_check(x) + a[i]) + (m.nu_check_law(x) - 1.0) * vy[i];
    }
    auto c = rfft(flux);
    const std::size_t kc = dealiased ? g.dealias_index() : g.nyquist() - 1;
    c[0] = 0.0;
    for (std::size_t k = 1; k < c.size(); ++k) c[k] = k <= kc && k < g.nyquist() ? cplx(0.0, g.wavenumber(k)) * c[k] : 0.0;
    return c;
}

inline SpectralField nonlinear_term(const FluidState& s, const ModelParams& m, bool dealiased = true) {
    return SpectralField::from_coefficients(s.grid(), nonlinear_hat(s, m, dealiased));
}

/// Exact flow e^{hA} plus the source weights h phi_1(hA) and h phi_2(hA)
/// restricted to a velocity-only forcing (0, g^).
struct EtdCoefficients {
    ModeTable flow;
    std::vector<cplx> p1a, p1v, p2a, p2v;

    EtdCoefficients(const Grid& g, double h, const LinearParams& lp) : flow(g, h, lp) {
        const std::size_t modes = g.n / 2 + 1;
        p1a.assign(modes, 0.0);
        p1v.assign(modes, 0.0);
        p2a.assign(modes, 0.0);
        p2v.assign(modes, 0.0);
        const cplx i(0.0, 1.0);
        for (std::size_t k = 1; k < g.nyquist(); ++k) {
            const double xi = g.wavenumber(k);
            Eigen::Matrix<double, 6, 6> aug = Eigen::Matrix<double, 6, 6>::Zero();
            aug(0, 1) = -h * lp.alpha * xi;
            aug(1, 0) = h * lp.beta * xi;
            aug(1, 1) = -h * lp.mu * xi * xi;
            aug.block<2, 2>(0, 2).setIdentity();
            aug.block<2, 2>(2, 4).setIdentity();
            const Eigen::Matrix<double, 6, 6> e = aug.exp();
            // In (a, u) variables the forcing is (0, i g^); back in v, v^ = -i u^.
            p1a[k] = i * h * e(0, 3);
            p1v[k] = h * e(1, 3);
            p2a[k] = i * h * e(0, 5);
            p2v[k] = h * e(1, 5);
        }
    }
};

namespace detail {

inline FluidState combine(const FluidState& s, const EtdCoefficients& c, const std::vector<cplx>* g1,
                          const std::vector<cplx>* g2, const std::vector<cplx>* g_base) {
    const auto ca = s.a.coefficients();
    const auto cv = s.v.coefficients();
    std::vector<cplx> na(ca.size()), nv(cv.size());
    for (std::size_t k = 0; k < ca.size(); ++k) {
        const auto& m = c.flow[k];
        na[k] = m.aa * ca[k] + m.av * cv[k];
        nv[k] = m.va * ca[k] + m.vv * cv[k];
        if (g1) {
            na[k] += c.p1a[k] * (*g1)[k];
            nv[k] += c.p1v[k] * (*g1)[k];
        }
        if (g2) {
            const cplx d = (*g2)[k] - (*g_base)[k];
            na[k] += c.p2a[k] * d;
            nv[k] += c.p2v[k] * d;
        }
    }
    return {SpectralField::from_coefficients(s.grid(), std::move(na)),
            SpectralField::from_coefficients(s.grid(), std::move(nv)), s.t + c.flow.time()};
}

}  // namespace detail

/// One ETD step of size dt with precomputed coefficients.
inline FluidState step(const FluidState& s, const EtdCoefficients& c, const ModelParams& m,
                       const SolverConfig& cfg) {
    if (!cfg.nonlinear) return c.flow.apply(s);
    const auto g0 = nonlinear_hat(s, m, cfg.dealias);
    auto pred = detail::combine(s, c, &g0, nullptr, nullptr);
    if (cfg.scheme == Scheme::etd1) return pred;
    const auto g1 = nonlinear_hat(pred, m, cfg.dealias);
    return detail::combine(s, c, &g0, &g1, &g0);
}

inline FluidState step(const FluidState& s, double dt, const ModelParams& m, const SolverConfig& cfg) {
    return step(s, EtdCoefficients(s.grid(), dt, LinearParams::normalized()), m, cfg);
}

/// Step sizes covering [0, t_end]: optional geometric ramp, then uniform dt
/// with times t_ramp + n dt, and a final short step if t_end is not reached exactly.
inline std::vector<double> time_grid(const SolverConfig& cfg) {
    cfg.validate();
    std::vector<double> t{0.0};
    if (cfg.ramp_steps > 0) {
        const double r = std::pow(cfg.dt / cfg.dt_min, 1.0 / static_cast<double>(cfg.ramp_steps));
        double h = cfg.dt_min;
        for (std::size_t k = 0; k < cfg.ramp_steps && t.back() + h < cfg.t_end; ++k, h *= r) t.push_back(t.back() + h);
    }
    const double t0 = t.back();
    const double span = cfg.t_end - t0;
    const auto n = static_cast<std::size_t>(std::floor(span / cfg.dt * (1.0 + 1e-12)));
    for (std::size_t m = 1; m <= n; ++m) t.push_back(t0 + static_cast<double>(m) * cfg.dt);
    if (cfg.t_end - t.back() > 1e-12 * std::max(1.0, cfg.t_end)) t.push_back(cfg.t_end);
    return t;
}

namespace detail {

struct Recorder {
    const DyadicFilterBank& bank;
    double p;
    bool keep;
    Trajectory traj;

    Recorder(const DyadicFilterBank& b, double p_, bool keep_) : bank(b), p(p_), keep(keep_) {
        for (const auto& key : {track::a2, track::v2})
            traj.histories.emplace(key, BlockNormHistory(b.j_min(), b.count(), 2.0));
        for (const auto& key : {track::ay_p, track::v_p, track::vyy_p, track::vt_p})
            traj.histories.emplace(key, BlockNormHistory(b.j_min(), b.count(), p));
    }

    // s on the bank's grid; vt is the time derivative of v in the same variables.
    void record(const FluidState& s, const SpectralField& vt) {
        traj.times.push_back(s.t);
        auto put = [&](const std::string& key, const SpectralField& f, double q) {
            traj.histories.at(key).append(s.t, block_norms(f, bank, q));
        };
        put(track::a2, s.a, 2.0);
        put(track::v2, s.v, 2.0);
        put(track::ay_p, derivative(s.a), p);
        put(track::v_p, s.v, p);
        put(track::vyy_p, derivative(s.v, 2), p);
        put(track::vt_p, vt, p);
        const double la = lp_norm(s.a, 2.0), lv = lp_norm(s.v, 2.0);
        traj.series["l2_a"].push_back(la);
        traj.series["l2_v"].push_back(lv);
        traj.series["l2"].push_back(std::hypot(la, lv));
        traj.series["linf_a"].push_back(s.a.max_abs());
        traj.series["mean_a"].push_back(s.a.mean());
        traj.series["mean_v"].push_back(s.v.mean());
        if (keep) traj.states.push_back(s);
    }
};

// v_t from the equation: a_y + v_yy + g.
inline SpectralField velocity_rate(const FluidState& s, const ModelParams& m, const SolverConfig& cfg) {
    auto r = derivative(s.a) + derivative(s.v, 2);
    if (cfg.nonlinear) r = r + nonlinear_term(s, m, cfg.dealias);
    return r;
}

class CoefficientCache {
  public:
    const EtdCoefficients& get(const Grid& g, double h) {
        auto it = cache_.find(h);
        if (it == cache_.end())
            it = cache_.emplace(h, std::make_unique<EtdCoefficients>(g, h, LinearParams::normalized())).first;
        return *it->second;
    }

  private:
    std::map<double, std::unique_ptr<EtdCoefficients>> cache_;
};

// Integrate the normalized system on `times`; `emit(state, v_t)` is called at
// every snapshot.
template <class Emit>
void integrate(FluidState s, const std::vector<double>& times, const ModelParams& m, const SolverConfig& cfg,
               Emit&& emit) {
    CoefficientCache cache;
    emit(s, velocity_rate(s, m, cfg));
    for (std::size_t n = 1; n < times.size(); ++n) {
        const double h = times[n] - times[n - 1];
        const auto& c = cache.get(s.grid(), h);
        s = step(s, c, m, cfg);
        s.t = times[n];
        if (n % cfg.snapshot_stride == 0 || n + 1 == times.size()) emit(s, velocity_rate(s, m, cfg));
    }
}

}  // namespace detail

/// Run the solver to t_end.
///
/// Normalized variant: (a0, v0) are normalized perturbations and the result
/// is in the same variables. Diffusive variant: (a0, v0) are the original
/// perturbation data (eta0 - eta_bar, v0); the diffusively scaled problem
/// with data (eta0, nu_bar v0) is solved and returned in its own variables
/// (a = eta_d - eta_bar, v = v_d) on the original grid and time axis, with
/// dt and t_end read on that time axis.
inline Trajectory simulate(const SpectralField& a0, const SpectralField& v0, const ModelParams& m,
                           const SolverConfig& cfg, const DyadicFilterBank& bank) {
    cfg.validate();
    if (!(a0.grid() == v0.grid())) throw Error("data live on different grids");
    if (!(a0.grid() == bank.grid())) throw Error("data and filter bank live on different grids");
    if (std::abs(a0.mean()) > 1e-10) throw Error("antiderivative not periodic");

    detail::Recorder rec(bank, cfg.p, cfg.keep_states);
    if (cfg.variant == Variant::normalized) {
        detail::integrate({a0, v0, 0.0}, time_grid(cfg), m, cfg,
                          [&](const FluidState& s, const SpectralField& vt) { rec.record(s, vt); });
    } else {
        const ModelParams md = m.diffusive();
        const Scaling k = Scaling::of(md);
        const FluidState phys{a0, m.nu_bar * v0, 0.0};
        const FluidState norm = rescale_normalize(reduce_reference_volume(phys, m.eta_bar, Direction::forward), md,
                                                  Direction::forward);
        SolverConfig nc = cfg;
        nc.dt = cfg.dt * k.T;
        nc.t_end = cfg.t_end * k.T;
        nc.dt_min = cfg.dt_min * k.T;
        // Slow-variable scale of the normalized velocity derivative, mapped back.
        const double vt_scale = m.eta_bar * k.V * k.T;
        detail::integrate(norm, time_grid(nc), md, nc, [&](const FluidState& s, const SpectralField& vt) {
            const FluidState back = reduce_reference_volume(rescale_normalize(s, md, Direction::backward),
                                                            m.eta_bar, Direction::backward);
            const double len = a0.length();
            rec.record({back.a.with_length(len), back.v.with_length(len), back.t}, (vt_scale * vt).with_length(len));
        });
    }
    rec.traj.series["X_p"] = solution_functional_series(rec.traj, cfg.p, cfg.j0);
    return std::move(rec.traj);
}

/// Picard iterates and the sup-norm distance between consecutive iterates.
struct PicardResult {
    std::vector<Trajectory> iterates;
    std::vector<double> differences;  ///< differences[n] = sup_t ||z^{n+1} - z^n||_inf
};

/// Iterate 0 is the linear flow of the data. Iterate n+1 solves the linear
/// system with source g(z^n) by Duhamel's formula, the time integral taken by
/// the composite trapezoid rule on the step grid:
///   z_m = E(dt) z_{m-1} + dt/2 (E(dt) N_{m-1} + N_m),   N = (0, g(z^n)).
inline PicardResult picard_sequence(const SpectralField& a0, const SpectralField& v0, std::size_t n_iters,
                                    const ModelParams& m, const SolverConfig& cfg, const DyadicFilterBank& bank) {
    cfg.validate();
    if (n_iters < 1) throw Error("need at least one Picard iteration");
    if (cfg.ramp_steps > 0) throw Error("Picard iteration needs a uniform time grid");
    const auto times = time_grid(cfg);
    const Grid& g = a0.grid();
    detail::CoefficientCache cache;

    auto apply_source = [&](const std::vector<cplx>& gh, double h) {
        // (E(h) (0, g)) as coefficients on (a, v)
        const auto& c = cache.get(g, h);
        std::vector<cplx> ga(gh.size()), gv(gh.size());
        for (std::size_t k = 0; k < gh.size(); ++k) {
            ga[k] = c.flow[k].av * gh[k];
            gv[k] = c.flow[k].vv * gh[k];
        }
        return std::pair{ga, gv};
    };

    std::vector<FluidState> prev;
    prev.reserve(times.size());
    prev.push_back({a0, v0, 0.0});
    for (std::size_t n = 1; n < times.size(); ++n) {
        auto s = cache.get(g, times[n] - times[n - 1]).flow.apply(prev.back());
        s.t = times[n];
        prev.push_back(std::move(s));
    }

    auto to_traj = [&](const std::vector<FluidState>& states) {
        detail::Recorder rec(bank, cfg.p, cfg.keep_states);
        for (std::size_t n = 0; n < states.size(); ++n)
            if (n % cfg.snapshot_stride == 0 || n + 1 == states.size())
                rec.record(states[n], detail::velocity_rate(states[n], m, cfg));
        return std::move(rec.traj);
    };

    PicardResult out;
    out.iterates.push_back(to_traj(prev));
    for (std::size_t it = 0; it < n_iters; ++it) {
        std::vector<FluidState> next;
        next.reserve(times.size());
        next.push_back({a0, v0, 0.0});
        auto g_prev = nonlinear_hat(prev[0], m, cfg.dealias);
        for (std::size_t n = 1; n < times.size(); ++n) {
            const double h = times[n] - times[n - 1];
            auto s = cache.get(g, h).flow.apply(next.back());
            const auto g_now = nonlinear_hat(prev[n], m, cfg.dealias);
            const auto [ea, ev] = apply_source(g_prev, h);
            std::vector<cplx> ca(s.a.coefficients().begin(), s.a.coefficients().end());
            std::vector<cplx> cv(s.v.coefficients().begin(), s.v.coefficients().end());
            for (std::size_t k = 0; k < ca.size(); ++k) {
                ca[k] += 0.5 * h * ea[k];
                cv[k] += 0.5 * h * (ev[k] + g_now[k]);
            }
            next.push_back({SpectralField::from_coefficients(g, std::move(ca)),
                            SpectralField::from_coefficients(g, std::move(cv)), times[n]});
            g_prev = g_now;
        }
        double diff = 0.0;
        for (std::size_t n = 0; n < times.size(); ++n)
            diff = std::max({diff, (next[n].a - prev[n].a).max_abs(), (next[n].v - prev[n].v).max_abs()});
        out.differences.push_back(diff);
        out.iterates.push_back(to_traj(next));
        prev = std::move(next);
    }
    return out;
}

/// Samples of the limit ODE solution theta(t, y) on a common time axis.
struct LimitSolution {
    std::vector<double> times;
    std::vector<SpectralField> theta;
};

/// theta_t = nu_bar (Q / nu)(theta), integrated pointwise in y by classical
/// RK4 with steps no larger than dt, recorded at `times` (increasing, from 0).
inline LimitSolution limit_ode_solve(const SpectralField& eta0, const ModelParams& m, double dt,
                                     const std::vector<double>& times) {
    if (!(dt > 0.0)) throw Error("time step must be positive");
    if (times.empty() || times.front() != 0.0) throw Error("limit ODE times must start at 0");
    const Grid& g = eta0.grid();
    auto check = [&](const std::vector<double>& th, double t) {
        for (double x : th) {
            const double r = x / m.eta_bar;
            if (!(r > 0.0)) throw Error("vacuum/negative specific volume");
            if (r < admissible_low || r > admissible_high) {
                std::ostringstream os;
                os << "state left perturbative regime at t=" << t;
                throw Error(os.str());
            }
        }
    };
    std::vector<double> th(eta0.samples().begin(), eta0.samples().end());
    check(th, 0.0);
    LimitSolution out;
    out.times.push_back(0.0);
    out.theta.push_back(SpectralField::from_samples(g, th));
    const std::size_t n = th.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    auto rate = [&](const std::vector<double>& x, std::vector<double>& k) {
        for (std::size_t i = 0; i < n; ++i) k[i] = m.limit_rate(x[i]);
    };
    double t = 0.0;
    for (std::size_t r = 1; r < times.size(); ++r) {
        const double span = times[r] - times[r - 1];
        if (!(span > 0.0)) throw Error("limit ODE times must be strictly increasing");
        const auto steps = static_cast<std::size_t>(std::ceil(span / dt * (1.0 - 1e-12)));
        const double h = span / static_cast<double>(steps);
        for (std::size_t s = 0; s < steps; ++s) {
            rate(th, k1);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = th[i] + 0.5 * h * k1[i];
            rate(tmp, k2);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = th[i] + 0.5 * h * k2[i];
            rate(tmp, k3);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = th[i] + h * k3[i];
            rate(tmp, k4);
            for (std::size_t i = 0; i < n; ++i) th[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            t = times[r - 1] + h * static_cast<double>(s + 1);
            check(th, t);
        }
        out.times.push_back(times[r]);
        out.theta.push_back(SpectralField::from_samples(g, th));
    }
    return out;
}

/// Uniform time axis 0, dt, ..., t_end.
inline LimitSolution limit_ode_solve(const SpectralField& eta0, const ModelParams& m, double dt, double t_end) {
    SolverConfig c;
    c.dt = dt;
    c.t_end = t_end;
    return limit_ode_solve(eta0, m, dt, time_grid(c));
}

namespace detail {

// Second-order centered difference at interior index k on a nonuniform axis.
inline SpectralField centered_rate(const SpectralField& fm, const SpectralField& f0, const SpectralField& fp,
                                   double h0, double h1) {
    const double d = h0 * h1 * (h0 + h1);
    return (h0 * h0 / d) * fp - (h1 * h1 / d) * fm - ((h0 * h0 - h1 * h1) / d) * f0;
}

}  // namespace detail

/// L^2 residuals of a_t + a - w_y = 0 and w_t - w_yy - g - (v - mean v) = 0
/// at interior snapshots, w the effective velocity and time derivatives by
/// centered differences. States are in normalized variables.
struct ResidualReport {
    std::vector<double> times;
    std::vector<double> transport;  ///< a_t + a - w_y
    std::vector<double> heat;       ///< w_t - w_yy - g - (v - mean v)

    double max_transport() const { return transport.empty() ? 0.0 : *std::max_element(transport.begin(), transport.end()); }
    double max_heat() const { return heat.empty() ? 0.0 : *std::max_element(heat.begin(), heat.end()); }
};

inline ResidualReport residual_monitor(const Trajectory& traj, const ModelParams& m, bool nonlinear = true,
                                       bool dealiased = true) {
    if (traj.states.size() < 3) throw Error("residual monitor needs at least 3 snapshots");
    const auto& st = traj.states;
    std::vector<SpectralField> w;
    w.reserve(st.size());
    for (const auto& s : st) w.push_back(effective_velocity(s.a, s.v));
    ResidualReport r;
    for (std::size_t k = 1; k + 1 < st.size(); ++k) {
        const double h0 = st[k].t - st[k - 1].t, h1 = st[k + 1].t - st[k].t;
        const auto at = detail::centered_rate(st[k - 1].a, st[k].a, st[k + 1].a, h0, h1);
        const auto wt = detail::centered_rate(w[k - 1], w[k], w[k + 1], h0, h1);
        const auto wy = derivative(w[k]);
        auto rhs = derivative(w[k], 2) + st[k].v;
        rhs = rhs - SpectralField::from_function(st[k].grid(), [&](double) { return st[k].v.mean(); });
        if (nonlinear) rhs = rhs + nonlinear_term(st[k], m, dealiased);
        r.times.push_back(st[k].t);
        r.transport.push_back(lp_norm(at + st[k].a - wy, 2.0));
        r.heat.push_back(lp_norm(wt - rhs, 2.0));
    }
    return r;
}

/// Frequency-localized Lyapunov functional
///   L_j^2 = ||(a_j, v_j)||^2 - 2 kappa int v_j a_{j,y}
/// along a trajectory, with its equivalence ratio to ||(a_j, v_j)|| and
/// centered-difference dissipation rate.
struct LyapunovReport {
    int j = 0;
    double kappa = 0.0;
    double bernstein = 0.0;
    std::vector<double> times;
    std::vector<double> value;   ///< L_j
    std::vector<double> norm;    ///< ||(a_j, v_j)||_{L^2}
    std::vector<double> ratio;   ///< L_j / ||(a_j, v_j)|| (1 where both vanish)
    std::vector<double> rate;    ///< d/dt L_j^2 at interior snapshots
    double measured_c = 0.0;     ///< min over interior snapshots of -rate / (2 4^j L_j^2)
    bool monotone = true;

    bool equivalent() const {
        for (double q : ratio)
            if (q < 0.5 || q > 1.5) return false;
        return true;
    }
};

/// Throws unless 2 C_B 2^{j0} kappa <= 1 and kappa (3/2 + C_B 4^{j0}) <= 1.
inline void check_lyapunov_kappa(double kappa, double bernstein, int j0) {
    if (!(kappa > 0.0)) throw Error("kappa must be positive");
    if (2.0 * bernstein * std::ldexp(1.0, j0) * kappa > 1.0) throw Error("kappa violates 2 C_B 2^j0 kappa <= 1");
    if (kappa * (1.5 + bernstein * std::ldexp(1.0, 2 * j0)) > 1.0)
        throw Error("kappa violates kappa (3/2 + C_B 4^j0) <= 1");
}

inline LyapunovReport lyapunov_monitor(const Trajectory& traj, int j, double kappa, const DyadicFilterBank& bank,
                                       int j0 = 0) {
    const double cb = bernstein_constant(bank);
    check_lyapunov_kappa(kappa, cb, j0);
    if (j > j0) throw Error("Lyapunov functional is only controlled for j <= j0");
    if (!bank.contains(j)) throw Error("dyadic index " + std::to_string(j) + " outside filter bank");
    if (traj.states.empty()) throw Error("trajectory has no stored states");

    LyapunovReport r;
    r.j = j;
    r.kappa = kappa;
    r.bernstein = cb;
    const auto phi = bank.filter(j);
    const Grid& g = bank.grid();
    for (const auto& s : traj.states) {
        const auto ca = s.a.coefficients();
        const auto cv = s.v.coefficients();
        double na = 0.0, nv = 0.0, cross = 0.0;
        for (std::size_t k = 0; k < ca.size(); ++k) {
            const double w = (k == 0 || k == g.nyquist()) ? 1.0 : 2.0;
            const cplx a = phi[k] * ca[k], v = phi[k] * cv[k];
            na += w * std::norm(a);
            nv += w * std::norm(v);
            if (k != 0 && k != g.nyquist()) cross += w * (v * std::conj(cplx(0.0, g.wavenumber(k)) * a)).real();
        }
        const double norm2 = g.length * (na + nv);
        const double l2 = norm2 - 2.0 * kappa * g.length * cross;
        r.times.push_back(s.t);
        r.norm.push_back(std::sqrt(norm2));
        r.value.push_back(std::sqrt(std::max(l2, 0.0)));
        r.ratio.push_back(norm2 > 0.0 ? std::sqrt(std::max(l2, 0.0) / norm2) : 1.0);
    }
    double peak = 0.0;
    for (double v : r.value) peak = std::max(peak, v * v);
    r.measured_c = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < r.times.size(); ++k) {
        const double h0 = r.times[k] - r.times[k - 1], h1 = r.times[k + 1] - r.times[k];
        const double d = h0 * h1 * (h0 + h1);
        const double fm = r.value[k - 1] * r.value[k - 1], f0 = r.value[k] * r.value[k],
                     fp = r.value[k + 1] * r.value[k + 1];
        const double rate = (h0 * h0 * fp - h1 * h1 * fm - (h0 * h0 - h1 * h1) * f0) / d;
        r.rate.push_back(rate);
        if (rate > 1e-12 * peak) r.monotone = false;
        if (f0 > 1e-30 * peak && f0 > 0.0) r.measured_c = std::min(r.measured_c, -rate / (2.0 * std::ldexp(1.0, 2 * j) * f0));
    }
    if (!std::isfinite(r.measured_c)) r.measured_c = 0.0;
    return r;
}

}  // namespace lagns
