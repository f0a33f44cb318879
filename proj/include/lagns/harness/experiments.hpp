#pragma once

// Experiment drivers. Each takes a resolved config and returns a Report with
// pass/fail checks, a JSON summary and CSV tables.

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "datum.hpp"
#include "fit.hpp"
#include "ode_oracle.hpp"
#include "report.hpp"

namespace lagns::harness {

namespace detail {

// Runs fn(0..n-1) on at most `threads` concurrent workers; results in index order.
template <class F>
auto parallel_map(std::size_t n, std::size_t threads, F&& fn) {
    using R = decltype(fn(std::size_t{0}));
    std::vector<R> out;
    out.reserve(n);
    threads = std::max<std::size_t>(1, threads);
    for (std::size_t b = 0; b < n; b += threads) {
        std::vector<std::future<R>> batch;
        for (std::size_t i = b; i < std::min(n, b + threads); ++i)
            batch.push_back(std::async(threads == 1 ? std::launch::deferred : std::launch::async, fn, i));
        for (auto& f : batch) out.push_back(f.get());
    }
    return out;
}

inline Report start(const ExperimentConfig& cfg, const std::string& kind) {
    Report r;
    r.kind = kind;
    r.config = cfg.to_json();
    return r;
}

inline json fit_json(const FitResult& f) {
    return {{"exponent", f.exponent}, {"intercept", f.intercept}, {"rms", f.rms},
            {"window", {f.t_min, f.t_max}}, {"points", f.points}};
}

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) s += 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
    return s;
}

inline bool nondecreasing(const std::vector<double>& v, double rel = 1e-12) {
    for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] < v[k - 1] - rel * std::abs(v[k - 1])) return false;
    return true;
}

inline bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k)
        if (!(v[k] < v[k - 1])) return false;
    return true;
}

inline void add_series_table(Report& r, const Trajectory& tr, const std::vector<std::string>& names,
                             const std::string& table = "series") {
    Table t;
    t.columns.push_back("t");
    for (const auto& n : names) t.columns.push_back(n);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        std::vector<double> row{tr.times[k]};
        for (const auto& n : names) row.push_back(tr.get_series(n)[k]);
        t.add(std::move(row));
    }
    r.tables[table] = std::move(t);
}

}  // namespace detail

/// Closed-form mode flow against adaptive integration, eigenvalue identities,
/// continuity across the regime boundary and the large-viscosity overdamping
/// asymptotics.
inline Report run_linear_check(const ExperimentConfig& cfg) {
    auto r = detail::start(cfg, "linear-check");
    const auto& e = cfg.experiment;
    if (e.n_xi < 2 || e.n_t < 1) throw Error("linear check needs n_xi >= 2 and n_t >= 1");
    if (!(e.xi_min > 0.0 && e.xi_max > e.xi_min && e.t_max > 0.0)) throw Error("invalid linear-check sample ranges");
    const auto m = cfg.model.build();

    struct Named {
        std::string name;
        LinearParams p;
    };
    const std::vector<Named> sets{{"unit", {1.0, 1.0, 1.0}},
                                  {"normalized", LinearParams::normalized()},
                                  {"reduced", LinearParams::reduced(m.Ma, m.nu_bar)}};

    Table samples{{"set", "xi", "t", "regime", "rel_err"}, {}};
    double worst = 0.0, worst_trace = 0.0, worst_det = 0.0, worst_jump = 0.0, worst_id = 0.0;
    std::size_t count = 0, n_real = 0, n_osc = 0, n_deg = 0;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        const auto& p = sets[s].p;
        const double xc = 2.0 * std::sqrt(p.alpha * p.beta) / p.mu;
        std::vector<double> xs;
        for (std::size_t i = 0; i < e.n_xi; ++i)
            xs.push_back(e.xi_min * std::pow(e.xi_max / e.xi_min, static_cast<double>(i) / (e.n_xi - 1)));
        for (double d : {0.0, 1e-10, -1e-10, 1e-9, -1e-9}) xs.push_back(xc * (1.0 + d));
        xs.push_back(-xs[e.n_xi / 2]);
        for (double xi : xs) {
            const auto sp = mode_spectrum(xi, p);
            const double mx2 = p.mu * xi * xi;
            worst_trace = std::max(worst_trace, std::abs(sp.lambda_plus + sp.lambda_minus + mx2) / mx2);
            const double det = p.alpha * p.beta * xi * xi;
            worst_det = std::max(worst_det, std::abs(sp.lambda_plus * sp.lambda_minus - det) / std::abs(det));
            (sp.regime == Regime::real ? n_real : sp.regime == Regime::oscillatory ? n_osc : n_deg)++;
            const Mat2 id = mode_flow(xi, 0.0, p);
            worst_id = std::max({worst_id, std::abs(id[0][0] - 1.0), std::abs(id[0][1]), std::abs(id[1][0]),
                                 std::abs(id[1][1] - 1.0)});
            for (std::size_t it = 1; it <= e.n_t; ++it) {
                const double t = e.t_max * static_cast<double>(it) / e.n_t;
                for (const auto& [a0, u0] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0}}) {
                    const auto [a, u] = propagate_mode(a0, u0, xi, t, p);
                    const auto z = mode_ode(a0, u0, xi, t, p);
                    const double err = std::hypot(a.real() - z[0], u.real() - z[1]) / std::hypot(z[0], z[1]);
                    worst = std::max(worst, err);
                    ++count;
                    samples.add({static_cast<double>(s), xi, t, static_cast<double>(static_cast<int>(sp.regime)), err});
                }
            }
        }
        // Continuity across the boundary: the closed form's change between
        // (1 -+ 1e-6) xc must match the exact exponential's change there.
        for (double t : {0.5 * e.t_max, e.t_max}) {
            const double x_lo = xc * (1.0 - 1e-6), x_hi = xc * (1.0 + 1e-6);
            const Mat2 lo = mode_flow(x_lo, t, p), hi = mode_flow(x_hi, t, p);
            auto expm = [&](double xi) {
                Eigen::Matrix2d A;
                A << 0.0, -p.alpha * xi, p.beta * xi, -p.mu * xi * xi;
                return Eigen::Matrix2d((t * A).exp());
            };
            const Eigen::Matrix2d e_lo = expm(x_lo), e_hi = expm(x_hi);
            const double scale = e_lo.cwiseAbs().maxCoeff();
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    worst_jump = std::max(worst_jump, std::abs((hi[i][j] - lo[i][j]) - (e_hi(i, j) - e_lo(i, j))) / scale);
        }
    }
    r.tables["samples"] = std::move(samples);

    // Overdamping: a^(t) ~ exp(-t / (nu Ma^2)) a^_0 for u^_0 = 0, at t = nu Ma^2.
    Table od{{"nu_bar", "ratio_minus_one"}, {}};
    std::vector<double> dev;
    for (double nu : {8.0, 16.0, 32.0, 64.0}) {
        const auto p = LinearParams::reduced(m.Ma, nu);
        const double t = nu * m.Ma * m.Ma;
        const double xi = 1.0;
        const auto [a, u] = propagate_mode(1.0, 0.0, xi, t, p);
        dev.push_back(std::abs(a.real() / std::exp(-t / (nu * m.Ma * m.Ma)) - 1.0));
        od.add({nu, dev.back()});
    }
    r.tables["overdamping"] = std::move(od);

    r.summary = {{"samples", count},      {"real", n_real},          {"oscillatory", n_osc},
                 {"degenerate", n_deg},   {"max_rel_err", worst},    {"max_trace_err", worst_trace},
                 {"max_det_err", worst_det}, {"boundary_jump", worst_jump}, {"overdamping_dev", dev}};
    r.check("sample_count", count >= 200, static_cast<double>(count), 200.0);
    r.check("regimes_covered", n_real > 0 && n_osc > 0 && n_deg > 0, static_cast<double>(n_deg), 1.0);
    r.check("ode_agreement", worst <= e.tolerance, worst, e.tolerance);
    r.check("trace_identity", worst_trace <= 1e-12, worst_trace, 1e-12);
    r.check("determinant_identity", worst_det <= 1e-12, worst_det, 1e-12);
    r.check("identity_at_zero", worst_id == 0.0, worst_id, 0.0);
    r.check("boundary_continuity", worst_jump < 1e-6, worst_jump, 1e-6);
    r.check("overdamping_convergence", detail::strictly_decreasing(dev) && dev.back() < 1e-2, dev.back(), 1e-2);
    return r;
}

/// One simulation with the solution functional, mean drift, residuals and,
/// for linear runs with stored states, the Lyapunov monitor on rings j <= j0.
inline Report run_simulate(const ExperimentConfig& cfg) {
    auto r = detail::start(cfg, "simulate");
    const auto m = cfg.model.build();
    const auto bank = cfg.grid.bank();
    const auto d = make_datum(cfg.data, cfg.grid.grid());
    const auto tr = simulate(d.a, d.v, m, cfg.solver, bank);
    detail::add_series_table(r, tr, {"l2_a", "l2_v", "l2", "linf_a", "mean_a", "mean_v", "X_p"});

    const auto& xp = tr.get_series("X_p");
    const double x0 = data_functional(d.a, d.v, cfg.solver.p, bank, cfg.grid.j0);
    double drift = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k)
        drift = std::max({drift, std::abs(tr.get_series("mean_a")[k] - tr.get_series("mean_a")[0]),
                          std::abs(tr.get_series("mean_v")[k] - tr.get_series("mean_v")[0])});
    r.summary = {{"snapshots", tr.size()},
                 {"X_p0", x0},
                 {"X_p_final", xp.back()},
                 {"X_ratio", x0 > 0.0 ? xp.back() / x0 : 0.0},
                 {"smallness_lhs", smallness_lhs(d.a, d.v, m, cfg.solver.p, bank, cfg.grid.j0)},
                 {"mean_drift", drift},
                 {"Ma", m.Ma},
                 {"nu_bar", m.nu_bar}};
    r.check("mean_conservation", drift <= 1e-12, drift, 1e-12);
    r.check("X_p_nondecreasing", detail::nondecreasing(xp), xp.back(), x0);

    if (cfg.solver.keep_states && cfg.solver.variant == Variant::normalized && tr.states.size() >= 3) {
        const auto res = residual_monitor(tr, m, cfg.solver.nonlinear, cfg.solver.dealias);
        r.summary["residual_transport"] = res.max_transport();
        r.summary["residual_heat"] = res.max_heat();
        if (!cfg.solver.nonlinear) {
            Table ly{{"j", "t", "L_j", "norm", "ratio"}, {}};
            json per = json::array();
            for (int j = bank.j_min(); j <= std::min(cfg.grid.j0, bank.j_max()); ++j) {
                const auto rep = lyapunov_monitor(tr, j, cfg.experiment.kappa, bank, cfg.grid.j0);
                for (std::size_t k = 0; k < rep.times.size(); ++k)
                    ly.add({static_cast<double>(j), rep.times[k], rep.value[k], rep.norm[k], rep.ratio[k]});
                const double lo = *std::min_element(rep.ratio.begin(), rep.ratio.end());
                const double hi = *std::max_element(rep.ratio.begin(), rep.ratio.end());
                per.push_back({{"j", j}, {"monotone", rep.monotone}, {"ratio_min", lo}, {"ratio_max", hi},
                               {"measured_c", rep.measured_c}});
                r.check("lyapunov_monotone_j" + std::to_string(j), rep.monotone, rep.measured_c, 0.0);
                r.check("lyapunov_equivalence_j" + std::to_string(j), rep.equivalent(), lo, 0.5,
                        "ratio range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            }
            r.summary["lyapunov"] = per;
            r.summary["bernstein_constant"] = bernstein_constant(bank);
            r.tables["lyapunov"] = std::move(ly);
        }
    }
    return r;
}

/// Decay-rate run: L^2 slope, high-frequency slope of a, decay functionals
/// and a heat-equation control on the same datum.
inline Report run_decay(const ExperimentConfig& cfg) {
    auto r = detail::start(cfg, "decay");
    if (cfg.solver.p != 2.0) throw Error("decay run needs p = 2");
    if (!cfg.experiment.fit_window) throw Error("decay run needs a fit window");
    const auto [t0, t1] = *cfg.experiment.fit_window;
    const double box = 0.1 * std::pow(cfg.grid.length / (2.0 * std::numbers::pi), 2);
    if (t1 > box) throw Error("fit window outside validity: t_max exceeds the box diffusion time");
    const auto m = cfg.model.build();
    const auto bank = cfg.grid.bank();
    const auto d = make_datum(cfg.data, cfg.grid.grid());
    auto sc = cfg.solver;
    sc.keep_states = false;
    const auto tr = simulate(d.a, d.v, m, sc, bank);
    const auto df = decay_functionals(tr, bank, cfg.grid.j0);
    const auto total = df.total();
    const double x20 = data_functional(d.a, d.v, 2.0, bank, cfg.grid.j0);

    const BesovSpec hi{2.0, 1.0, 0.5, FrequencyRange::high, cfg.grid.j0, 1.0};
    const auto& ha = tr.history(track::a2);
    std::vector<double> high_a(tr.size());
    for (std::size_t k = 0; k < tr.size(); ++k) high_a[k] = besov_from_blocks(ha.snapshot(k), ha.j_min(), hi);

    // Heat control: the same datum's velocity (or a if v vanishes) under e^{t d_yy}.
    const auto& seed = d.v.max_abs() > 0.0 ? d.v : d.a;
    std::vector<double> heat(tr.size());
    for (std::size_t k = 0; k < tr.size(); ++k)
        heat[k] = lp_norm(propagate_heat({d.a, seed, 0.0}, tr.times[k]).v, 2.0);

    const auto& l2 = tr.get_series("l2");
    Table t{{"t", "l2", "high_a_B12", "D_low", "D_high_a", "D_high_v", "D", "heat_l2", "X_p"}, {}};
    for (std::size_t k = 0; k < tr.size(); ++k)
        t.add({tr.times[k], l2[k], high_a[k], df.low[k], df.high_a[k], df.high_v[k], total[k], heat[k],
               tr.get_series("X_p")[k]});
    r.tables["series"] = std::move(t);

    r.summary = {{"X_20", x20}, {"D_final", total.back()}, {"D_high_a_final", df.high_a.back()},
                 {"D_ratio", x20 > 0.0 ? total.back() / x20 : 0.0}};
    if (l2.front() == 0.0 && l2.back() == 0.0) {
        r.summary["status"] = "no signal";
        return r;
    }
    r.summary["status"] = "ok";

    const auto f_l2 = fit_rate(tr.times, l2, t0, t1);
    const auto f_hi = fit_rate(tr.times, high_a, t0, t1);
    const auto f_heat = fit_rate(tr.times, heat, t0, t1);
    r.summary["fit_l2"] = detail::fit_json(f_l2);
    r.summary["fit_high_a"] = detail::fit_json(f_hi);
    r.summary["fit_heat"] = detail::fit_json(f_heat);

    // D^h_a is a running supremum; bounded means it has stopped growing over
    // the last fifth of the run.
    std::size_t k80 = 0;
    while (k80 + 1 < tr.size() && tr.times[k80] < 0.8 * tr.times.back()) ++k80;
    const double growth = df.high_a[k80] > 0.0 ? df.high_a.back() / df.high_a[k80] - 1.0 : 0.0;
    r.summary["D_high_a_late_growth"] = growth;

    r.check("l2_slope", std::abs(f_l2.exponent + 0.5) <= 0.1, f_l2.exponent, -0.5, "target -0.5 +- 0.1");
    r.check("heat_control_slope", std::abs(f_heat.exponent + 0.5) <= 0.1, f_heat.exponent, -0.5, "target -0.5 +- 0.1");
    r.check("high_a_slope", f_hi.exponent <= -1.4, f_hi.exponent, -1.4);
    r.check("D_high_a_bounded", growth <= 1e-3, growth, 1e-3, "relative growth over the last fifth of the run");
    r.check("D_nondecreasing", detail::nondecreasing(total), total.back(), x20);
    return r;
}

/// Diffusive-limit sweep over nu_bar: sup error against the limit ODE, the
/// L^1-in-time gap of v_y against the limit flux, and the rate fit.
inline Report run_visco_limit(const ExperimentConfig& cfg, std::size_t threads = 1) {
    auto r = detail::start(cfg, "visco-limit");
    const auto& sweep = cfg.model.nu_sweep;
    if (sweep.size() < 4) throw Error("sweep too short to fit");
    const double q = sweep[1] / sweep[0];
    for (std::size_t k = 1; k < sweep.size(); ++k)
        if (!(sweep[k - 1] > 0.0) || std::abs(sweep[k] / sweep[k - 1] - q) > 1e-9 * q || !(q > 1.0))
            throw Error("non-geometric sweep");
    const double sigma = cfg.experiment.sigma;
    if (!(sigma > 0.5 && sigma < 1.5)) throw Error("sigma must lie in (1/2, 3/2)");
    const auto bank = cfg.grid.bank();
    const auto d = make_datum(cfg.data, cfg.grid.grid());
    const double eta_bar = cfg.model.eta_bar;
    const BesovSpec b12{2.0, 1.0, 0.5, FrequencyRange::full, cfg.grid.j0, 1.0};

    struct Point {
        double nu_bar, nu_check, E, gap, I_sigma, small;
    };
    auto run_one = [&](std::size_t i) {
        const auto m = cfg.model.build_with_nu(sweep[i]);
        auto sc = cfg.solver;
        sc.variant = Variant::diffusive;
        sc.keep_states = true;
        sc.snapshot_stride = 1;
        const auto tr = simulate(d.a, d.v, m, sc, bank);
        const auto eta0 = pointwise(d.a, [&](double x) { return eta_bar + x; });
        const auto lim = limit_ode_solve(eta0, m, cfg.experiment.limit_dt, tr.times);
        double E = 0.0;
        std::vector<double> gap(tr.size());
        for (std::size_t k = 0; k < tr.size(); ++k) {
            const auto& s = tr.states[k];
            E = std::max(E, (s.a - pointwise(lim.theta[k], [&](double x) { return x - eta_bar; })).max_abs());
            const auto flux = pointwise(lim.theta[k], [&](double x) { return m.limit_rate(x); });
            gap[k] = besov_norm(derivative(s.v) - flux, b12, bank);
        }
        auto I = [&](double s) {
            const BesovSpec b{2.0, 1.0, s, FrequencyRange::full, cfg.grid.j0, 1.0};
            return besov_norm(d.a, b, bank) / m.nu_check + besov_norm(d.a, b.with_sigma(1.0 + s), bank) +
                   besov_norm(d.v, b, bank) / m.nu_bar;
        };
        return Point{sweep[i], m.nu_check, E, detail::trapezoid(tr.times, gap), I(-sigma), I(-0.5)};
    };
    const auto pts = detail::parallel_map(sweep.size(), threads, run_one);

    Table t{{"nu_bar", "nu_check", "E", "gap_l1", "I_sigma", "smallness"}, {}};
    std::vector<double> nc, E, gap;
    double worst_small = 0.0;
    for (const auto& p : pts) {
        t.add({p.nu_bar, p.nu_check, p.E, p.gap, p.I_sigma, p.small});
        nc.push_back(p.nu_check);
        E.push_back(p.E);
        gap.push_back(p.gap);
        worst_small = std::max(worst_small, p.small);
    }
    r.tables["sweep"] = std::move(t);
    const auto f = fit_power(nc, E);
    const double rate = (2.0 * sigma - 1.0) / (sigma + 1.5);
    r.summary = {{"fit", detail::fit_json(f)}, {"theoretical_rate", rate}, {"E", E}, {"gap_l1", gap},
                 {"smallness_max", worst_small}};
    const double bound = cfg.experiment.smallness_threshold * eta_bar;
    r.check("smallness", worst_small <= bound, worst_small, bound);
    r.check("E_slope", f.exponent <= -(rate - 0.15), f.exponent, -(rate - 0.15));
    r.check("E_strictly_decreasing", detail::strictly_decreasing(E), E.back(), E.front());
    r.check("gap_strictly_decreasing", detail::strictly_decreasing(gap), gap.back(), gap.front());
    return r;
}

/// Terminal differences between a base run and runs with the perturbation
/// scaled by each amplitude; consecutive ratios should be about 2.
inline Report run_stability(const ExperimentConfig& cfg, std::size_t threads = 1) {
    auto r = detail::start(cfg, "stability");
    if (!cfg.experiment.perturbation) throw Error("stability run needs a perturbation");
    const auto& amps = cfg.experiment.amplitudes;
    if (amps.size() < 2) throw Error("stability run needs at least two amplitudes");
    for (std::size_t i = 1; i < amps.size(); ++i)
        if (std::abs(amps[i] - 0.5 * amps[i - 1]) > 1e-12 * std::abs(amps[i - 1]) || !(amps[i] > 0.0))
            throw Error("stability amplitudes must halve at each step");
    const auto m = cfg.model.build();
    const auto bank = cfg.grid.bank();
    const auto g = cfg.grid.grid();
    const auto base = make_datum(cfg.data, g);
    const auto dir = make_datum(*cfg.experiment.perturbation, g);
    auto sc = cfg.solver;
    sc.keep_states = true;
    sc.snapshot_stride = std::numeric_limits<std::size_t>::max();

    auto run_one = [&](std::size_t i) {
        const double s = i == 0 ? 0.0 : amps[i - 1];
        const auto tr = simulate(base.a + s * dir.a, base.v + s * dir.v, m, sc, bank);
        return tr.states.back();
    };
    const auto finals = detail::parallel_map(amps.size() + 1, threads, run_one);
    const BesovSpec pa{2.0, 1.0, 0.5, FrequencyRange::full, cfg.grid.j0, 1.0};
    const auto pv = pa.with_sigma(-0.5);
    std::vector<double> delta;
    Table t{{"amplitude", "delta"}, {}};
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const auto& s = finals[i + 1];
        delta.push_back(besov_norm(s.a - finals[0].a, pa, bank) + besov_norm(s.v - finals[0].v, pv, bank));
        t.add({amps[i], delta.back()});
    }
    r.tables["differences"] = std::move(t);
    const bool zero = std::all_of(delta.begin(), delta.end(), [](double x) { return x == 0.0; });
    std::vector<double> ratios;
    for (std::size_t i = 1; i < delta.size(); ++i)
        ratios.push_back(zero ? 0.0 : delta[i - 1] / delta[i]);
    r.summary = {{"differences", delta}, {"ratios", ratios}, {"zero_perturbation", zero}};
    if (zero) {
        r.check("zero_perturbation", true, 0.0, 0.0, "zero perturbation gives zero differences");
        return r;
    }
    for (std::size_t i = 0; i < ratios.size(); ++i)
        r.check("ratio_" + std::to_string(i), ratios[i] >= 1.8 && ratios[i] <= 2.2, ratios[i], 2.0, "band [1.8, 2.2]");
    return r;
}

/// Picard iterates: contraction of successive differences and agreement of
/// the last iterate with the direct solver.
inline Report run_picard(const ExperimentConfig& cfg) {
    auto r = detail::start(cfg, "picard");
    const auto m = cfg.model.build();
    const auto bank = cfg.grid.bank();
    const auto d = make_datum(cfg.data, cfg.grid.grid());
    auto sc = cfg.solver;
    sc.keep_states = true;
    const auto pr = picard_sequence(d.a, d.v, cfg.experiment.picard_iters, m, sc, bank);
    const auto direct = simulate(d.a, d.v, m, sc, bank);
    const auto& last = pr.iterates.back().states;
    double gap = 0.0;
    for (std::size_t k = 0; k < std::min(last.size(), direct.states.size()); ++k)
        gap = std::max({gap, (last[k].a - direct.states[k].a).max_abs(), (last[k].v - direct.states[k].v).max_abs()});

    const double scale = std::max(d.a.max_abs(), d.v.max_abs());
    const double floor = 1e-13 * std::max(scale, 1e-300);
    Table t{{"iteration", "difference"}, {}};
    double worst = 0.0;
    for (std::size_t n = 0; n < pr.differences.size(); ++n) {
        t.add({static_cast<double>(n + 1), pr.differences[n]});
        if (n >= 1 && pr.differences[n - 1] > floor) worst = std::max(worst, pr.differences[n] / pr.differences[n - 1]);
    }
    r.tables["differences"] = std::move(t);
    const double small = smallness_lhs(d.a, d.v, m, sc.p, bank, cfg.grid.j0);
    r.summary = {{"differences", pr.differences}, {"max_ratio", worst}, {"direct_gap", gap}, {"smallness_lhs", small}};
    r.check("smallness", small <= cfg.experiment.smallness_threshold, small, cfg.experiment.smallness_threshold);
    r.check("contraction", worst < 1.0, worst, 1.0, "successive difference ratio after the first iterate");
    return r;
}

/// One-shot norms of a datum: homogeneous Besov norms, hybrid splits, the
/// data functional and the smallness left-hand side.
inline Report run_besov(const ExperimentConfig& cfg, const std::optional<Datum>& given = std::nullopt) {
    auto r = detail::start(cfg, "besov");
    const auto m = cfg.model.build();
    const auto bank = cfg.grid.bank();
    const auto d = given ? *given : make_datum(cfg.data, cfg.grid.grid());
    const int j0 = cfg.grid.j0;
    const double p = cfg.solver.p;
    json norms = json::object();
    for (double s : {-1.0, -0.5, 0.0, 0.5, 1.0, 1.5}) {
        const BesovSpec b{2.0, 1.0, s, FrequencyRange::full, j0, 1.0};
        std::ostringstream key;
        key << "B" << s;
        norms[key.str()] = {{"a", besov_norm(d.a, b, bank)}, {"v", besov_norm(d.v, b, bank)}};
    }
    const auto ha = hybrid_norms(d.a, -0.5, 2.0, 1.0 / p, p, j0, 1.0, bank);
    const auto hv = hybrid_norms(d.v, -0.5, 2.0, -1.0 + 1.0 / p, p, j0, 1.0, bank);
    r.summary = {{"norms", norms},
                 {"hybrid_a", {{"low", ha.low}, {"high", ha.high}}},
                 {"hybrid_v", {{"low", hv.low}, {"high", hv.high}}},
                 {"X_p0", data_functional(d.a, d.v, p, bank, j0)},
                 {"smallness_lhs", smallness_lhs(d.a, d.v, m, p, bank, j0)},
                 {"l2_a", lp_norm(d.a, 2.0)},
                 {"l2_v", lp_norm(d.v, 2.0)}};
    const auto ba = block_norms(d.a, bank, 2.0), bv = block_norms(d.v, bank, 2.0);
    Table t{{"j", "a", "v"}, {}};
    for (std::size_t i = 0; i < ba.size(); ++i) t.add({static_cast<double>(bank.j_min() + static_cast<int>(i)), ba[i], bv[i]});
    r.tables["blocks"] = std::move(t);
    return r;
}

/// Dispatch on experiment.kind.
inline Report run_experiment(const ExperimentConfig& cfg, std::size_t threads = 1) {
    const auto& k = cfg.experiment.kind;
    if (k == "linear-check") return run_linear_check(cfg);
    if (k == "simulate") return run_simulate(cfg);
    if (k == "decay") return run_decay(cfg);
    if (k == "visco-limit") return run_visco_limit(cfg, threads);
    if (k == "stability") return run_stability(cfg, threads);
    if (k == "picard") return run_picard(cfg);
    if (k == "besov") return run_besov(cfg);
    throw Error("unknown experiment kind '" + k + "'");
}

}  // namespace lagns::harness
