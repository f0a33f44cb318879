#include <gtest/gtest.h>

#include <numbers>

#include "lagns/solver.hpp"

using namespace lagns;

namespace {

const double pi = std::numbers::pi;

ModelParams gamma_model() {
    return normalize(laws::gamma_pressure(0.7142857142857143, 1.4, 1.0), laws::constant_eulerian_viscosity(1.0), 1.0);
}

ModelParams affine_model(double slope = 1.0, double nu = 1.0) {
    return normalize(laws::affine_pressure(slope, 1.0), laws::constant_lagrangian_viscosity(nu), 1.0);
}

struct Data {
    SpectralField a, v;
};

Data sine_data(const Grid& g, double amp, double v_mean = 0.0) {
    const double w = 2.0 * pi / g.length;
    return {SpectralField::from_function(g, [&](double y) { return amp * (std::sin(w * y) + 0.4 * std::cos(3 * w * y)); }),
            SpectralField::from_function(g, [&](double y) { return v_mean + amp * (0.7 * std::cos(2 * w * y) - 0.3 * std::sin(5 * w * y)); })};
}

SolverConfig config(double dt, double t_end, std::size_t stride = 1) {
    SolverConfig c;
    c.dt = dt;
    c.t_end = t_end;
    c.snapshot_stride = stride;
    return c;
}

double gap(const FluidState& x, const FluidState& y) {
    return std::max((x.a - y.a).max_abs(), (x.v - y.v).max_abs());
}

FluidState final_state(const Data& d, const ModelParams& m, const SolverConfig& c, const DyadicFilterBank& bank) {
    SolverConfig k = c;
    k.snapshot_stride = 1u << 30;
    return simulate(d.a, d.v, m, k, bank).states.back();
}

}  // namespace

TEST(Step, WithoutNonlinearityEqualsExactPropagator) {
    const Grid g{128, 2.0 * pi};
    const auto d = sine_data(g, 0.2, 0.1);
    const FluidState s{d.a, d.v, 0.0};
    auto c = config(0.05, 1.0);
    c.nonlinear = false;
    const auto m = gamma_model();
    for (auto scheme : {Scheme::etd1, Scheme::etd2}) {
        c.scheme = scheme;
        EXPECT_LT(gap(step(s, 0.05, m, c), propagate_field(s, 0.05, LinearParams::normalized())), 1e-12);
    }
}

TEST(Step, AffineConstantViscosityHasNoNonlinearity) {
    const Grid g{1024, 2.0 * pi};
    const auto d = sine_data(g, 0.2);
    const auto m = affine_model();
    EXPECT_LT(nonlinear_term({d.a, d.v, 0.0}, m).max_abs(), 1e-12);
    const auto bank = default_filter_bank(g);
    const auto tr = simulate(d.a, d.v, m, config(0.01, 5.0, 100), bank);
    for (const auto& s : tr.states)
        EXPECT_LT(gap(s, propagate_field({d.a, d.v, 0.0}, s.t, LinearParams::normalized())), 1e-12) << s.t;
}

TEST(Step, TemporalOrderOfBothSchemes) {
    const Grid g{64, 2.0 * pi};
    const auto bank = default_filter_bank(g);
    const auto d = sine_data(g, 0.15);
    const auto m = gamma_model();
    const double T = 1.0, dt = 0.05;
    auto c = config(dt / 32.0, T);
    c.scheme = Scheme::etd2;
    const auto ref = final_state(d, m, c, bank);
    for (auto [scheme, order] : {std::pair{Scheme::etd1, 1.0}, std::pair{Scheme::etd2, 2.0}}) {
        c.scheme = scheme;
        c.dt = dt;
        const double e1 = gap(final_state(d, m, c, bank), ref);
        c.dt = dt / 2.0;
        const double e2 = gap(final_state(d, m, c, bank), ref);
        EXPECT_NEAR(e1 / e2, std::exp2(order), 0.15 * std::exp2(order)) << e1 << " " << e2;
    }
}

TEST(Step, ReportsLeavingThePerturbativeRegime) {
    const Grid g{32, 2.0 * pi};
    const auto a = SpectralField::from_function(g, [](double y) { return 0.8 * std::sin(y); });
    try {
        step({a, SpectralField::zeros(g), 0.25}, 0.01, gamma_model(), config(0.01, 1.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("state left perturbative regime at t=0.25"), std::string::npos) << e.what();
    }
}

TEST(Simulate, ZeroDataGiveZeroTrajectory) {
    const Grid g{64, 4.0 * pi};
    const auto bank = default_filter_bank(g);
    const auto z = SpectralField::zeros(g);
    const auto tr = simulate(z, z, gamma_model(), config(0.05, 1.0, 4), bank);
    for (const auto& s : tr.states) EXPECT_EQ(s.a.max_abs() + s.v.max_abs(), 0.0);
    for (double x : tr.get_series("X_p")) EXPECT_EQ(x, 0.0);
}

TEST(Simulate, SnapshotTimesDependOnlyOnSnapshotInterval) {
    const Grid g{64, 2.0 * pi};
    const auto bank = default_filter_bank(g);
    const auto d = sine_data(g, 0.1);
    const auto m = gamma_model();
    const auto t1 = simulate(d.a, d.v, m, config(0.01, 1.0, 10), bank).times;
    const auto t2 = simulate(d.a, d.v, m, config(0.02, 1.0, 5), bank).times;
    ASSERT_EQ(t1.size(), 11u);
    ASSERT_EQ(t1.size(), t2.size());
    for (std::size_t k = 0; k < t1.size(); ++k) EXPECT_NEAR(t1[k], t2[k], 1e-14);
    for (std::size_t k = 1; k < t1.size(); ++k) EXPECT_GT(t1[k], t1[k - 1]);
}

TEST(Simulate, SolutionFunctionalNondecreasingAndBounded) {
    const Grid g{128, 8.0 * pi};
    const auto bank = default_filter_bank(g);
    const auto d = sine_data(g, 0.05);
    const auto tr = simulate(d.a, d.v, gamma_model(), config(0.02, 4.0, 5), bank);
    const auto& x = tr.get_series("X_p");
    for (std::size_t k = 1; k < x.size(); ++k) EXPECT_GE(x[k], x[k - 1]);
    const double x0 = data_functional(d.a, d.v, 2.0, bank);
    EXPECT_GT(x0, 0.0);
    EXPECT_TRUE(std::isfinite(x.back() / x0));
    EXPECT_LT(x.back() / x0, 100.0);
}

TEST(Simulate, BlockHistoriesMatchStoredStates) {
    const Grid g{64, 4.0 * pi};
    const auto bank = default_filter_bank(g);
    const auto d = sine_data(g, 0.1);
    const auto tr = simulate(d.a, d.v, gamma_model(), config(0.05, 1.0, 4), bank);
    const auto& ha = tr.history(track::a2);
    ASSERT_EQ(ha.size(), tr.states.size());
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
        const auto direct = block_norms(tr.states[k].a, bank, 2.0);
        const auto rec = ha.snapshot(k);
        for (std::size_t i = 0; i < direct.size(); ++i) EXPECT_NEAR(rec[i], direct[i], 1e-10);
        EXPECT_EQ(ha.times()[k], tr.times[k]);
    }
}

TEST(Simulate, MeansConservedOverTenThousandSteps) {
    const Grid g{64, 2.0 * pi};
    const auto bank = default_filter_bank(g);
    const auto d = sine_data(g, 0.1, 0.3);
    auto c = config(1e-3, 10.0, 1000);
    const auto tr = simulate(d.a, d.v, gamma_model(), c, bank);
    ASSERT_NEAR(tr.times.back(), 10.0, 1e-9);
    const auto& ma = tr.get_series("mean_a");
    const auto& mv = tr.get_series("mean_v");
    for (std::size_t k = 0; k < ma.size(); ++k) {
        EXPECT_LT(std::abs(ma[k] - ma[0]), 1e-13);
        EXPECT_LT(std::abs(mv[k] - mv[0]), 1e-13);
    }
}

TEST(Simulate, RejectsMeanCarryingDensityPerturbation) {
    const Grid g{16, 1.0};
    const auto a = SpectralField::from_function(g, [](double) { return 0.1; });
    try {
        simulate(a, SpectralField::zeros(g), gamma_model(), config(0.1, 1.0), default_filter_bank(g));
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "antiderivative not periodic");
    }
}

TEST(Simulate, DiffusiveVariantMatchesDirectNormalizedRun) {
    // Solving the diffusive presentation equals solving the original system
    // with viscosity nu_bar and reading it on the slow time axis t = s / nu_bar.
    const Grid g{64, 2.0 * pi};
    const auto bank = default_filter_bank(g);
    const double nu = 4.0;
    const auto m = normalize(laws::gamma_pressure(0.7142857142857143, 1.4, 1.0), laws::constant_lagrangian_viscosity(nu), 1.0);
    const auto d = sine_data(g, 0.05);
    auto c = config(0.01, 0.5);
    c.variant = Variant::diffusive;
    c.snapshot_stride = 1000;
    const auto diff = simulate(d.a, d.v, m, c, bank).states.back();

    // Reference: original variables, normalized by hand, time nu_bar * t_end.
    const auto md = m;  // original system with its own (Ma, nu_bar)
    const auto k = Scaling::of(md);
    const FluidState phys{d.a, d.v, 0.0};
    const auto norm = rescale_normalize(reduce_reference_volume(phys, md.eta_bar, Direction::forward), md, Direction::forward);
    auto nc = config(1e-3 * k.T, c.t_end * nu * k.T);
    nc.snapshot_stride = 1u << 30;
    const auto bank_n = default_filter_bank(norm.grid());
    const auto end = simulate(norm.a, norm.v, md, nc, bank_n).states.back();
    const auto back = reduce_reference_volume(rescale_normalize(end, md, Direction::backward), md.eta_bar, Direction::backward);
    // Diffusive velocity is nu_bar times the original one.
    EXPECT_LT((diff.a - back.a.with_length(g.length)).max_abs(), 1e-6);
    EXPECT_LT((diff.v - nu * back.v.with_length(g.length)).max_abs(), 1e-6 * nu);
}

TEST(Picard, FixedPointWhenNonlinearityVanishes) {
    const Grid g{64, 2.0 * pi};
    const auto bank = default_filter_bank(g);
    const auto d = sine_data(g, 0.1);
    const auto pr = picard_sequence(d.a, d.v, 3, affine_model(), config(0.01, 0.5, 10), bank);
    ASSERT_EQ(pr.iterates.size(), 4u);
    for (double diff : pr.differences) EXPECT_LT(diff, 1e-14);
    for (std::size_t k = 0; k < pr.iterates[0].states.size(); ++k)
        EXPECT_LT(gap(pr.iterates[3].states[k], pr.iterates[0].states[k]), 1e-14);
}

TEST(Picard, SmallDataContractsAndApproachesDirectSolution) {
    const Grid g{64, 2.0 * pi};
    const auto bank = default_filter_bank(g);
    const auto d = sine_data(g, 0.05);
    const auto m = gamma_model();
    double last_gap = 0.0;
    for (double dt : {0.02, 0.01}) {
        const auto c = config(dt, 1.0, 1000);
        const auto pr = picard_sequence(d.a, d.v, 6, m, c, bank);
        for (std::size_t n = 2; n < pr.differences.size(); ++n)
            if (pr.differences[n - 1] > 1e-13) EXPECT_LT(pr.differences[n] / pr.differences[n - 1], 1.0) << n;
        EXPECT_LT(pr.differences.back(), 1e-5 * pr.differences.front());
        const auto direct = simulate(d.a, d.v, m, c, bank).states.back();
        const double gp = gap(pr.iterates.back().states.back(), direct);
        EXPECT_LT(gp, 1e-4);
        if (last_gap > 0.0) EXPECT_LT(gp, 0.5 * last_gap);
        last_gap = gp;
    }
    EXPECT_THROW(picard_sequence(d.a, d.v, 0, m, config(0.01, 1.0), bank), Error);
}

TEST(LimitOde, EquilibriumStaysPut) {
    const Grid g{16, 1.0};
    const auto m = gamma_model();
    const auto eta0 = SpectralField::from_function(g, [](double) { return 1.0; });
    const auto sol = limit_ode_solve(eta0, m, 0.01, 2.0);
    for (const auto& th : sol.theta) EXPECT_LT((th - eta0).max_abs(), 1e-15);
}

TEST(LimitOde, AffineLawRelaxesExponentially) {
    const double Ma2 = 0.5;
    const Grid g{32, 2.0 * pi};
    const auto m = normalize(laws::affine_pressure(1.0 / Ma2, 1.3), laws::constant_lagrangian_viscosity(3.0), 1.3);
    ASSERT_NEAR(m.Ma * m.Ma, Ma2, 1e-15);
    const auto b0 = SpectralField::from_function(g, [](double y) { return 0.2 * std::sin(y) + 0.1 * std::cos(4 * y); });
    const auto eta0 = SpectralField::from_function(g, [](double) { return 1.3; }) + b0;
    const auto sol = limit_ode_solve(eta0, m, 2e-3, 3.0);
    for (std::size_t k = 0; k < sol.times.size(); k += 50) {
        const auto expect = std::exp(-sol.times[k] / Ma2) * b0;
        const auto got = sol.theta[k] - SpectralField::from_function(g, [](double) { return 1.3; });
        EXPECT_LT((got - expect).max_abs(), 1e-10) << sol.times[k];
    }
}

TEST(LimitOde, GammaLawIsFourthOrder) {
    const Grid g{16, 1.0};
    const auto m = gamma_model();
    const auto eta0 = SpectralField::from_function(g, [](double y) { return 1.0 + 0.3 * std::sin(2 * pi * y); });
    const std::vector<double> t{0.0, 2.0};
    const auto ref = limit_ode_solve(eta0, m, 0.2 / 64.0, t).theta.back();
    const double e1 = (limit_ode_solve(eta0, m, 0.2, t).theta.back() - ref).max_abs();
    const double e2 = (limit_ode_solve(eta0, m, 0.1, t).theta.back() - ref).max_abs();
    EXPECT_NEAR(e1 / e2, 16.0, 0.2 * 16.0);
}

TEST(LimitOde, ErrorsOnBadInput) {
    const Grid g{16, 1.0};
    const auto m = gamma_model();
    const auto bad = SpectralField::from_function(g, [](double) { return 0.1; });
    EXPECT_THROW(limit_ode_solve(bad, m, 0.01, 1.0), Error);
    const auto ok = SpectralField::from_function(g, [](double) { return 1.0; });
    EXPECT_THROW(limit_ode_solve(ok, m, 0.0, 1.0), Error);
    EXPECT_THROW(limit_ode_solve(ok, m, 0.1, std::vector<double>{0.5, 1.0}), Error);
}

TEST(Residuals, EquilibriumIsExact) {
    const Grid g{32, 2.0 * pi};
    Trajectory tr;
    for (double t : {0.0, 0.1, 0.2, 0.3}) tr.states.push_back(FluidState::zeros(g, t));
    const auto r = residual_monitor(tr, gamma_model());
    EXPECT_EQ(r.max_transport(), 0.0);
    EXPECT_EQ(r.max_heat(), 0.0);
    tr.states.resize(2);
    EXPECT_THROW(residual_monitor(tr, gamma_model()), Error);
}

TEST(Residuals, SecondOrderInSnapshotInterval) {
    const Grid g{64, 2.0 * pi};
    const auto bank = default_filter_bank(g);
    const auto d = sine_data(g, 0.05, 0.2);
    for (bool nonlinear : {false, true}) {
        auto c = config(0.005, 1.0, 8);
        c.nonlinear = nonlinear;
        const auto m = nonlinear ? gamma_model() : affine_model();
        const auto r1 = residual_monitor(simulate(d.a, d.v, m, c, bank), m, nonlinear);
        c.snapshot_stride = 4;
        const auto r2 = residual_monitor(simulate(d.a, d.v, m, c, bank), m, nonlinear);
        // Compare at the snapshot times both runs share.
        ASSERT_EQ(r2.times.size(), 2 * r1.times.size() + 1);
        for (std::size_t k = 0; k < r1.times.size(); ++k) {
            ASSERT_NEAR(r1.times[k], r2.times[2 * k + 1], 1e-12);
            EXPECT_NEAR(r1.transport[k] / r2.transport[2 * k + 1], 4.0, 0.6) << nonlinear << " t=" << r1.times[k];
            EXPECT_NEAR(r1.heat[k] / r2.heat[2 * k + 1], 4.0, 0.6) << nonlinear << " t=" << r1.times[k];
        }
        // Richardson estimate of the differencing error at the coarse interval.
        const double est = 4.0 / 3.0 * (r1.transport[0] - r2.transport[1]);
        EXPECT_LT(r1.transport[0], 10.0 * est);
    }
}

TEST(Lyapunov, ZeroStateAndKappaPrecondition) {
    const Grid g{64, 16.0 * pi};
    const auto bank = default_filter_bank(g);
    Trajectory tr;
    tr.states = {FluidState::zeros(g, 0.0), FluidState::zeros(g, 0.5), FluidState::zeros(g, 1.0)};
    tr.times = {0.0, 0.5, 1.0};
    const auto r = lyapunov_monitor(tr, 0, 0.15, bank);
    for (double v : r.value) EXPECT_EQ(v, 0.0);
    EXPECT_TRUE(r.equivalent());
    EXPECT_THROW(lyapunov_monitor(tr, 0, 0.9, bank), Error);
    EXPECT_THROW(lyapunov_monitor(tr, 1, 0.15, bank), Error);
    EXPECT_THROW(check_lyapunov_kappa(-0.1, 2.0, 0), Error);
}

TEST(Lyapunov, SingleLowModeDecaysMonotonically) {
    const Grid g{128, 16.0 * pi};
    const auto bank = default_filter_bank(g);
    const double xi = g.wavenumber(5);  // 0.625: inside rings -1 and 0
    const auto a = SpectralField::from_function(g, [&](double y) { return 0.1 * std::cos(xi * y); });
    auto c = config(0.01, 8.0, 5);
    c.nonlinear = false;
    const auto tr = simulate(a, SpectralField::zeros(g), affine_model(), c, bank);
    for (int j : {-1, 0}) {
        const auto r = lyapunov_monitor(tr, j, 0.15, bank);
        EXPECT_TRUE(r.monotone) << j;
        EXPECT_TRUE(r.equivalent()) << j;
        EXPECT_GT(r.measured_c, 0.0) << j;
        for (std::size_t k = 1; k < r.value.size(); ++k) EXPECT_LE(r.value[k], r.value[k - 1] * (1.0 + 1e-12));
    }
}
