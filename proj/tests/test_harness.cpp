#include <gtest/gtest.h>

#include <filesystem>
#include <numbers>

#include "lagns/harness.hpp"

using namespace lagns;
using namespace lagns::harness;

namespace {

const double pi = std::numbers::pi;

std::string message_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return "<no error>";
}

json load(const std::string& name) {
    std::ifstream in(std::string(LAGNS_CONFIG_DIR) + "/" + name);
    return json::parse(in);
}

std::vector<double> geometric_times(double t0, double t1, std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = t0 * std::pow(t1 / t0, static_cast<double>(k) / (n - 1));
    return t;
}

json small_visco_config() {
    return {{"experiment", {{"kind", "visco-limit"}, {"sigma", 1.0}, {"limit_dt", 1e-3}}},
            {"model",
             {{"pressure", {{"law", "affine"}, {"slope", 1.0}}},
              {"viscosity", {{"law", "constant_lagrangian"}, {"nu", 1.0}}},
              {"eta_bar", 1.0},
              {"nu_sweep", {4, 8, 16, 32}}}},
            {"grid", {{"n", 64}, {"length", 2.0 * pi}}},
            {"solver", {{"dt", 0.01}, {"t_end", 0.5}, {"scheme", "etd2"}, {"variant", "diffusive"}}},
            {"data",
             {{"recipe", "modes"},
              {"amplitude", 0.05},
              {"modes", {{{"field", "a"}, {"k", 1}, {"amp", 1.0}}, {{"field", "v"}, {"k", 2}, {"amp", 0.5}, {"phase", 0.3}}}}}}};
}

}  // namespace

TEST(Config, UnknownKeysAreErrors) {
    auto j = load("picard.json");
    j["solver"]["dtt"] = 0.1;
    EXPECT_EQ(message_of([&] { ExperimentConfig::from_json(j); }), "unknown key 'dtt' in config block 'solver'");
    j = load("picard.json");
    j["extra"] = 1;
    EXPECT_EQ(message_of([&] { ExperimentConfig::from_json(j); }), "unknown key 'extra' in config block 'root'");
}

TEST(Config, ShippedConfigsParseAndRoundTrip) {
    for (const auto& e : std::filesystem::directory_iterator(LAGNS_CONFIG_DIR)) {
        std::ifstream in(e.path());
        const auto c = ExperimentConfig::from_json(json::parse(in));
        const auto again = ExperimentConfig::from_json(c.to_json());
        EXPECT_EQ(again.to_json(), c.to_json()) << e.path();
    }
}

TEST(Config, RejectsBadValues) {
    auto j = load("picard.json");
    j["experiment"]["kind"] = "nope";
    EXPECT_EQ(message_of([&] { ExperimentConfig::from_json(j); }), "unknown experiment kind 'nope'");
    j = load("decay.json");
    j["experiment"]["fit_window"] = {1.0, 80.0};
    EXPECT_EQ(message_of([&] { ExperimentConfig::from_json(j); }), "fit window outside [0, t_end]");
    j = load("picard.json");
    j["grid"]["length"] = 1.0;
    j["grid"]["length_over_pi"] = 1.0;
    EXPECT_EQ(message_of([&] { ExperimentConfig::from_json(j); }), "grid block sets both 'length' and 'length_over_pi'");
}

TEST(Fit, ExactPowerLaw) {
    const auto t = geometric_times(1.0, 100.0, 50);
    std::vector<double> v;
    for (double x : t) v.push_back(3.0 * std::pow(x, -0.5));
    const auto f = fit_rate(t, v, 1.0, 100.0);
    EXPECT_NEAR(f.exponent, -0.5, 1e-10);
    EXPECT_NEAR(f.intercept, std::log(3.0), 1e-10);
    EXPECT_LT(f.rms, 1e-12);
    EXPECT_EQ(f.points, 50u);
}

TEST(Fit, LogPeriodicPerturbationStaysNear) {
    const auto t = geometric_times(1.0, 1000.0, 200);
    std::vector<double> v;
    for (double x : t) v.push_back(std::pow(x, -0.5) * (1.0 + 0.01 * std::sin(std::log(x))));
    EXPECT_NEAR(fit_rate(t, v, 1.0, 1000.0).exponent, -0.5, 0.02);
}

TEST(Fit, ScaleInvariantInValue) {
    const auto t = geometric_times(0.5, 20.0, 30);
    std::vector<double> v, w;
    for (double x : t) {
        v.push_back(std::exp(-0.1 * x) / (1.0 + x));
        w.push_back(1e6 * v.back());
    }
    EXPECT_NEAR(fit_rate(t, v, 0.5, 20.0).exponent, fit_rate(t, w, 0.5, 20.0).exponent, 1e-12);
}

TEST(Fit, Errors) {
    const auto t = geometric_times(1.0, 10.0, 10);
    std::vector<double> v(10, 1.0);
    v[4] = 0.0;
    EXPECT_EQ(message_of([&] { fit_rate(t, v, 1.0, 10.0); }), "nonpositive value in fit window");
    v[4] = 1.0;
    EXPECT_EQ(message_of([&] { fit_rate(t, v, 1.0, 1.5); }), "too few points in fit window");
    EXPECT_EQ(message_of([&] { fit_power({1.0}, {1.0}); }), "too few points to fit");
}

TEST(ViscoLimit, SweepValidation) {
    auto j = small_visco_config();
    j["model"]["nu_sweep"] = {4.0};
    auto c = ExperimentConfig::from_json(j);
    EXPECT_EQ(message_of([&] { run_visco_limit(c); }), "sweep too short to fit");
    j["model"]["nu_sweep"] = {4.0, 8.0, 12.0, 16.0};
    c = ExperimentConfig::from_json(j);
    EXPECT_EQ(message_of([&] { run_visco_limit(c); }), "non-geometric sweep");
}

TEST(ViscoLimit, AffineSweepMatchesPerModeOracle) {
    // Affine pressure with constant Lagrangian viscosity is linear: the
    // diffusive solution is the exact propagator and the limit decays
    // exponentially mode by mode.
    const auto cfg = ExperimentConfig::from_json(small_visco_config());
    const auto rep = run_visco_limit(cfg);
    const auto& E = rep.summary.at("E");
    const auto g = cfg.grid.grid();
    const auto d = make_datum(cfg.data, g);
    ASSERT_EQ(E.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        const auto m = cfg.model.build_with_nu(cfg.model.nu_sweep[i]);
        auto sc = cfg.solver;
        sc.keep_states = true;
        sc.snapshot_stride = 1;
        const auto times = time_grid(sc);
        const double h = 1e-3;
        const double lambda = (m.limit_rate(1.0 + h) - m.limit_rate(1.0 - h)) / (2.0 * h);
        const auto p = LinearParams::diffusive(m.Ma, m.nu_bar);
        double oracle = 0.0;
        for (double t : times) {
            const auto s = propagate_field({d.a, m.nu_bar * d.v, 0.0}, t, p);
            oracle = std::max(oracle, (s.a - std::exp(lambda * t) * d.a).max_abs());
        }
        EXPECT_GT(oracle, 1e-5);
        EXPECT_NEAR(E[i].get<double>(), oracle, 1e-6 * oracle) << cfg.model.nu_sweep[i];
    }
}

TEST(Stability, LinearModelGivesExactHalving) {
    auto j = load("stability.json");
    j["model"]["pressure"] = {{"law", "affine"}, {"slope", 1.0}};
    j["model"]["viscosity"] = {{"law", "constant_lagrangian"}, {"nu", 1.0}};
    j["solver"]["t_end"] = 0.5;
    const auto rep = run_stability(ExperimentConfig::from_json(j));
    for (double r : rep.summary.at("ratios").get<std::vector<double>>()) EXPECT_NEAR(r, 2.0, 1e-10);
    EXPECT_TRUE(rep.passed());
}

TEST(Stability, ZeroPerturbationAndAmplitudeValidation) {
    auto j = load("stability.json");
    j["solver"]["t_end"] = 0.2;
    j["experiment"]["perturbation"]["modes"] = {{{"field", "a"}, {"k", 3}, {"amp", 0.0}}};
    const auto rep = run_stability(ExperimentConfig::from_json(j));
    EXPECT_TRUE(rep.summary.at("zero_perturbation").get<bool>());
    EXPECT_TRUE(rep.passed());
    j["experiment"]["amplitudes"] = {1.0, 0.4};
    EXPECT_EQ(message_of([&] { run_stability(ExperimentConfig::from_json(j)); }),
              "stability amplitudes must halve at each step");
}

TEST(Decay, ZeroDataReportsNoSignal) {
    auto j = load("decay.json");
    j["grid"] = {{"n", 256}, {"length_over_pi", 64}};
    j["solver"]["t_end"] = 2.0;
    j["experiment"]["fit_window"] = {0.5, 2.0};
    j["data"]["amplitude"] = 0.0;
    const auto rep = run_decay(ExperimentConfig::from_json(j));
    EXPECT_EQ(rep.summary.at("status"), "no signal");
    EXPECT_EQ(rep.summary.at("D_final").get<double>(), 0.0);
}

TEST(Decay, WindowBeyondBoxTimeIsRejected) {
    auto j = load("decay.json");
    j["grid"] = {{"n", 256}, {"length_over_pi", 8}};
    EXPECT_EQ(message_of([&] { run_decay(ExperimentConfig::from_json(j)); }),
              "fit window outside validity: t_max exceeds the box diffusion time");
}

TEST(Report, ReproducibleFromEmbeddedConfig) {
    const auto first = run_experiment(ExperimentConfig::from_json(load("picard.json")));
    const auto again = run_experiment(ExperimentConfig::from_json(first.config));
    const auto a = first.summary.at("differences").get<std::vector<double>>();
    const auto b = again.summary.at("differences").get<std::vector<double>>();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12 * a[0]);
    EXPECT_NEAR(first.summary.at("smallness_lhs").get<double>(), again.summary.at("smallness_lhs").get<double>(), 1e-12);
    EXPECT_TRUE(first.passed());
}

TEST(Report, WritesJsonAndTables) {
    Report r;
    r.kind = "demo";
    r.check("ok", true, 1.0, 2.0);
    r.tables["series"] = Table{{"t", "x"}, {}};
    r.tables["series"].add({0.0, 1.5});
    EXPECT_EQ(message_of([&] { r.tables["series"].add({1.0}); }), "table row width differs from header");
    const auto dir = std::filesystem::temp_directory_path() / "lagns_report_test";
    std::filesystem::remove_all(dir);
    const auto paths = write_report(r, dir.string());
    ASSERT_EQ(paths.size(), 2u);
    std::ifstream js(paths[0]);
    const auto j = json::parse(js);
    EXPECT_TRUE(j.at("passed").get<bool>());
    EXPECT_EQ(j.at("checks")[0].at("name"), "ok");
    std::ifstream cs(paths[1]);
    std::string header, row;
    std::getline(cs, header);
    std::getline(cs, row);
    EXPECT_EQ(header, "t,x");
    EXPECT_EQ(row, "0,1.5");
    EXPECT_EQ(message_of([&] { r.find("missing"); }), "report has no check 'missing'");
    std::filesystem::remove_all(dir);
}

TEST(Datum, ModeRecipeAndErrors) {
    const Grid g{32, 2.0};
    DataBlock d;
    d.amplitude = 0.5;
    d.modes = {{"a", 2, 1.0, 0.3}, {"v", 0, 0.2, 0.0}};
    const auto x = make_datum(d, g);
    EXPECT_NEAR(evaluate(x.a, 0.25), 0.5 * std::cos(2.0 * pi * 2 * 0.25 / 2.0 + 0.3), 1e-12);
    EXPECT_NEAR(evaluate(x.v, 0.7), 0.5 * 0.2 * std::cos(0.0), 1e-12);
    d.modes = {{"a", 0, 1.0, 0.0}};
    EXPECT_EQ(message_of([&] { make_datum(d, g); }), "antiderivative not periodic");
    d.modes = {{"a", 12, 1.0, 0.0}};
    EXPECT_EQ(message_of([&] { make_datum(d, g); }), "mode above the dealiasing cutoff");
}
