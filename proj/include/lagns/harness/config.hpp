#pragma once

// Experiment configuration: one JSON document per experiment with blocks
// experiment / model / grid / solver / data. Unknown keys are errors.

#include <array>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "../solver.hpp"

namespace lagns::harness {

using json = nlohmann::json;

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& block) {
    if (!j.is_object()) throw Error("config block '" + block + "' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw Error("unknown key '" + it.key() + "' in config block '" + block + "'");
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

/// One scalar law by name and parameters.
///   pressure: affine {slope}, gamma {A, gamma}
///   viscosity: constant_eulerian {mu}, constant_lagrangian {nu}
struct LawSpec {
    std::string law;
    double slope = 1.0;
    double A = 1.0;
    double gamma = 1.4;
    double mu = 1.0;
    double nu = 1.0;

    static LawSpec from_json(const json& j, const std::string& block) {
        detail::check_keys(j, {"law", "slope", "A", "gamma", "mu", "nu"}, block);
        LawSpec s;
        if (!j.contains("law")) throw Error("config block '" + block + "' needs 'law'");
        s.law = j.at("law").get<std::string>();
        detail::read(j, "slope", s.slope);
        detail::read(j, "A", s.A);
        detail::read(j, "gamma", s.gamma);
        detail::read(j, "mu", s.mu);
        detail::read(j, "nu", s.nu);
        return s;
    }

    json to_json() const {
        if (law == "affine") return {{"law", law}, {"slope", slope}};
        if (law == "gamma") return {{"law", law}, {"A", A}, {"gamma", gamma}};
        if (law == "constant_eulerian") return {{"law", law}, {"mu", mu}};
        return {{"law", law}, {"nu", nu}};
    }
};

struct ModelBlock {
    LawSpec pressure{"gamma"};
    LawSpec viscosity{"constant_eulerian"};
    double eta_bar = 1.0;
    std::vector<double> nu_sweep;

    ScalarLaw pressure_law() const {
        if (pressure.law == "affine") return laws::affine_pressure(pressure.slope, eta_bar);
        if (pressure.law == "gamma") return laws::gamma_pressure(pressure.A, pressure.gamma, eta_bar);
        throw Error("unknown pressure law '" + pressure.law + "'");
    }

    ScalarLaw viscosity_law(std::optional<double> nu_bar = std::nullopt) const {
        if (viscosity.law == "constant_eulerian")
            return laws::constant_eulerian_viscosity(nu_bar ? *nu_bar * eta_bar : viscosity.mu);
        if (viscosity.law == "constant_lagrangian")
            return laws::constant_lagrangian_viscosity(nu_bar ? *nu_bar : viscosity.nu);
        throw Error("unknown viscosity law '" + viscosity.law + "'");
    }

    ModelParams build() const { return normalize(pressure_law(), viscosity_law(), eta_bar); }
    /// Same laws with the viscosity scaled so that nu(eta_bar) = nu_bar.
    ModelParams build_with_nu(double nu_bar) const { return normalize(pressure_law(), viscosity_law(nu_bar), eta_bar); }

    static ModelBlock from_json(const json& j) {
        detail::check_keys(j, {"pressure", "viscosity", "eta_bar", "nu_sweep"}, "model");
        ModelBlock m;
        if (j.contains("pressure")) m.pressure = LawSpec::from_json(j.at("pressure"), "model.pressure");
        if (j.contains("viscosity")) m.viscosity = LawSpec::from_json(j.at("viscosity"), "model.viscosity");
        detail::read(j, "eta_bar", m.eta_bar);
        detail::read(j, "nu_sweep", m.nu_sweep);
        return m;
    }

    json to_json() const {
        json j{{"pressure", pressure.to_json()}, {"viscosity", viscosity.to_json()}, {"eta_bar", eta_bar}};
        if (!nu_sweep.empty()) j["nu_sweep"] = nu_sweep;
        return j;
    }
};

struct GridBlock {
    std::size_t n = 256;
    double length = 2.0 * std::numbers::pi;
    std::optional<int> j_min;
    std::optional<int> j_max;
    int j0 = 0;

    Grid grid() const {
        Grid g{n, length};
        g.validate();
        return g;
    }

    DyadicFilterBank bank() const {
        const auto def = default_filter_bank(grid());
        return build_filter_bank(n, length, j_min.value_or(def.j_min()), j_max.value_or(def.j_max()));
    }

    static GridBlock from_json(const json& j) {
        detail::check_keys(j, {"n", "length", "length_over_pi", "j_min", "j_max", "j0"}, "grid");
        GridBlock g;
        detail::read(j, "n", g.n);
        detail::read(j, "length", g.length);
        if (j.contains("length_over_pi")) {
            if (j.contains("length")) throw Error("grid block sets both 'length' and 'length_over_pi'");
            g.length = j.at("length_over_pi").get<double>() * std::numbers::pi;
        }
        if (j.contains("j_min")) g.j_min = j.at("j_min").get<int>();
        if (j.contains("j_max")) g.j_max = j.at("j_max").get<int>();
        detail::read(j, "j0", g.j0);
        return g;
    }

    json to_json() const {
        json j{{"n", n}, {"length", length}, {"j0", j0}};
        if (j_min) j["j_min"] = *j_min;
        if (j_max) j["j_max"] = *j_max;
        return j;
    }
};

inline SolverConfig solver_from_json(const json& j) {
    detail::check_keys(j,
                       {"dt", "t_end", "scheme", "dealias", "snapshot_stride", "variant", "keep_states", "nonlinear",
                        "p", "ramp_steps", "dt_min"},
                       "solver");
    SolverConfig c;
    detail::read(j, "dt", c.dt);
    detail::read(j, "t_end", c.t_end);
    if (j.contains("scheme")) {
        const auto s = j.at("scheme").get<std::string>();
        if (s == "etd1") c.scheme = Scheme::etd1;
        else if (s == "etd2") c.scheme = Scheme::etd2;
        else throw Error("unknown scheme '" + s + "'");
    }
    detail::read(j, "dealias", c.dealias);
    detail::read(j, "snapshot_stride", c.snapshot_stride);
    if (j.contains("variant")) {
        const auto s = j.at("variant").get<std::string>();
        if (s == "normalized") c.variant = Variant::normalized;
        else if (s == "diffusive") c.variant = Variant::diffusive;
        else throw Error("unknown variant '" + s + "'");
    }
    detail::read(j, "keep_states", c.keep_states);
    detail::read(j, "nonlinear", c.nonlinear);
    detail::read(j, "p", c.p);
    detail::read(j, "ramp_steps", c.ramp_steps);
    detail::read(j, "dt_min", c.dt_min);
    c.validate();
    return c;
}

inline json solver_to_json(const SolverConfig& c) {
    return {{"dt", c.dt},
            {"t_end", c.t_end},
            {"scheme", c.scheme == Scheme::etd1 ? "etd1" : "etd2"},
            {"dealias", c.dealias},
            {"snapshot_stride", c.snapshot_stride},
            {"variant", c.variant == Variant::normalized ? "normalized" : "diffusive"},
            {"keep_states", c.keep_states},
            {"nonlinear", c.nonlinear},
            {"p", c.p},
            {"ramp_steps", c.ramp_steps},
            {"dt_min", c.dt_min}};
}

/// One Fourier component amp * cos(2 pi k y / L + phase) added to field "a" or "v".
struct ModeSpec {
    std::string field = "a";
    int k = 1;
    double amp = 1.0;
    double phase = 0.0;
};

/// Deterministic initial-datum recipe, scaled by `amplitude`.
///   modes:     explicit list of ModeSpec
///   bump:      a = a_weight (G - mean G), v = v_weight G', G a periodized Gaussian
///              centred at center*L with width `width`
///   broadband: |c_k| ~ xi^exponent exp(-(xi/cutoff)^2) with quasi-random
///              phases, sup-normalized; a and v weighted by a_weight, v_weight
struct DataBlock {
    std::string recipe = "modes";
    double amplitude = 1.0;
    std::vector<ModeSpec> modes;
    double center = 0.5;
    double width = 0.5;
    double a_weight = 1.0;
    double v_weight = 0.0;
    double cutoff = 4.0;
    double exponent = 0.5;

    static DataBlock from_json(const json& j, const std::string& block = "data") {
        detail::check_keys(j, {"recipe", "amplitude", "modes", "center", "width", "a_weight", "v_weight", "cutoff",
                               "exponent"},
                           block);
        DataBlock d;
        detail::read(j, "recipe", d.recipe);
        if (d.recipe != "modes" && d.recipe != "bump" && d.recipe != "broadband")
            throw Error("unknown data recipe '" + d.recipe + "'");
        detail::read(j, "amplitude", d.amplitude);
        if (j.contains("modes")) {
            for (const auto& m : j.at("modes")) {
                detail::check_keys(m, {"field", "k", "amp", "phase"}, block + ".modes");
                ModeSpec s;
                detail::read(m, "field", s.field);
                if (s.field != "a" && s.field != "v") throw Error("mode field must be 'a' or 'v'");
                detail::read(m, "k", s.k);
                detail::read(m, "amp", s.amp);
                detail::read(m, "phase", s.phase);
                d.modes.push_back(s);
            }
        }
        detail::read(j, "center", d.center);
        detail::read(j, "width", d.width);
        detail::read(j, "a_weight", d.a_weight);
        detail::read(j, "v_weight", d.v_weight);
        detail::read(j, "cutoff", d.cutoff);
        detail::read(j, "exponent", d.exponent);
        return d;
    }

    json to_json() const {
        json j{{"recipe", recipe}, {"amplitude", amplitude}};
        if (recipe == "modes") {
            j["modes"] = json::array();
            for (const auto& m : modes)
                j["modes"].push_back({{"field", m.field}, {"k", m.k}, {"amp", m.amp}, {"phase", m.phase}});
        } else if (recipe == "bump") {
            j.update({{"center", center}, {"width", width}, {"a_weight", a_weight}, {"v_weight", v_weight}});
        } else {
            j.update({{"cutoff", cutoff}, {"exponent", exponent}, {"a_weight", a_weight}, {"v_weight", v_weight}});
        }
        return j;
    }
};

struct ExperimentBlock {
    std::string kind = "simulate";
    std::optional<std::array<double, 2>> fit_window;
    double sigma = 1.0;
    std::vector<double> amplitudes{1.0, 0.5, 0.25};
    std::optional<DataBlock> perturbation;
    double kappa = 0.15;
    std::size_t picard_iters = 6;
    double smallness_threshold = 1.0;
    std::size_t n_xi = 40;
    std::size_t n_t = 8;
    double xi_min = 0.05;
    double xi_max = 8.0;
    double t_max = 2.0;
    double tolerance = 1e-10;
    double limit_dt = 1e-3;

    static ExperimentBlock from_json(const json& j) {
        detail::check_keys(j,
                           {"kind", "fit_window", "sigma", "amplitudes", "perturbation", "kappa", "picard_iters",
                            "smallness_threshold", "n_xi", "n_t", "xi_min", "xi_max", "t_max", "tolerance",
                            "limit_dt"},
                           "experiment");
        ExperimentBlock e;
        detail::read(j, "kind", e.kind);
        static const std::set<std::string> kinds{"linear-check", "simulate", "decay", "visco-limit",
                                                 "stability",    "picard",   "besov"};
        if (!kinds.count(e.kind)) throw Error("unknown experiment kind '" + e.kind + "'");
        if (j.contains("fit_window")) {
            const auto w = j.at("fit_window").get<std::vector<double>>();
            if (w.size() != 2 || !(w[0] > 0.0 && w[1] > w[0])) throw Error("fit window must be [t_min, t_max] with 0 < t_min < t_max");
            e.fit_window = std::array<double, 2>{w[0], w[1]};
        }
        detail::read(j, "sigma", e.sigma);
        detail::read(j, "amplitudes", e.amplitudes);
        if (j.contains("perturbation")) e.perturbation = DataBlock::from_json(j.at("perturbation"), "experiment.perturbation");
        detail::read(j, "kappa", e.kappa);
        detail::read(j, "picard_iters", e.picard_iters);
        detail::read(j, "smallness_threshold", e.smallness_threshold);
        detail::read(j, "n_xi", e.n_xi);
        detail::read(j, "n_t", e.n_t);
        detail::read(j, "xi_min", e.xi_min);
        detail::read(j, "xi_max", e.xi_max);
        detail::read(j, "t_max", e.t_max);
        detail::read(j, "tolerance", e.tolerance);
        detail::read(j, "limit_dt", e.limit_dt);
        return e;
    }

    json to_json() const {
        json j{{"kind", kind},
               {"sigma", sigma},
               {"amplitudes", amplitudes},
               {"kappa", kappa},
               {"picard_iters", picard_iters},
               {"smallness_threshold", smallness_threshold},
               {"n_xi", n_xi},
               {"n_t", n_t},
               {"xi_min", xi_min},
               {"xi_max", xi_max},
               {"t_max", t_max},
               {"tolerance", tolerance},
               {"limit_dt", limit_dt}};
        if (fit_window) j["fit_window"] = {(*fit_window)[0], (*fit_window)[1]};
        if (perturbation) j["perturbation"] = perturbation->to_json();
        return j;
    }
};

struct ExperimentConfig {
    ExperimentBlock experiment;
    ModelBlock model;
    GridBlock grid;
    SolverConfig solver;
    DataBlock data;

    static ExperimentConfig from_json(const json& j) {
        detail::check_keys(j, {"experiment", "model", "grid", "solver", "data"}, "root");
        ExperimentConfig c;
        for (const char* b : {"experiment", "model", "grid", "solver", "data"})
            if (!j.contains(b)) throw Error(std::string("config is missing block '") + b + "'");
        c.experiment = ExperimentBlock::from_json(j.at("experiment"));
        c.model = ModelBlock::from_json(j.at("model"));
        c.grid = GridBlock::from_json(j.at("grid"));
        c.solver = solver_from_json(j.at("solver"));
        c.data = DataBlock::from_json(j.at("data"));
        if (!(c.data.amplitude > 0.0) && c.experiment.kind != "decay")
            throw Error("data amplitude must be positive");
        if (c.experiment.fit_window && (*c.experiment.fit_window)[1] > c.solver.t_end * (1.0 + 1e-12))
            throw Error("fit window outside [0, t_end]");
        c.solver.j0 = c.grid.j0;
        return c;
    }

    static ExperimentConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open config '" + path + "'");
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw Error("malformed config '" + path + "': " + e.what());
        }
        return from_json(j);
    }

    json to_json() const {
        return {{"experiment", experiment.to_json()},
                {"model", model.to_json()},
                {"grid", grid.to_json()},
                {"solver", solver_to_json(solver)},
                {"data", data.to_json()}};
    }
};

}  // namespace lagns::harness
