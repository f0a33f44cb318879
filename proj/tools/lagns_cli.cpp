// Command-line driver: one subcommand per experiment kind.
//
//   lagns --config configs/decay.json --out out decay
//
// Exit status is 0 iff every check of the report passes, 1 if a check fails
// and 2 on errors.

#include <iostream>

#include <CLI11.hpp>

#include "lagns/harness.hpp"

namespace {

void print(const lagns::harness::Report& r, const std::vector<std::string>& files) {
    for (const auto& c : r.checks)
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << r.kind << "." << c.name << ": value " << c.value
                  << ", threshold " << c.threshold << (c.detail.empty() ? "" : " (" + c.detail + ")") << '\n';
    for (const auto& f : files) std::cout << "wrote " << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lagrangian compressible Navier-Stokes experiments"};
    app.require_subcommand(1);
    std::string config_path, out_dir = "out", datum_path;
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("-c,--config", config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
    app.add_option("-o,--out", out_dir, "Output directory for reports");
    app.add_option("-j,--threads", threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);

    const std::vector<std::pair<std::string, std::string>> kinds{
        {"linear-check", "Closed-form mode flow against adaptive integration"},
        {"simulate", "Single run with functionals and monitors"},
        {"decay", "Decay-rate fits on a long torus"},
        {"visco-limit", "Diffusive-limit sweep over the viscosity"},
        {"stability", "Continuous dependence on the data"},
        {"picard", "Picard iteration contraction"},
        {"besov", "Norms of one datum"}};
    for (const auto& [name, help] : kinds) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        if (name == "besov") sub->add_option("--datum", datum_path, "CSV file with columns a and v")->check(CLI::ExistingFile);
    }

    CLI11_PARSE(app, argc, argv);
    const std::string kind = app.get_subcommands().front()->get_name();

    try {
        if (config_path.empty()) throw lagns::Error("--config is required");
        auto cfg = lagns::harness::ExperimentConfig::from_file(config_path);
        if (cfg.experiment.kind != kind && kind != "besov")
            throw lagns::Error("config is for experiment '" + cfg.experiment.kind + "', not '" + kind + "'");
        lagns::harness::Report r;
        if (kind == "besov") {
            std::optional<lagns::harness::Datum> d;
            if (!datum_path.empty()) d = lagns::harness::read_datum_csv(datum_path, cfg.grid.grid());
            r = lagns::harness::run_besov(cfg, d);
        } else {
            r = lagns::harness::run_experiment(cfg, threads);
        }
        print(r, lagns::harness::write_report(r, out_dir));
        return r.passed() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
