#pragma once

// Experiment reports: named pass/fail checks, a free-form JSON summary, and
// CSV tables. Every report carries the resolved config it was run from.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "config.hpp"

namespace lagns::harness {

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row) {
        if (row.size() != columns.size()) throw Error("table row width differs from header");
        rows.push_back(std::move(row));
    }

    std::string csv() const {
        std::ostringstream os;
        os << std::setprecision(17);
        for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
        os << '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << '\n';
        }
        return os.str();
    }
};

struct Report {
    std::string kind;
    json config;
    json summary = json::object();
    std::vector<Check> checks;
    std::map<std::string, Table> tables;

    void check(const std::string& name, bool pass, double value, double threshold, std::string detail = {}) {
        checks.push_back({name, pass, value, threshold, std::move(detail)});
    }

    const Check& find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return c;
        throw Error("report has no check '" + name + "'");
    }

    bool passed() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    json to_json() const {
        json cs = json::array();
        for (const auto& c : checks)
            cs.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"threshold", c.threshold},
                          {"detail", c.detail}});
        return {{"kind", kind}, {"passed", passed()}, {"checks", cs}, {"summary", summary}, {"config", config}};
    }
};

/// Writes <dir>/<kind>.json and one <dir>/<kind>_<table>.csv per table.
/// Returns the written paths.
inline std::vector<std::string> write_report(const Report& r, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> out;
    const auto base = fs::path(dir) / r.kind;
    {
        const auto p = base.string() + ".json";
        std::ofstream f(p);
        if (!f) throw Error("cannot write '" + p + "'");
        f << r.to_json().dump(2) << '\n';
        out.push_back(p);
    }
    for (const auto& [name, t] : r.tables) {
        const auto p = base.string() + "_" + name + ".csv";
        std::ofstream f(p);
        if (!f) throw Error("cannot write '" + p + "'");
        f << t.csv();
        out.push_back(p);
    }
    return out;
}

}  // namespace lagns::harness
