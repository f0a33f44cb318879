#pragma once

// Deterministic initial data from a DataBlock recipe.

#include <cmath>
#include <numbers>

#include "config.hpp"

namespace lagns::harness {

struct Datum {
    SpectralField a;
    SpectralField v;
};

namespace detail {

// Quasi-random phase in [0, 2 pi) from the golden-ratio sequence.
inline double phase(std::size_t k, double shift) {
    const double g = 0.6180339887498949;
    const double x = std::fmod(static_cast<double>(k) * g + shift, 1.0);
    return 2.0 * std::numbers::pi * x;
}

inline SpectralField broadband(const Grid& g, double exponent, double cutoff, double shift) {
    const std::size_t kc = g.dealias_index();
    std::vector<cplx> c(g.n / 2 + 1, 0.0);
    for (std::size_t k = 1; k <= kc && k < g.nyquist(); ++k) {
        const double xi = g.wavenumber(k);
        const double r = xi / cutoff;
        c[k] = std::polar(std::pow(xi, exponent) * std::exp(-r * r), phase(k, shift));
    }
    auto f = SpectralField::from_coefficients(g, std::move(c));
    const double m = f.max_abs();
    return m > 0.0 ? (1.0 / m) * f : f;
}

}  // namespace detail

/// (a0, v0) on grid g. The result of "bump" and "broadband" has zero-mean a;
/// "modes" with k = 0 on field a is rejected.
inline Datum make_datum(const DataBlock& d, const Grid& g) {
    g.validate();
    const double L = g.length;
    auto zero = SpectralField::zeros(g);
    if (d.recipe == "modes") {
        std::vector<double> a(g.n, 0.0), v(g.n, 0.0);
        for (const auto& m : d.modes) {
            if (m.k < 0) throw Error("mode index must be nonnegative");
            if (m.field == "a" && m.k == 0) throw Error("antiderivative not periodic");
            if (static_cast<std::size_t>(m.k) > g.dealias_index()) throw Error("mode above the dealiasing cutoff");
            auto& dst = m.field == "a" ? a : v;
            const double w = 2.0 * std::numbers::pi * m.k / L;
            for (std::size_t i = 0; i < g.n; ++i) dst[i] += d.amplitude * m.amp * std::cos(w * g.point(i) + m.phase);
        }
        return {SpectralField::from_samples(g, std::move(a)), SpectralField::from_samples(g, std::move(v))};
    }
    if (d.recipe == "bump") {
        if (!(d.width > 0.0)) throw Error("bump width must be positive");
        const double c = d.center * L;
        auto G = SpectralField::from_function(g, [&](double y) {
            double s = 0.0;
            for (int w = -2; w <= 2; ++w) {
                const double z = (y - c + w * L) / d.width;
                s += std::exp(-0.5 * z * z);
            }
            return s;
        });
        G = G - SpectralField::from_function(g, [&](double) { return G.mean(); });
        G = (1.0 / G.max_abs()) * G;
        auto dG = derivative(G);
        const double md = dG.max_abs();
        if (md > 0.0) dG = (1.0 / md) * dG;
        return {(d.amplitude * d.a_weight) * G, (d.amplitude * d.v_weight) * dG};
    }
    if (d.recipe == "broadband") {
        if (!(d.cutoff > 0.0)) throw Error("broadband cutoff must be positive");
        return {(d.amplitude * d.a_weight) * detail::broadband(g, d.exponent, d.cutoff, 0.0),
                (d.amplitude * d.v_weight) * detail::broadband(g, d.exponent, d.cutoff, 0.37)};
    }
    throw Error("unknown data recipe '" + d.recipe + "'");
}

/// Datum read from a CSV file with header columns "a" and "v" (one row per
/// grid point, any other columns ignored).
inline Datum read_datum_csv(const std::string& path, const Grid& g) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open datum '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw Error("empty datum file");
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::size_t b = 0;
        while (true) {
            const auto e = s.find(',', b);
            out.push_back(s.substr(b, e == std::string::npos ? std::string::npos : e - b));
            if (e == std::string::npos) break;
            b = e + 1;
        }
        return out;
    };
    const auto head = split(line);
    int ia = -1, iv = -1;
    for (std::size_t i = 0; i < head.size(); ++i) {
        if (head[i] == "a") ia = static_cast<int>(i);
        if (head[i] == "v") iv = static_cast<int>(i);
    }
    if (ia < 0 || iv < 0) throw Error("datum file needs columns 'a' and 'v'");
    std::vector<double> a, v;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() < head.size()) throw Error("short row in datum file");
        a.push_back(std::stod(f[static_cast<std::size_t>(ia)]));
        v.push_back(std::stod(f[static_cast<std::size_t>(iv)]));
    }
    if (a.size() != g.n) throw Error("datum file has " + std::to_string(a.size()) + " rows, grid has " + std::to_string(g.n));
    return {SpectralField::from_samples(g, std::move(a)), SpectralField::from_samples(g, std::move(v))};
}

}  // namespace lagns::harness
