#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "../fft.hpp"

namespace lagns::harness {

struct FitResult {
    double exponent = 0.0;
    double intercept = 0.0;  ///< log value at log t = 0
    double rms = 0.0;        ///< residual RMS in log value
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t points = 0;
};

namespace detail {

inline FitResult line_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    if (!(sxx > 0.0)) throw Error("fit abscissae have no spread");
    FitResult r;
    r.exponent = sxy / sxx;
    r.intercept = my - r.exponent * mx;
    double ss = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double e = y[k] - (r.intercept + r.exponent * x[k]);
        ss += e * e;
    }
    r.rms = std::sqrt(ss / n);
    r.points = x.size();
    return r;
}

}  // namespace detail

/// Least-squares line through (log t, log value) for t in [t_min, t_max].
inline FitResult fit_rate(const std::vector<double>& t, const std::vector<double>& value, double t_min,
                          double t_max) {
    if (t.size() != value.size()) throw Error("times and values differ in length");
    std::vector<double> x, y;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < t_min || t[k] > t_max) continue;
        if (!(value[k] > 0.0)) throw Error("nonpositive value in fit window");
        if (!(t[k] > 0.0)) throw Error("nonpositive time in fit window");
        x.push_back(std::log(t[k]));
        y.push_back(std::log(value[k]));
    }
    if (x.size() < 5) throw Error("too few points in fit window");
    auto r = detail::line_fit(x, y);
    r.t_min = t_min;
    r.t_max = t_max;
    return r;
}

/// Log-log slope of y against x over all given points (x, y > 0).
inline FitResult fit_power(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw Error("abscissae and values differ in length");
    if (x.size() < 2) throw Error("too few points to fit");
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0 && y[k] > 0.0)) throw Error("nonpositive value in power fit");
        lx.push_back(std::log(x[k]));
        ly.push_back(std::log(y[k]));
    }
    auto r = detail::line_fit(lx, ly);
    r.t_min = *std::min_element(x.begin(), x.end());
    r.t_max = *std::max_element(x.begin(), x.end());
    return r;
}

}  // namespace lagns::harness
