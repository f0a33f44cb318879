#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "fft.hpp"

namespace lagns {

/// Uniform periodic grid on [0, L) with N points.
struct Grid {
    std::size_t n = 0;
    double length = 0.0;

    double dy() const { return length / static_cast<double>(n); }
    double point(std::size_t i) const { return dy() * static_cast<double>(i); }
    /// Angular wavenumber of the k-th nonnegative Fourier mode.
    double wavenumber(std::size_t k) const { return 2.0 * std::numbers::pi * static_cast<double>(k) / length; }
    std::size_t nyquist() const { return n / 2; }
    /// Largest mode index kept by the 2/3 rule.
    std::size_t dealias_index() const { return n / 3; }
    double dealias_wavenumber() const { return wavenumber(dealias_index()); }

    bool operator==(const Grid& o) const { return n == o.n && length == o.length; }

    void validate() const {
        if (n < 4 || n % 2 != 0) throw Error("grid size must be even and >= 4");
        if (!(length > 0.0) || !std::isfinite(length)) throw Error("domain length must be positive");
    }
};

/// Real periodic field held both as grid samples and as Fourier coefficients.
///
/// Both representations are filled at construction and never mutated
/// afterwards, so a SpectralField can be shared freely between threads.
class SpectralField {
  public:
    SpectralField() = default;

    static SpectralField from_samples(const Grid& grid, std::vector<double> samples) {
        grid.validate();
        if (samples.size() != grid.n) throw Error("sample count does not match grid");
        SpectralField f;
        f.grid_ = grid;
        f.coeffs_ = rfft(samples);
        f.coeffs_.front().imag(0.0);
        f.coeffs_.back().imag(0.0);
        f.samples_ = std::move(samples);
        return f;
    }

    static SpectralField from_coefficients(const Grid& grid, std::vector<cplx> coeffs) {
        grid.validate();
        if (coeffs.size() != grid.n / 2 + 1) throw Error("coefficient count does not match grid");
        coeffs.front().imag(0.0);
        coeffs.back().imag(0.0);
        SpectralField f;
        f.grid_ = grid;
        f.samples_ = irfft(coeffs, grid.n);
        f.coeffs_ = std::move(coeffs);
        return f;
    }

    static SpectralField zeros(const Grid& grid) {
        return from_coefficients(grid, std::vector<cplx>(grid.n / 2 + 1));
    }

    template <class F>
    static SpectralField from_function(const Grid& grid, F&& fn) {
        std::vector<double> s(grid.n);
        for (std::size_t i = 0; i < grid.n; ++i) s[i] = fn(grid.point(i));
        return from_samples(grid, std::move(s));
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return grid_.n; }
    double length() const { return grid_.length; }
    std::span<const double> samples() const { return samples_; }
    std::span<const cplx> coefficients() const { return coeffs_; }
    double mean() const { return coeffs_.empty() ? 0.0 : coeffs_.front().real(); }

    double max_abs() const {
        double m = 0.0;
        for (double x : samples_) m = std::max(m, std::abs(x));
        return m;
    }
    double min() const { return *std::min_element(samples_.begin(), samples_.end()); }
    double max() const { return *std::max_element(samples_.begin(), samples_.end()); }

    /// Same samples, relabelled onto a torus of a different length.
    SpectralField with_length(double length) const {
        SpectralField f = *this;
        f.grid_.length = length;
        f.grid_.validate();
        return f;
    }

    friend SpectralField operator+(const SpectralField& a, const SpectralField& b) {
        return combine(a, b, [](cplx x, cplx y) { return x + y; });
    }
    friend SpectralField operator-(const SpectralField& a, const SpectralField& b) {
        return combine(a, b, [](cplx x, cplx y) { return x - y; });
    }
    friend SpectralField operator*(double s, const SpectralField& a) {
        std::vector<cplx> c(a.coeffs_);
        for (auto& x : c) x *= s;
        std::vector<double> v(a.samples_);
        for (auto& x : v) x *= s;
        SpectralField f;
        f.grid_ = a.grid_;
        f.coeffs_ = std::move(c);
        f.samples_ = std::move(v);
        return f;
    }
    SpectralField operator-() const { return (-1.0) * *this; }

  private:
    template <class Op>
    static SpectralField combine(const SpectralField& a, const SpectralField& b, Op op) {
        if (!(a.grid_ == b.grid_)) throw Error("fields live on different grids");
        SpectralField f;
        f.grid_ = a.grid_;
        f.coeffs_.resize(a.coeffs_.size());
        f.samples_.resize(a.samples_.size());
        for (std::size_t k = 0; k < f.coeffs_.size(); ++k) f.coeffs_[k] = op(a.coeffs_[k], b.coeffs_[k]);
        for (std::size_t i = 0; i < f.samples_.size(); ++i)
            f.samples_[i] = op(cplx(a.samples_[i]), cplx(b.samples_[i])).real();
        return f;
    }

    Grid grid_{};
    std::vector<double> samples_;
    std::vector<cplx> coeffs_;
};

/// Multiply every Fourier coefficient by m(k, xi_k).
template <class M>
SpectralField apply_multiplier(const SpectralField& f, M&& m) {
    const Grid& g = f.grid();
    std::vector<cplx> c(f.coefficients().begin(), f.coefficients().end());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= m(k, g.wavenumber(k));
    return SpectralField::from_coefficients(g, std::move(c));
}

/// Spectral derivative of the given order. Odd derivatives drop the Nyquist mode.
inline SpectralField derivative(const SpectralField& f, int order = 1) {
    const std::size_t nyq = f.grid().nyquist();
    return apply_multiplier(f, [order, nyq](std::size_t k, double xi) -> cplx {
        if (order % 2 != 0 && k == nyq) return 0.0;
        return std::pow(cplx(0.0, xi), order);
    });
}

/// Zero-mean antiderivative: zero mode set to 0, so only f - mean(f) is integrated.
inline SpectralField antiderivative(const SpectralField& f) {
    const std::size_t nyq = f.grid().nyquist();
    return apply_multiplier(f, [nyq](std::size_t k, double xi) -> cplx {
        if (k == 0 || k == nyq) return 0.0;
        return 1.0 / cplx(0.0, xi);
    });
}

/// 2/3-rule truncation.
inline SpectralField dealias(const SpectralField& f) {
    const std::size_t kc = f.grid().dealias_index();
    return apply_multiplier(f, [kc](std::size_t k, double) -> cplx { return k <= kc ? 1.0 : 0.0; });
}

/// Pointwise map on the samples.
template <class F>
SpectralField pointwise(const SpectralField& f, F&& fn) {
    std::vector<double> s(f.samples().begin(), f.samples().end());
    for (auto& x : s) x = fn(x);
    return SpectralField::from_samples(f.grid(), std::move(s));
}

/// Pointwise product of two fields, optionally 2/3-dealiased.
inline SpectralField product(const SpectralField& a, const SpectralField& b, bool dealiased = true) {
    if (!(a.grid() == b.grid())) throw Error("fields live on different grids");
    std::vector<double> s(a.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = a.samples()[i] * b.samples()[i];
    auto p = SpectralField::from_samples(a.grid(), std::move(s));
    return dealiased ? dealias(p) : p;
}

/// Rectangle-rule L^p norm on the grid; p = infinity gives the grid max.
inline double lp_norm(std::span<const double> samples, double dy, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : samples) m = std::max(m, std::abs(x));
        return m;
    }
    double s = 0.0;
    if (p == 2.0) {
        for (double x : samples) s += x * x;
        return std::sqrt(dy * s);
    }
    for (double x : samples) s += std::pow(std::abs(x), p);
    return std::pow(dy * s, 1.0 / p);
}

inline double lp_norm(const SpectralField& f, double p) { return lp_norm(f.samples(), f.grid().dy(), p); }

/// L^2 norm from the coefficients (identical to the rectangle rule by discrete Parseval).
inline double l2_norm_spectral(std::span<const cplx> c, const Grid& g) {
    double s = std::norm(c.front());
    const std::size_t nyq = g.nyquist();
    for (std::size_t k = 1; k < nyq; ++k) s += 2.0 * std::norm(c[k]);
    s += std::norm(c[nyq]);
    return std::sqrt(g.length * s);
}

/// Evaluate the trigonometric interpolant of f at an arbitrary point.
inline double evaluate(const SpectralField& f, double y) {
    const auto c = f.coefficients();
    const std::size_t nyq = f.grid().nyquist();
    const double theta = 2.0 * std::numbers::pi * y / f.length();
    const cplx step = std::polar(1.0, theta);
    cplx rot = step;
    double s = c[0].real();
    for (std::size_t k = 1; k < nyq; ++k) {
        s += 2.0 * (c[k] * rot).real();
        rot *= step;
    }
    s += c[nyq].real() * std::cos(theta * static_cast<double>(nyq));
    return s;
}

}  // namespace lagns
