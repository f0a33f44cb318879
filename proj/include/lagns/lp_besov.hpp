#pragma once

// Homogeneous Littlewood-Paley machinery on the torus: dyadic filter bank,
// block extraction, Besov and hybrid low/high norms, time-integrated
// ("tilde") norms over stored block histories, and the Bony split of a product.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "spectral_field.hpp"

namespace lagns {

namespace profile {

/// Degree-7 smoothstep on [0,1]: three vanishing derivatives at both ends.
constexpr double smoothstep7(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double x4 = x * x * x * x;
    return x4 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)));
}

inline constexpr double inner_radius = 3.0 / 4.0;
inline constexpr double outer_radius = 4.0 / 3.0;

/// Radial cutoff: 1 on |xi| <= 3/4, 0 on |xi| >= 4/3.
constexpr double chi(double xi) {
    const double r = xi < 0 ? -xi : xi;
    return 1.0 - smoothstep7((r - inner_radius) / (outer_radius - inner_radius));
}

/// Ring profile chi(xi/2) - chi(xi), supported in 3/4 <= |xi| <= 8/3.
constexpr double phi(double xi) { return chi(0.5 * xi) - chi(xi); }

inline constexpr double ring_lower = 3.0 / 4.0;
inline constexpr double ring_upper = 8.0 / 3.0;

}  // namespace profile

/// Sampled dyadic multipliers phi_j(xi_k), j_min <= j <= j_max, on the
/// nonnegative modes of one grid.
class DyadicFilterBank {
  public:
    DyadicFilterBank() = default;
    DyadicFilterBank(Grid grid, int j_min, int j_max, std::vector<std::vector<double>> filters)
        : grid_(grid), j_min_(j_min), j_max_(j_max), filters_(std::move(filters)) {}

    const Grid& grid() const { return grid_; }
    int j_min() const { return j_min_; }
    int j_max() const { return j_max_; }
    std::size_t count() const { return filters_.size(); }
    bool contains(int j) const { return j >= j_min_ && j <= j_max_; }

    std::span<const double> filter(int j) const {
        if (!contains(j)) throw Error("dyadic index " + std::to_string(j) + " outside filter bank");
        return filters_[static_cast<std::size_t>(j - j_min_)];
    }

    /// Sum of all multipliers at mode k.
    double partition(std::size_t k) const {
        double s = 0.0;
        for (const auto& f : filters_) s += f[k];
        return s;
    }

    /// Modes whose multipliers sum to one (the band the bank resolves).
    bool resolves(std::size_t k) const {
        const double xi = grid_.wavenumber(k);
        return xi > profile::ring_lower * std::ldexp(1.0, j_min_) &&
               xi < profile::ring_upper * std::ldexp(1.0, j_max_);
    }

  private:
    Grid grid_{};
    int j_min_ = 0;
    int j_max_ = -1;
    std::vector<std::vector<double>> filters_;
};

/// Build the bank on an N-point torus of length L.
///
/// Rings whose support holds no discrete frequency, or whose nominal frequency
/// 2^j exceeds the 2/3 dealiasing cutoff, are rejected. The sampled profiles are
/// divided by their sum so that the partition of unity is exact on the band
/// covered by the bank.
inline DyadicFilterBank build_filter_bank(std::size_t n, double length, int j_min, int j_max) {
    const Grid grid{n, length};
    grid.validate();
    if (!std::has_single_bit(n)) throw Error("grid size must be a power of two");
    if (j_min > j_max) throw Error("empty dyadic range");
    if (std::ldexp(1.0, j_max) > grid.dealias_wavenumber())
        throw Error("unresolvable dyadic ring: 2^" + std::to_string(j_max) + " above dealias cutoff");
    if (profile::ring_upper * std::ldexp(1.0, j_min) <= grid.wavenumber(1))
        throw Error("unresolvable dyadic ring: 2^" + std::to_string(j_min) + " below fundamental frequency");

    const std::size_t modes = n / 2 + 1;
    const auto rings = static_cast<std::size_t>(j_max - j_min + 1);
    std::vector<std::vector<double>> filters(rings, std::vector<double>(modes, 0.0));
    for (std::size_t k = 1; k < modes; ++k) {
        const double xi = grid.wavenumber(k);
        double sum = 0.0;
        for (std::size_t r = 0; r < rings; ++r) {
            const int j = j_min + static_cast<int>(r);
            filters[r][k] = profile::phi(std::ldexp(xi, -j));
            sum += filters[r][k];
        }
        if (sum > 0.0)
            for (auto& f : filters) f[k] /= sum;
    }
    return {grid, j_min, j_max, std::move(filters)};
}

/// Widest admissible bank: lowest ring holds the fundamental, highest ring
/// reaches past the dealiasing cutoff.
inline DyadicFilterBank default_filter_bank(const Grid& grid) {
    const int j_min = static_cast<int>(std::floor(std::log2(grid.wavenumber(1))));
    const int j_max = static_cast<int>(std::floor(std::log2(grid.dealias_wavenumber())));
    return build_filter_bank(grid.n, grid.length, j_min, j_max);
}

/// Delta_j f.
inline SpectralField lp_block(const SpectralField& f, int j, const DyadicFilterBank& bank) {
    if (!(f.grid() == bank.grid())) throw Error("field and filter bank live on different grids");
    const auto phi = bank.filter(j);
    return apply_multiplier(f, [&](std::size_t k, double) -> cplx { return phi[k]; });
}

/// ||Delta_j f||_{L^p} for every ring of the bank, indexed by j - j_min.
inline std::vector<double> block_norms(const SpectralField& f, const DyadicFilterBank& bank, double p) {
    if (!(f.grid() == bank.grid())) throw Error("field and filter bank live on different grids");
    std::vector<double> out;
    out.reserve(bank.count());
    const auto c = f.coefficients();
    std::vector<cplx> tmp(c.size());
    for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
        const auto phi = bank.filter(j);
        for (std::size_t k = 0; k < c.size(); ++k) tmp[k] = phi[k] * c[k];
        if (p == 2.0) {
            out.push_back(l2_norm_spectral(tmp, f.grid()));
        } else {
            const auto s = irfft(tmp, f.size());
            out.push_back(lp_norm(s, f.grid().dy(), p));
        }
    }
    return out;
}

enum class FrequencyRange { full, low, high };

/// One (semi)norm: regularity sigma, Lebesgue p, summation r in {1, inf},
/// and an optional low/high restriction at threshold j0 + log2(alpha).
struct BesovSpec {
    double p = 2.0;
    double r = 1.0;
    double sigma = 0.0;
    FrequencyRange range = FrequencyRange::full;
    int j0 = 0;
    double alpha = 1.0;

    void validate() const {
        if (!(p >= 1.0)) throw Error("Lebesgue exponent must be >= 1");
        if (!(r == 1.0 || std::isinf(r))) throw Error("summation exponent must be 1 or infinity");
        if (!(alpha > 0.0)) throw Error("frequency-shift multiplier must be positive");
    }

    /// Whether ring j enters the sum. The low and high ranges overlap by one ring.
    bool selects(int j) const {
        // Snap log2(alpha) to an integer when it is one up to rounding.
        double shift = std::log2(alpha);
        if (std::abs(shift - std::round(shift)) < 1e-12) shift = std::round(shift);
        switch (range) {
            case FrequencyRange::low: return j <= j0 + 1 + shift + 1e-12;
            case FrequencyRange::high: return j >= j0 + shift - 1e-12;
            case FrequencyRange::full: break;
        }
        return true;
    }

    BesovSpec with(FrequencyRange rg) const {
        BesovSpec s = *this;
        s.range = rg;
        return s;
    }
    BesovSpec with_sigma(double s) const {
        BesovSpec o = *this;
        o.sigma = s;
        return o;
    }
};

/// Weighted l^r sum of precomputed block norms (indexed from j_min).
inline double besov_from_blocks(std::span<const double> norms, int j_min, const BesovSpec& spec) {
    double acc = 0.0;
    for (std::size_t i = 0; i < norms.size(); ++i) {
        const int j = j_min + static_cast<int>(i);
        if (!spec.selects(j)) continue;
        const double term = std::exp2(j * spec.sigma) * norms[i];
        acc = spec.r == 1.0 ? acc + term : std::max(acc, term);
    }
    return acc;
}

inline double besov_norm(const SpectralField& f, const BesovSpec& spec, const DyadicFilterBank& bank) {
    spec.validate();
    const auto n = block_norms(f, bank, spec.p);
    return besov_from_blocks(n, bank.j_min(), spec);
}

struct HybridNorms {
    double low = 0.0;
    double high = 0.0;
};

/// Low-frequency norm at (sigma_low, p_low) and high-frequency norm at
/// (sigma_high, p_high), split at j0 + log2(alpha).
inline HybridNorms hybrid_norms(const SpectralField& f, double sigma_low, double p_low, double sigma_high,
                                double p_high, int j0, double alpha, const DyadicFilterBank& bank) {
    const BesovSpec lo{p_low, 1.0, sigma_low, FrequencyRange::low, j0, alpha};
    const BesovSpec hi{p_high, 1.0, sigma_high, FrequencyRange::high, j0, alpha};
    return {besov_norm(f, lo, bank), besov_norm(f, hi, bank)};
}

/// z^{l,alpha} (rings j <= j0 + log2 alpha) or z^{h,alpha} (rings above it).
inline SpectralField frequency_projection(const SpectralField& f, FrequencyRange range, int j0, double alpha,
                                          const DyadicFilterBank& bank) {
    double split = j0 + std::log2(alpha);
    if (std::abs(split - std::round(split)) < 1e-12) split = std::round(split);
    std::vector<double> mult(f.size() / 2 + 1, 0.0);
    for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
        const bool take = range == FrequencyRange::low    ? j <= split
                          : range == FrequencyRange::high ? j > split
                                                          : true;
        if (!take) continue;
        const auto phi = bank.filter(j);
        for (std::size_t k = 0; k < mult.size(); ++k) mult[k] += phi[k];
    }
    return apply_multiplier(f, [&](std::size_t k, double) -> cplx { return mult[k]; });
}

/// Per-ring L^p norms of one field recorded along a trajectory.
class BlockNormHistory {
  public:
    BlockNormHistory() = default;
    BlockNormHistory(int j_min, std::size_t rings, double p) : j_min_(j_min), p_(p), per_block_(rings) {}

    void append(double t, std::span<const double> norms) {
        if (norms.size() != per_block_.size()) throw Error("block count mismatch in history");
        if (!times_.empty() && !(t > times_.back())) throw Error("history times must be strictly increasing");
        times_.push_back(t);
        for (std::size_t i = 0; i < norms.size(); ++i) per_block_[i].push_back(norms[i]);
    }

    /// Copy with every snapshot's norms multiplied by w(t) (a scalar time weight).
    template <class W>
    BlockNormHistory weighted(W&& w) const {
        BlockNormHistory h = *this;
        for (std::size_t k = 0; k < times_.size(); ++k) {
            const double s = w(times_[k]);
            for (auto& b : h.per_block_) b[k] *= s;
        }
        return h;
    }

    int j_min() const { return j_min_; }
    double p() const { return p_; }
    std::size_t rings() const { return per_block_.size(); }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }
    std::span<const double> times() const { return times_; }
    std::span<const double> block(int j) const { return per_block_.at(static_cast<std::size_t>(j - j_min_)); }
    std::vector<double> snapshot(std::size_t k) const {
        std::vector<double> out(per_block_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = per_block_[i][k];
        return out;
    }

  private:
    int j_min_ = 0;
    double p_ = 2.0;
    std::vector<double> times_;
    std::vector<std::vector<double>> per_block_;
};

/// Tilde norm sum_j 2^{j sigma} ||Delta_j z||_{L^m(0,t_k; L^p)} evaluated at
/// every recorded time t_k. m is 1, 2 or infinity; the time integrals use the
/// trapezoid rule on the recorded times.
inline std::vector<double> tilde_norm_series(const BlockNormHistory& h, double m, const BesovSpec& spec) {
    if (h.empty()) throw Error("empty block-norm history");
    if (!(m == 1.0 || m == 2.0 || std::isinf(m))) throw Error("time exponent must be 1, 2 or infinity");
    if (spec.p != h.p()) throw Error("history Lebesgue exponent differs from norm specification");
    const auto t = h.times();
    std::vector<double> out(h.size(), 0.0);
    for (std::size_t i = 0; i < h.rings(); ++i) {
        const int j = h.j_min() + static_cast<int>(i);
        if (!spec.selects(j)) continue;
        const double w = std::exp2(j * spec.sigma);
        const auto b = h.block(j);
        double acc = 0.0;
        for (std::size_t k = 0; k < b.size(); ++k) {
            double val;
            if (std::isinf(m)) {
                acc = std::max(acc, b[k]);
                val = acc;
            } else {
                if (k > 0) {
                    const double dt = t[k] - t[k - 1];
                    acc += m == 1.0 ? 0.5 * dt * (b[k] + b[k - 1]) : 0.5 * dt * (b[k] * b[k] + b[k - 1] * b[k - 1]);
                }
                val = m == 1.0 ? acc : std::sqrt(acc);
            }
            out[k] += w * val;
        }
    }
    return out;
}

inline double tilde_norm(const BlockNormHistory& h, double m, const BesovSpec& spec, const DyadicFilterBank& bank) {
    if (h.j_min() != bank.j_min() || h.rings() != bank.count()) throw Error("history does not match filter bank");
    return tilde_norm_series(h, m, spec).back();
}

/// Classical L^m-in-time norm of the instantaneous Besov norm, on the recorded times.
inline double time_norm_of_besov(const BlockNormHistory& h, double m, const BesovSpec& spec) {
    if (h.empty()) throw Error("empty block-norm history");
    std::vector<double> inst(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) inst[k] = besov_from_blocks(h.snapshot(k), h.j_min(), spec);
    if (std::isinf(m)) return *std::max_element(inst.begin(), inst.end());
    const auto t = h.times();
    double acc = 0.0;
    for (std::size_t k = 1; k < inst.size(); ++k) {
        const double dt = t[k] - t[k - 1];
        acc += m == 1.0 ? 0.5 * dt * (inst[k] + inst[k - 1]) : 0.5 * dt * (inst[k] * inst[k] + inst[k - 1] * inst[k - 1]);
    }
    return m == 1.0 ? acc : std::sqrt(acc);
}

struct BonyDecomposition {
    SpectralField paraproduct_fg;  ///< T_f g = sum_j S_{j-1} f * Delta_j g
    SpectralField paraproduct_gf;  ///< T_g f
    SpectralField remainder;       ///< R(f,g) = sum_{|j-j'|<=1} Delta_j f * Delta_{j'} g
};

/// Paraproducts and remainder of f*g; every pointwise product is dealiased.
/// For mean-zero f, g covered by the bank the three pieces sum to the
/// dealiased product f*g.
inline BonyDecomposition bony_decompose(const SpectralField& f, const SpectralField& g, const DyadicFilterBank& bank) {
    const Grid& grid = bank.grid();
    std::vector<SpectralField> fb, gb;
    for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
        fb.push_back(lp_block(f, j, bank));
        gb.push_back(lp_block(g, j, bank));
    }
    const std::size_t rings = fb.size();
    auto t_fg = SpectralField::zeros(grid);
    auto t_gf = SpectralField::zeros(grid);
    auto rem = SpectralField::zeros(grid);
    auto low_f = SpectralField::zeros(grid);  // S_{j-1} f = sum_{j' <= j-2} Delta_{j'} f
    auto low_g = SpectralField::zeros(grid);
    for (std::size_t i = 0; i < rings; ++i) {
        if (i >= 2) {
            low_f = low_f + fb[i - 2];
            low_g = low_g + gb[i - 2];
        }
        t_fg = t_fg + product(low_f, gb[i]);
        t_gf = t_gf + product(low_g, fb[i]);
        for (std::size_t i2 = (i == 0 ? 0 : i - 1); i2 <= std::min(rings - 1, i + 1); ++i2)
            rem = rem + product(fb[i], gb[i2]);
    }
    return {std::move(t_fg), std::move(t_gf), std::move(rem)};
}

/// Bernstein constant of the bank: max over sampled modes and rings with
/// phi_j(xi) > 0 of |xi| / 2^j. Bounds ||d/dy Delta_j f|| <= C_B 2^j ||Delta_j f||.
inline double bernstein_constant(const DyadicFilterBank& bank) {
    double c = 0.0;
    const Grid& g = bank.grid();
    for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
        const auto phi = bank.filter(j);
        for (std::size_t k = 1; k < phi.size(); ++k)
            if (phi[k] > 0.0) c = std::max(c, std::ldexp(g.wavenumber(k), -j));
    }
    return c;
}

}  // namespace lagns
