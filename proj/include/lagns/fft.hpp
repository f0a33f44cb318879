#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

namespace lagns {

using cplx = std::complex<double>;

/// Library-wide error type. Messages carry the failing condition verbatim.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Real <-> half-complex plans for one size. The FFTW planner is not
// thread-safe, so plans are created under a global lock; execution through the
// new-array interface is reentrant.
class FftPlanPair {
  public:
    explicit FftPlanPair(std::size_t n) : n_(n) {
        std::vector<double> re(n);
        std::vector<cplx> hc(n / 2 + 1);
        auto* hcp = reinterpret_cast<fftw_complex*>(hc.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), re.data(), hcp, flags);
        backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), hcp, re.data(), flags);
        if (!forward_ || !backward_) throw Error("fftw planning failed for n=" + std::to_string(n));
    }
    FftPlanPair(const FftPlanPair&) = delete;
    FftPlanPair& operator=(const FftPlanPair&) = delete;
    ~FftPlanPair() {
        std::lock_guard lock(mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    static std::mutex& mutex() {
        static std::mutex m;
        return m;
    }

    std::size_t size() const { return n_; }
    fftw_plan forward() const { return forward_; }
    fftw_plan backward() const { return backward_; }

  private:
    std::size_t n_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

inline const FftPlanPair& plans_for(std::size_t n) {
    static std::map<std::size_t, std::unique_ptr<FftPlanPair>> cache;
    std::lock_guard lock(FftPlanPair::mutex());
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<FftPlanPair>(n)).first;
    return *it->second;
}

}  // namespace detail

/// Forward real transform normalized so that f(y_i) = sum_k c_k e^{2 pi i k i / N}.
/// Output holds the N/2+1 nonnegative-frequency coefficients.
inline std::vector<cplx> rfft(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2 || n % 2 != 0) throw Error("grid size must be even and >= 2");
    const auto& p = detail::plans_for(n);
    std::vector<double> in(samples.begin(), samples.end());
    std::vector<cplx> out(n / 2 + 1);
    fftw_execute_dft_r2c(p.forward(), in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& c : out) c *= scale;
    return out;
}

/// Inverse of rfft. The imaginary parts of the zero and Nyquist coefficients are ignored.
inline std::vector<double> irfft(std::span<const cplx> coeffs, std::size_t n) {
    if (coeffs.size() != n / 2 + 1) throw Error("coefficient count does not match grid size");
    const auto& p = detail::plans_for(n);
    std::vector<cplx> in(coeffs.begin(), coeffs.end());
    std::vector<double> out(n);
    fftw_execute_dft_c2r(p.backward(), reinterpret_cast<fftw_complex*>(in.data()), out.data());
    return out;
}

}  // namespace lagns
