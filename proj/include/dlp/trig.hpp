#pragma once

// Trigonometric interpolation of samples on the equispaced periodic grid
// t_j = 2 pi j / N. Coefficients come from one FFT; the Nyquist mode of an
// even-length grid is split evenly between +N/2 and -N/2 so that the
// interpolant of real data stays real for real t.

#include <algorithm>
#include <complex>
#include <span>
#include <vector>

#include <fftw3.h>

#include "dlp/common.hpp"

namespace dlp {

namespace detail {

// out[k] = sum_j in[j] e^{sign * 2 pi i jk/n}
inline std::vector<cplx> fft(std::vector<cplx> in, int sign) {
  const int n = static_cast<int>(in.size());
  std::vector<cplx> out(n);
  auto* src = reinterpret_cast<fftw_complex*>(in.data());
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan =
      fftw_plan_dft_1d(n, src, dst, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return out;
}

}  // namespace detail

class TrigInterpolant {
 public:
  explicit TrigInterpolant(std::span<const double> samples) : n_(static_cast<int>(samples.size())) {
    if (n_ < 2) throw InvalidArgument("TrigInterpolant: need at least two samples");
    std::vector<cplx> in(samples.begin(), samples.end());
    auto f = detail::fft(std::move(in), -1);
    coeffs_.assign(f.size(), cplx(0.0, 0.0));
    for (int j = 0; j < n_; ++j) coeffs_[j] = f[j] / double(n_);
  }

  int size() const { return n_; }

  // Coefficient of e^{ikt}, |k| <= N/2.
  cplx coefficient(int k) const {
    if (2 * std::abs(k) > n_) return {0.0, 0.0};
    if (n_ % 2 == 0 && 2 * std::abs(k) == n_) return 0.5 * coeffs_[n_ / 2];
    return coeffs_[(k % n_ + n_) % n_];
  }

  cplx operator()(cplx t) const {
    cplx sum(0.0, 0.0);
    const int kmax = n_ / 2;
    for (int k = -kmax; k <= kmax; ++k) sum += coefficient(k) * std::exp(cplx(0.0, k) * t);
    return sum;
  }

  double operator()(double t) const { return (*this)(cplx(t, 0.0)).real(); }

  cplx derivative(cplx t) const {
    cplx sum(0.0, 0.0);
    const int kmax = n_ / 2;
    for (int k = -kmax; k <= kmax; ++k) sum += cplx(0.0, k) * coefficient(k) * std::exp(cplx(0.0, k) * t);
    return sum;
  }

  // Interpolant sampled on the M-point equispaced grid (M >= N) by zero padding.
  std::vector<double> resample(int m) const {
    if (m < n_) throw InvalidArgument("TrigInterpolant::resample: target grid must not be coarser");
    std::vector<cplx> spec(m, cplx(0.0, 0.0));
    const int kmax = n_ / 2;
    for (int k = -kmax; k <= kmax; ++k) spec[(k % m + m) % m] += coefficient(k);
    const auto vals = detail::fft(std::move(spec), +1);
    std::vector<double> out(m);
    std::transform(vals.begin(), vals.end(), out.begin(), [](cplx v) { return v.real(); });
    return out;
  }

 private:
  int n_;
  std::vector<cplx> coeffs_;
};

}  // namespace dlp
