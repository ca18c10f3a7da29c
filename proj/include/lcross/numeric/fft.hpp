#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lcross {

// Iterative radix-2 complex FFT with precomputed twiddles and bit-reversal
// table. Grid sizes in this library are powers of two, which keeps the
// transform self-contained and bit-reproducible across runs.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    if (n < 2 || (n & (n - 1)) != 0)
      throw std::invalid_argument("FftPlan: size must be a power of two >= 2");
    rev_.resize(n);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < log2n; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
      rev_[i] = r;
    }
    // roots_[k] = exp(-2*pi*i*k/n), k < n/2
    roots_.resize(n / 2);
    const double step = -2.0 * pi_ / static_cast<double>(n);
    for (std::size_t k = 0; k < n / 2; ++k)
      roots_[k] = std::polar(1.0, step * static_cast<double>(k));
  }

  std::size_t size() const { return n_; }

  // In-place DFT, no normalization: X_k = sum_j x_j exp(-2*pi*i*j*k/n).
  void forward(std::complex<double>* x) const { transform(x, false); }

  // In-place inverse with 1/n normalization.
  void inverse(std::complex<double>* x) const {
    transform(x, true);
    const double s = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] *= s;
  }

  // Inverse butterflies without the 1/n factor, for callers that fold the
  // normalization into another pointwise multiply.
  void inverse_unscaled(std::complex<double>* x) const { transform(x, true); }

  void forward(std::vector<std::complex<double>>& x) const { check(x); forward(x.data()); }
  void inverse(std::vector<std::complex<double>>& x) const { check(x); inverse(x.data()); }

 private:
  static constexpr double pi_ = 3.14159265358979323846;

  void check(const std::vector<std::complex<double>>& x) const {
    if (x.size() != n_) throw std::invalid_argument("FftPlan: size mismatch");
  }

  void transform(std::complex<double>* x, bool conj_twiddle) const {
    for (std::size_t i = 0; i < n_; ++i)
      if (rev_[i] > i) std::swap(x[i], x[rev_[i]]);
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len >> 1;
      const std::size_t stride = n_ / len;
      for (std::size_t base = 0; base < n_; base += len) {
        for (std::size_t k = 0; k < half; ++k) {
          std::complex<double> w = roots_[k * stride];
          if (conj_twiddle) w = std::conj(w);
          const std::complex<double> u = x[base + k];
          const std::complex<double> v = x[base + k + half] * w;
          x[base + k] = u + v;
          x[base + k + half] = u - v;
        }
      }
    }
  }

  std::size_t n_;
  std::vector<std::size_t> rev_;
  std::vector<std::complex<double>> roots_;
};

}  // namespace lcross
