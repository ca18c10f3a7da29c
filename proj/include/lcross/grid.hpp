#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lcross {

// Uniform periodic coordinate grid for the Fourier propagator: points
// r_i = r0 + i dr for i = 0..n-1, the right edge r0 + n dr excluded.
struct Grid {
  double r0 = 0.5;
  double dr = 0.0;
  std::size_t n = 0;

  static Grid from_range(double r_min, double r_max, std::size_t n) {
    if (!(r_max > r_min) || n < 2)
      throw std::invalid_argument("Grid: need r_max > r_min and n >= 2");
    return Grid{r_min, (r_max - r_min) / static_cast<double>(n), n};
  }

  double r(std::size_t i) const { return r0 + dr * static_cast<double>(i); }
  double r_last() const { return r(n - 1); }
  double length() const { return dr * static_cast<double>(n); }

  // Angular wavenumbers in FFT order (non-negative first, then negative).
  std::vector<double> k_values() const {
    std::vector<double> k(n);
    const double dk = 2.0 * M_PI / length();
    for (std::size_t j = 0; j < n; ++j) {
      const double m = (j <= n / 2 - 1) ? static_cast<double>(j)
                                        : static_cast<double>(j) - static_cast<double>(n);
      k[j] = dk * m;
    }
    return k;
  }

  bool same_axis(const Grid& o) const {
    return r0 == o.r0 && dr == o.dr && n == o.n;
  }
};

}  // namespace lcross
