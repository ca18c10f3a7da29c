#pragma once

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

namespace lcross {

// Value with first and second derivative at a point, for callers that need
// all three per evaluation (classical forces and stability matrices).
struct PotPoint {
  double v = 0.0, dv = 0.0, d2v = 0.0;
  PotPoint& operator+=(const PotPoint& o) {
    v += o.v;
    dv += o.dv;
    d2v += o.d2v;
    return *this;
  }
};

// One-dimensional potential / coupling building blocks. Every primitive
// exposes value and two analytic derivatives; surfaces are sums of these.
// eval() computes all three sharing the transcendental work.

// v_inf + d*((1 - exp(-a (r - re)))^2 - 1): well depth d at re, limit v_inf.
struct Morse {
  double d, a, re, v_inf = 0.0;
  double value(double r) const {
    const double u = std::exp(-a * (r - re));
    return v_inf + d * ((1.0 - u) * (1.0 - u) - 1.0);
  }
  double deriv(double r) const {
    const double u = std::exp(-a * (r - re));
    return 2.0 * a * d * u * (1.0 - u);
  }
  double second_deriv(double r) const {
    const double u = std::exp(-a * (r - re));
    return 2.0 * a * a * d * u * (2.0 * u - 1.0);
  }
  PotPoint eval(double r) const {
    const double u = std::exp(-a * (r - re));
    return {v_inf + d * ((1.0 - u) * (1.0 - u) - 1.0), 2.0 * a * d * u * (1.0 - u),
            2.0 * a * a * d * u * (2.0 * u - 1.0)};
  }
};

// amp * exp(-beta r) + offset
struct RepulsiveExp {
  double amp, beta, offset = 0.0;
  double value(double r) const { return amp * std::exp(-beta * r) + offset; }
  double deriv(double r) const { return -beta * amp * std::exp(-beta * r); }
  double second_deriv(double r) const { return beta * beta * amp * std::exp(-beta * r); }
  PotPoint eval(double r) const {
    const double u = amp * std::exp(-beta * r);
    return {u + offset, -beta * u, beta * beta * u};
  }
};

// v0 + 0.5 k (r - r0)^2
struct Harmonic {
  double k, r0, v0 = 0.0;
  double value(double r) const { return v0 + 0.5 * k * (r - r0) * (r - r0); }
  double deriv(double r) const { return k * (r - r0); }
  double second_deriv(double) const { return k; }
  PotPoint eval(double r) const { return {value(r), k * (r - r0), k}; }
};

// v0 + slope (r - r0)
struct LinearRamp {
  double slope, r0 = 0.0, v0 = 0.0;
  double value(double r) const { return v0 + slope * (r - r0); }
  double deriv(double) const { return slope; }
  double second_deriv(double) const { return 0.0; }
  PotPoint eval(double r) const { return {value(r), slope, 0.0}; }
};

// v0 + height tanh((r - center)/width): smooth switch between two plateaus.
struct TanhStep {
  double center, width, height, v0 = 0.0;
  double value(double r) const { return v0 + height * std::tanh((r - center) / width); }
  double deriv(double r) const {
    const double t = std::tanh((r - center) / width);
    return height * (1.0 - t * t) / width;
  }
  double second_deriv(double r) const {
    const double t = std::tanh((r - center) / width);
    return -2.0 * height * t * (1.0 - t * t) / (width * width);
  }
  PotPoint eval(double r) const {
    const double t = std::tanh((r - center) / width);
    const double s2 = 1.0 - t * t;
    return {v0 + height * t, height * s2 / width, -2.0 * height * t * s2 / (width * width)};
  }
};

// amp * exp(-(r - center)^2 / (2 sigma^2))
struct GaussianBump {
  double amp, center, sigma;
  double value(double r) const {
    const double z = (r - center) / sigma;
    return amp * std::exp(-0.5 * z * z);
  }
  double deriv(double r) const { return -value(r) * (r - center) / (sigma * sigma); }
  double second_deriv(double r) const {
    const double s2 = sigma * sigma;
    return value(r) * ((r - center) * (r - center) / s2 - 1.0) / s2;
  }
  PotPoint eval(double r) const {
    const double s2 = sigma * sigma;
    const double x = r - center;
    const double g = amp * std::exp(-0.5 * x * x / s2);
    return {g, -g * x / s2, g * (x * x / s2 - 1.0) / s2};
  }
};

struct ConstantCurve {
  double v;
  double value(double) const { return v; }
  double deriv(double) const { return 0.0; }
  double second_deriv(double) const { return 0.0; }
  PotPoint eval(double) const { return {v, 0.0, 0.0}; }
};

// Natural cubic spline through (x, y) samples; linear extrapolation outside.
class TabulatedCurve {
 public:
  TabulatedCurve() = default;
  TabulatedCurve(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      throw std::invalid_argument("TabulatedCurve: need matching x/y with >= 2 points");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1]))
        throw std::invalid_argument("TabulatedCurve: abscissas must increase");
    // Solve the natural-spline tridiagonal system for second derivatives.
    m_.assign(n, 0.0);
    std::vector<double> diag(n, 1.0), rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      diag[i] = 2.0 * (h0 + h1);
      rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1];  // couples rows i-1 and i
      const double w = h0 / diag[i - 1];
      diag[i] -= w * h0;
      rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 1; i-- > 1;) {
      const double h1 = x_[i + 1] - x_[i];
      m_[i] = (rhs[i] - h1 * (i + 2 < n ? m_[i + 1] : 0.0)) / diag[i];
    }
  }

  double value(double r) const {
    const auto [i, t, h] = locate(r);
    if (h == 0.0) return y_[i] + slope_end(i) * t;
    const double a = (x_[i + 1] - r) / h, b = (r - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
  }
  double deriv(double r) const {
    const auto [i, t, h] = locate(r);
    if (h == 0.0) return slope_end(i);
    const double a = (x_[i + 1] - r) / h, b = (r - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h +
           ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0;
  }
  double second_deriv(double r) const {
    const auto [i, t, h] = locate(r);
    if (h == 0.0) return 0.0;
    const double a = (x_[i + 1] - r) / h, b = (r - x_[i]) / h;
    return a * m_[i] + b * m_[i + 1];
  }

  PotPoint eval(double r) const {
    const auto [i, t, h] = locate(r);
    if (h == 0.0) return {y_[i] + slope_end(i) * t, slope_end(i), 0.0};
    const double a = (x_[i + 1] - r) / h, b = (r - x_[i]) / h;
    return {a * y_[i] + b * y_[i + 1] +
                ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0,
            (y_[i + 1] - y_[i]) / h +
                ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0,
            a * m_[i] + b * m_[i + 1]};
  }

  const std::vector<double>& xs() const { return x_; }
  const std::vector<double>& ys() const { return y_; }

 private:
  // Returns (interval index, offset from x_[i], width); width 0 flags the
  // linear extrapolation branches.
  struct Loc {
    std::size_t i;
    double t, h;
  };
  Loc locate(double r) const {
    if (r <= x_.front()) return {0, r - x_.front(), 0.0};
    if (r >= x_.back()) return {x_.size() - 1, r - x_.back(), 0.0};
    std::size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= r ? lo : hi) = mid;
    }
    return {lo, r - x_[lo], x_[lo + 1] - x_[lo]};
  }
  double slope_end(std::size_t i) const {
    // One-sided spline slope at the boundary node, reused for extrapolation.
    if (i == 0) {
      const double h = x_[1] - x_[0];
      return (y_[1] - y_[0]) / h - h * (2.0 * m_[0] + m_[1]) / 6.0;
    }
    const std::size_t n = x_.size();
    const double h = x_[n - 1] - x_[n - 2];
    return (y_[n - 1] - y_[n - 2]) / h + h * (m_[n - 2] + 2.0 * m_[n - 1]) / 6.0;
  }
  std::vector<double> x_, y_;
  std::vector<double> m_;
};

using Curve = std::variant<Morse, RepulsiveExp, Harmonic, LinearRamp, TanhStep, GaussianBump,
                           ConstantCurve, TabulatedCurve>;

inline double curve_value(const Curve& c, double r) {
  return std::visit([r](const auto& p) { return p.value(r); }, c);
}
inline double curve_deriv(const Curve& c, double r) {
  return std::visit([r](const auto& p) { return p.deriv(r); }, c);
}
inline double curve_second_deriv(const Curve& c, double r) {
  return std::visit([r](const auto& p) { return p.second_deriv(r); }, c);
}
inline PotPoint curve_eval(const Curve& c, double r) {
  return std::visit([r](const auto& p) { return p.eval(r); }, c);
}

// A surface (or coupling / dipole function) as a sum of primitives.
struct CurveSum {
  std::vector<Curve> terms;

  CurveSum() = default;
  CurveSum(std::initializer_list<Curve> t) : terms(t) {}
  explicit CurveSum(Curve c) { terms.push_back(std::move(c)); }

  double value(double r) const {
    double s = 0.0;
    for (const auto& c : terms) s += curve_value(c, r);
    return s;
  }
  double deriv(double r) const {
    double s = 0.0;
    for (const auto& c : terms) s += curve_deriv(c, r);
    return s;
  }
  double second_deriv(double r) const {
    double s = 0.0;
    for (const auto& c : terms) s += curve_second_deriv(c, r);
    return s;
  }
  PotPoint eval(double r) const {
    PotPoint acc;
    for (const auto& c : terms) acc += curve_eval(c, r);
    return acc;
  }
  bool empty() const { return terms.empty(); }
};

}  // namespace lcross
