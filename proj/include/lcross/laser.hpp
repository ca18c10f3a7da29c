#pragma once

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

namespace lcross {

struct ZeroField {};

// e0 cos(omega t + phase)
struct CwField {
  double e0, omega, phase = 0.0;
};

// Gaussian envelope, full width at half maximum in the INTENSITY sense applied
// to the amplitude: env(t) = e0 exp(-4 ln2 (t - t_center)^2 / fwhm^2).
struct GaussianPulse {
  double e0, omega, t_center, fwhm, phase = 0.0;
  double envelope(double t) const {
    const double z = (t - t_center) / fwhm;
    return e0 * std::exp(-4.0 * M_LN2 * z * z);
  }
};

// Piecewise-linear samples of the field (or of an envelope, when driving the
// rotating-frame propagator). Nodes round-trip exactly through the two-column
// file format.
struct TabulatedField {
  std::vector<double> t, eps;
  double carrier_omega = 0.0;  // optional, for rotating-frame use

  double lerp(double time) const {
    if (t.size() < 2 || t.size() != eps.size())
      throw std::invalid_argument("TabulatedField: need >= 2 matching samples");
    if (time <= t.front()) return eps.front();
    if (time >= t.back()) return eps.back();
    std::size_t lo = 0, hi = t.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (t[mid] <= time ? lo : hi) = mid;
    }
    const double f = (time - t[lo]) / (t[lo + 1] - t[lo]);
    return eps[lo] + f * (eps[lo + 1] - eps[lo]);
  }
};

using Field = std::variant<ZeroField, CwField, GaussianPulse, TabulatedField>;

// Instantaneous field strength (what an explicitly time-dependent Hamiltonian
// multiplies against the dipole).
inline double field_value(const Field& f, double t) {
  return std::visit(
      [t](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ZeroField>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, CwField>) {
          return v.e0 * std::cos(v.omega * t + v.phase);
        } else if constexpr (std::is_same_v<T, GaussianPulse>) {
          return v.envelope(t) * std::cos(v.omega * (t - v.t_center) + v.phase);
        } else {
          return v.lerp(t);
        }
      },
      f);
}

// Slowly varying amplitude for the rotating-frame picture. For tabulated
// fields the samples themselves are taken as the envelope.
inline double field_envelope(const Field& f, double t) {
  return std::visit(
      [t](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ZeroField>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, CwField>) {
          return v.e0;
        } else if constexpr (std::is_same_v<T, GaussianPulse>) {
          return v.envelope(t);
        } else {
          return v.lerp(t);
        }
      },
      f);
}

inline double field_carrier(const Field& f) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CwField>) return v.omega;
        else if constexpr (std::is_same_v<T, GaussianPulse>) return v.omega;
        else if constexpr (std::is_same_v<T, TabulatedField>) return v.carrier_omega;
        else return 0.0;
      },
      f);
}

}  // namespace lcross
