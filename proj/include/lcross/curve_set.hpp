#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lcross/curves.hpp"

namespace lcross {

// Diabatic electronic model for one nuclear coordinate: potentials V_i(R),
// optional static couplings V_ij(R), and dipole functions mu_ij(R) that the
// field multiplies. `photons` holds the integer number of photon quanta each
// surface absorbs in the dressed (rotating-frame) picture; the ground surface
// carries 0.
struct CurveSet {
  double mass = 1.0;
  std::vector<CurveSum> surfaces;
  std::vector<std::string> labels;
  std::map<std::pair<int, int>, CurveSum> couplings;  // keys i < j
  std::map<std::pair<int, int>, CurveSum> dipoles;    // keys i <= j
  std::vector<int> photons;

  int n() const { return static_cast<int>(surfaces.size()); }

  double v(int i, double r) const { return surfaces.at(i).value(r); }
  double dv(int i, double r) const { return surfaces.at(i).deriv(r); }
  double d2v(int i, double r) const { return surfaces.at(i).second_deriv(r); }

  static std::pair<int, int> ordered(int i, int j) {
    return i <= j ? std::pair{i, j} : std::pair{j, i};
  }

  double coupling(int i, int j, double r) const {
    const auto it = couplings.find(ordered(i, j));
    return it == couplings.end() ? 0.0 : it->second.value(r);
  }
  double dipole(int i, int j, double r) const {
    const auto it = dipoles.find(ordered(i, j));
    return it == dipoles.end() ? 0.0 : it->second.value(r);
  }
  bool has_coupling(int i, int j) const { return couplings.count(ordered(i, j)) != 0; }
  bool has_dipole(int i, int j) const { return dipoles.count(ordered(i, j)) != 0; }

  int photon_count(int i) const {
    if (photons.empty()) return 0;
    return photons.at(i);
  }

  void validate() const {
    if (surfaces.empty()) throw std::invalid_argument("CurveSet: no surfaces");
    if (!(mass > 0.0)) throw std::invalid_argument("CurveSet: mass must be positive");
    if (!labels.empty() && labels.size() != surfaces.size())
      throw std::invalid_argument("CurveSet: label count mismatch");
    if (!photons.empty() && photons.size() != surfaces.size())
      throw std::invalid_argument("CurveSet: photon count mismatch");
    for (const auto& [key, c] : couplings) {
      (void)c;
      if (key.first < 0 || key.second >= n() || key.first >= key.second)
        throw std::invalid_argument("CurveSet: bad coupling index pair");
    }
    for (const auto& [key, c] : dipoles) {
      (void)c;
      if (key.first < 0 || key.second >= n() || key.first > key.second)
        throw std::invalid_argument("CurveSet: bad dipole index pair");
    }
  }
};

}  // namespace lcross
