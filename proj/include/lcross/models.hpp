#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcross/constants.hpp"
#include "lcross/curve_set.hpp"

namespace lcross {

struct ParamSpec {
  std::string name;
  double def;
  double min, max;
  std::string doc;
};

using ParamMap = std::map<std::string, double>;

struct ModelFamily {
  std::string name;
  std::string doc;
  int n_surfaces;
  std::vector<ParamSpec> params;
  std::function<CurveSet(const ParamMap&)> build;
};

namespace detail {

inline ParamMap resolve_params(const ModelFamily& fam, const ParamMap& overrides) {
  ParamMap p;
  for (const auto& spec : fam.params) p[spec.name] = spec.def;
  for (const auto& [key, val] : overrides) {
    const auto it = p.find(key);
    if (it == p.end()) {
      std::ostringstream os;
      os << "model '" << fam.name << "' has no parameter '" << key << "'";
      throw std::invalid_argument(os.str());
    }
    it->second = val;
  }
  for (const auto& spec : fam.params) {
    const double v = p[spec.name];
    if (v < spec.min || v > spec.max) {
      std::ostringstream os;
      os << "model '" << fam.name << "': parameter '" << spec.name << "' = " << v
         << " outside [" << spec.min << ", " << spec.max << "]";
      throw std::invalid_argument(os.str());
    }
  }
  return p;
}

}  // namespace detail

// The model catalogue. Numeric defaults are in atomic units throughout.
inline const std::vector<ModelFamily>& model_families() {
  static const std::vector<ModelFamily> families = [] {
    std::vector<ModelFamily> fams;

    fams.push_back(ModelFamily{
        "harmonic",
        "single harmonic well (propagator and sampling checks)",
        1,
        {
            {"mass", 1000.0, 1.0, 1e6, "reduced mass"},
            {"omega", 0.01, 1e-6, 10.0, "angular frequency"},
            {"r0", 2.0, -100.0, 100.0, "equilibrium position"},
            {"v0", 0.0, -10.0, 10.0, "well floor"},
        },
        [](const ParamMap& p) {
          CurveSet cs;
          cs.mass = p.at("mass");
          const double k = cs.mass * p.at("omega") * p.at("omega");
          cs.surfaces = {CurveSum{Harmonic{k, p.at("r0"), p.at("v0")}}};
          cs.labels = {"well"};
          cs.photons = {0};
          return cs;
        }});

    fams.push_back(ModelFamily{
        "morse",
        "single Morse oscillator",
        1,
        {
            {"mass", 918.0, 1.0, 1e6, "reduced mass"},
            {"d", 0.1026, 1e-6, 10.0, "well depth"},
            {"a", 0.72, 1e-3, 100.0, "range parameter"},
            {"re", 2.0, 0.01, 100.0, "equilibrium distance"},
            {"v_inf", 0.0, -10.0, 10.0, "dissociation limit"},
        },
        [](const ParamMap& p) {
          CurveSet cs;
          cs.mass = p.at("mass");
          cs.surfaces = {CurveSum{Morse{p.at("d"), p.at("a"), p.at("re"), p.at("v_inf")}}};
          cs.labels = {"g"};
          cs.photons = {0};
          return cs;
        }});

    fams.push_back(ModelFamily{
        "hd_plus_like",
        "one-surface heteronuclear ion: Morse ground state with a permanent "
        "dipole growing linearly in R (control target system)",
        1,
        {
            {"mass", 1224.0, 1.0, 1e6, "reduced mass"},
            {"d", 0.1026, 1e-6, 10.0, "well depth"},
            {"a", 0.72, 1e-3, 100.0, "range parameter"},
            {"re", 2.0, 0.01, 100.0, "equilibrium distance"},
            {"mu_slope", 1.0 / 3.0, -100.0, 100.0, "permanent dipole slope dmu/dR"},
        },
        [](const ParamMap& p) {
          CurveSet cs;
          cs.mass = p.at("mass");
          cs.surfaces = {CurveSum{Morse{p.at("d"), p.at("a"), p.at("re"), 0.0}}};
          cs.labels = {"g"};
          cs.photons = {0};
          cs.dipoles[{0, 0}] = CurveSum{LinearRamp{p.at("mu_slope"), 0.0, 0.0}};
          return cs;
        }});

    fams.push_back(ModelFamily{
        "h2p_like",
        "homonuclear-ion pair: bound Morse ground state and a repulsive "
        "excited state, radiatively coupled through a localized transition "
        "dipole (photodissociation / branching system)",
        2,
        {
            {"mass", 918.0, 1.0, 1e6, "reduced mass"},
            {"d", 0.1026, 1e-6, 10.0, "ground well depth"},
            {"a", 0.72, 1e-3, 100.0, "ground range parameter"},
            {"re", 2.0, 0.01, 100.0, "ground equilibrium distance"},
            {"exc_amp", 0.91615, 1e-6, 1e3, "excited prefactor"},
            {"exc_beta", 0.75, 1e-3, 100.0, "excited decay rate"},
            {"mu0", 1.0, 0.0, 100.0, "transition dipole peak"},
            {"mu_center", 4.0, 0.01, 100.0, "transition dipole center"},
            {"mu_sigma", 1.0, 0.01, 100.0, "transition dipole width"},
        },
        [](const ParamMap& p) {
          CurveSet cs;
          cs.mass = p.at("mass");
          cs.surfaces = {CurveSum{Morse{p.at("d"), p.at("a"), p.at("re"), 0.0}},
                         CurveSum{RepulsiveExp{p.at("exc_amp"), p.at("exc_beta"), 0.0}}};
          cs.labels = {"g", "e"};
          cs.photons = {0, 1};
          cs.dipoles[{0, 1}] =
              CurveSum{GaussianBump{p.at("mu0"), p.at("mu_center"), p.at("mu_sigma")}};
          return cs;
        }});

    fams.push_back(ModelFamily{
        "hi_like",
        "bound ground state with three repulsive excited channels, two "
        "sharing the lower dissociation limit and one ending on an excited "
        "fragment; constant transition dipoles (selective predissociation "
        "system)",
        4,
        {
            {"mass", 1808.0, 1.0, 1e6, "reduced mass"},
            {"d", 0.1176, 1e-6, 10.0, "ground well depth"},
            {"a", 0.92, 1e-3, 100.0, "ground range parameter"},
            {"re", 3.04, 0.01, 100.0, "ground equilibrium distance"},
            {"amp2", 3.259, 1e-6, 1e6, "channel-2 prefactor"},
            {"beta2", 1.2, 1e-3, 100.0, "channel-2 decay rate"},
            {"amp3", 0.2221, 1e-6, 1e6, "channel-3 prefactor"},
            {"beta3", 1.1, 1e-3, 100.0, "channel-3 decay rate"},
            {"off3", 0.03465, -1.0, 1.0, "channel-3 asymptote (excited fragment)"},
            {"amp4", 6.111, 1e-6, 1e6, "channel-4 prefactor"},
            {"beta4", 1.3, 1e-3, 100.0, "channel-4 decay rate"},
            {"mu2", 1.0, 0.0, 100.0, "dipole to channel 2"},
            {"mu3", 1.0, 0.0, 100.0, "dipole to channel 3"},
            {"mu4", 1.0, 0.0, 100.0, "dipole to channel 4"},
        },
        [](const ParamMap& p) {
          CurveSet cs;
          cs.mass = p.at("mass");
          cs.surfaces = {CurveSum{Morse{p.at("d"), p.at("a"), p.at("re"), 0.0}},
                         CurveSum{RepulsiveExp{p.at("amp2"), p.at("beta2"), 0.0}},
                         CurveSum{RepulsiveExp{p.at("amp3"), p.at("beta3"), p.at("off3")}},
                         CurveSum{RepulsiveExp{p.at("amp4"), p.at("beta4"), 0.0}}};
          cs.labels = {"g", "ch2", "ch3", "ch4"};
          cs.photons = {0, 1, 1, 1};
          cs.dipoles[{0, 1}] = CurveSum{ConstantCurve{p.at("mu2")}};
          cs.dipoles[{0, 2}] = CurveSum{ConstantCurve{p.at("mu3")}};
          cs.dipoles[{0, 3}] = CurveSum{ConstantCurve{p.at("mu4")}};
          return cs;
        }});

    fams.push_back(ModelFamily{
        "nt_pair",
        "two tanh diabats crossing with opposite slopes plus a localized "
        "coupling: the crossing supports an upper-well resonance ladder "
        "(complete-reflection system)",
        2,
        {
            {"mass", 918.0, 1.0, 1e6, "reduced mass"},
            {"ec", 0.0, -10.0, 10.0, "crossing energy"},
            {"rc", 8.0, 0.01, 100.0, "crossing position"},
            {"h1", 0.03, 1e-6, 10.0, "surface-a step height (falls with R)"},
            {"w1", 1.0, 0.01, 100.0, "surface-a step width"},
            {"h2", 0.03, 1e-6, 10.0, "surface-b step height (rises with R)"},
            {"w2", 1.0, 0.01, 100.0, "surface-b step width"},
            {"vc", 0.005, 0.0, 1.0, "coupling peak value"},
            {"wc", 1.0, 0.01, 100.0, "coupling gaussian width"},
        },
        [](const ParamMap& p) {
          CurveSet cs;
          cs.mass = p.at("mass");
          cs.surfaces = {
              CurveSum{TanhStep{p.at("rc"), p.at("w1"), -p.at("h1"), p.at("ec")}},
              CurveSum{TanhStep{p.at("rc"), p.at("w2"), p.at("h2"), p.at("ec")}}};
          cs.labels = {"a", "b"};
          cs.photons = {0, 0};
          cs.couplings[{0, 1}] =
              CurveSum{GaussianBump{p.at("vc"), p.at("rc"), p.at("wc")}};
          return cs;
        }});

    fams.push_back(ModelFamily{
        "lz_pair",
        "two same-sign-slope diabats crossing once with a broad localized "
        "coupling (single-passage transition-probability system)",
        2,
        {
            {"mass", 918.0, 1.0, 1e6, "reduced mass"},
            {"ec", 0.0, -10.0, 10.0, "crossing energy"},
            {"rc", 14.0, 0.01, 100.0, "crossing position"},
            {"f1", 0.002, 1e-6, 10.0, "surface-a slope at the crossing"},
            {"f2", 0.022, 1e-6, 10.0, "surface-b slope at the crossing"},
            {"w", 4.0, 0.01, 100.0, "tanh flattening width"},
            {"vc", 0.005, 0.0, 1.0, "coupling peak value"},
            {"wc", 6.0, 0.01, 100.0, "coupling gaussian width"},
        },
        [](const ParamMap& p) {
          CurveSet cs;
          cs.mass = p.at("mass");
          const double w = p.at("w");
          cs.surfaces = {
              CurveSum{TanhStep{p.at("rc"), w, p.at("f1") * w, p.at("ec")}},
              CurveSum{TanhStep{p.at("rc"), w, p.at("f2") * w, p.at("ec")}}};
          cs.labels = {"a", "b"};
          cs.photons = {0, 0};
          cs.couplings[{0, 1}] =
              CurveSum{GaussianBump{p.at("vc"), p.at("rc"), p.at("wc")}};
          return cs;
        }});

    return fams;
  }();
  return families;
}

inline const ModelFamily& find_model(const std::string& name) {
  for (const auto& fam : model_families())
    if (fam.name == name) return fam;
  throw std::invalid_argument("unknown model '" + name + "'");
}

inline CurveSet build_model(const std::string& name, const ParamMap& overrides = {}) {
  const ModelFamily& fam = find_model(name);
  const ParamMap p = detail::resolve_params(fam, overrides);
  CurveSet cs = fam.build(p);
  cs.validate();
  return cs;
}

}  // namespace lcross
