#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <variant>
#include <vector>

#include "lcross/cost.hpp"
#include "lcross/laser.hpp"
#include "lcross/numeric/parallel.hpp"
#include "lcross/numeric/rng.hpp"
#include "lcross/oct.hpp"

namespace lcross {

// Derivative-free field search over low-dimensional pulse parametrizations.
// Fitness is the same functional the gradient scheme maximizes,
// J = fidelity - alpha * fluence, with one forward propagation per evaluation.
// Useful where the costate bracket is expensive or the landscape is rough.

// Sum of k Gaussian subpulses, optionally under a fixed carrier:
//   eps(t) = [sum_i A_i exp(-(t - c_i)^2 / (2 w_i^2))] * (carrier ? sin(carrier t) : 1)
// Genes per subpulse: amplitude A in (-a_max, a_max), center c in (0, T),
// width w in (w_min, w_max). 3k genes total.
struct GaussianGenes {
  int k = 6;
  double a_max = 0.01;
  double w_min = 20.0;
  double w_max = 2000.0;
  double carrier = 0.0;
};

// k envelope knots, equally spaced over [0, T], interpolated with a
// Catmull-Rom spline (clamped ends), optionally under a fixed carrier.
struct SplineGenes {
  int k = 12;
  double a_max = 0.01;
  double carrier = 0.0;
};

using FieldGenes = std::variant<GaussianGenes, SplineGenes>;

struct GaParams {
  int population = 40;
  int generations = 50;
  int tournament = 3;   // selection pressure
  int elites = 2;       // copied unchanged into the next generation
  double mutation = 0.1;  // Gaussian sigma as a fraction of each gene's range
  std::uint64_t seed = 1;
  unsigned workers = 0;  // fitness evaluation threads; 0 asks the hardware
};

struct GaResult {
  std::vector<double> best_genes;
  TabulatedField best_field;
  double best_fitness = 0.0;
  std::vector<double> gen_best;   // per generation, including the initial one
  std::vector<double> gen_mean;
  std::int64_t pair_evals = 0;
  std::int64_t evals = 0;  // fitness evaluations performed
};

namespace detail {

struct GeneBounds {
  std::vector<double> lo, hi;
};

inline GeneBounds gene_bounds(const FieldGenes& spec, double horizon) {
  GeneBounds b;
  if (const auto* g = std::get_if<GaussianGenes>(&spec)) {
    if (g->k < 1) throw std::invalid_argument("GaussianGenes: k >= 1");
    if (!(g->a_max > 0.0) || !(g->w_min > 0.0) || !(g->w_max > g->w_min))
      throw std::invalid_argument("GaussianGenes: bad bounds");
    for (int i = 0; i < g->k; ++i) {
      b.lo.push_back(-g->a_max);
      b.hi.push_back(g->a_max);
      b.lo.push_back(0.0);
      b.hi.push_back(horizon);
      b.lo.push_back(g->w_min);
      b.hi.push_back(g->w_max);
    }
  } else {
    const auto& s = std::get<SplineGenes>(spec);
    if (s.k < 2) throw std::invalid_argument("SplineGenes: k >= 2");
    if (!(s.a_max > 0.0)) throw std::invalid_argument("SplineGenes: bad bounds");
    for (int i = 0; i < s.k; ++i) {
      b.lo.push_back(-s.a_max);
      b.hi.push_back(s.a_max);
    }
  }
  return b;
}

// Catmull-Rom through equally spaced knots; end slopes from duplicated
// boundary knots.
inline double spline_envelope(const std::vector<double>& knots, double horizon,
                              double t) {
  const auto n = knots.size();
  const double u = std::clamp(t / horizon, 0.0, 1.0) * static_cast<double>(n - 1);
  const auto seg = std::min<std::size_t>(static_cast<std::size_t>(u), n - 2);
  const double x = u - static_cast<double>(seg);
  const double p0 = knots[seg == 0 ? 0 : seg - 1];
  const double p1 = knots[seg];
  const double p2 = knots[seg + 1];
  const double p3 = knots[seg + 2 < n ? seg + 2 : n - 1];
  const double a = 2.0 * p1;
  const double bb = p2 - p0;
  const double c = 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3;
  const double d = -p0 + 3.0 * p1 - 3.0 * p2 + p3;
  return 0.5 * (a + bb * x + c * x * x + d * x * x * x);
}

inline double genes_value(const FieldGenes& spec, const std::vector<double>& genes,
                          double horizon, double t) {
  double env = 0.0;
  double carrier = 0.0;
  if (const auto* g = std::get_if<GaussianGenes>(&spec)) {
    carrier = g->carrier;
    for (int i = 0; i < g->k; ++i) {
      const double amp = genes[3 * i];
      const double cen = genes[3 * i + 1];
      const double wid = genes[3 * i + 2];
      const double z = (t - cen) / wid;
      env += amp * std::exp(-0.5 * z * z);
    }
  } else {
    carrier = std::get<SplineGenes>(spec).carrier;
    env = spline_envelope(genes, horizon, t);
  }
  return carrier != 0.0 ? env * std::sin(carrier * t) : env;
}

}  // namespace detail

// Field tabulated on the canonical control nodes for a gene vector.
inline TabulatedField genes_to_field(const ControlProblem& prob, const FieldGenes& spec,
                                     const std::vector<double>& genes) {
  TabulatedField f = control_field_nodes(prob);
  for (std::size_t k = 0; k < f.t.size(); ++k)
    f.eps[k] = detail::genes_value(spec, genes, prob.horizon, f.t[k]);
  return f;
}

inline GaResult ga_optimize(const ControlProblem& prob, const OctBackend& backend,
                            const FieldGenes& spec, const GaParams& par) {
  prob.validate();
  if (par.population < 2) throw std::invalid_argument("ga_optimize: population >= 2");
  if (par.generations < 1) throw std::invalid_argument("ga_optimize: generations >= 1");
  if (par.tournament < 1 || par.elites < 0 || par.elites >= par.population)
    throw std::invalid_argument("ga_optimize: bad selection parameters");
  if (!(par.mutation >= 0.0)) throw std::invalid_argument("ga_optimize: mutation >= 0");

  const detail::GeneBounds bounds = detail::gene_bounds(spec, prob.horizon);
  const std::size_t n_genes = bounds.lo.size();
  const auto pop_n = static_cast<std::size_t>(par.population);
  const std::int64_t pairs_before = CostCounters::global().pair_evals;

  // shared propagation schedule for every fitness call
  const TabulatedField nodes = control_field_nodes(prob);
  const double h = nodes.t[1] - nodes.t[0];
  const std::size_t n_sub = detail::control_substeps(prob, h);
  const double dt = h / static_cast<double>(n_sub);
  const std::size_t n_steps = (nodes.t.size() - 1) * n_sub;

  Rng rng(par.seed);
  std::vector<std::vector<double>> pop(pop_n, std::vector<double>(n_genes));
  for (auto& ind : pop)
    for (std::size_t g = 0; g < n_genes; ++g)
      ind[g] = rng.uniform(bounds.lo[g], bounds.hi[g]);

  GaResult res;
  std::vector<double> fit(pop_n, 0.0);
  auto evaluate = [&](const std::vector<std::vector<double>>& inds) {
    parallel_for(
        inds.size(),
        [&](std::size_t i) {
          const TabulatedField f = genes_to_field(prob, spec, inds[i]);
          const auto fn = [&f](double t) { return f.lerp(t); };
          const double fid = backend.forward_fidelity(fn, dt, n_steps);
          fit[i] = fid - prob.alpha * field_fluence(f);
        },
        par.workers, 1);
    res.evals += static_cast<std::int64_t>(inds.size());
  };

  // rank by fitness, ties broken by index so ordering is reproducible
  std::vector<std::size_t> order(pop_n);
  auto rank = [&]() {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });
  };
  auto record = [&]() {
    res.gen_best.push_back(fit[order[0]]);
    res.gen_mean.push_back(std::accumulate(fit.begin(), fit.end(), 0.0) /
                           static_cast<double>(pop_n));
  };

  evaluate(pop);
  rank();
  record();

  for (int gen = 0; gen < par.generations; ++gen) {
    std::vector<std::vector<double>> next;
    next.reserve(pop_n);
    for (int e = 0; e < par.elites; ++e) next.push_back(pop[order[e]]);

    auto pick = [&]() -> const std::vector<double>& {
      std::size_t best = rng.index(pop_n);
      for (int c = 1; c < par.tournament; ++c) {
        const std::size_t cand = rng.index(pop_n);
        if (fit[cand] > fit[best]) best = cand;
      }
      return pop[best];
    };

    while (next.size() < pop_n) {
      const auto& pa = pick();
      const auto& pb = pick();
      std::vector<double> child(n_genes);
      for (std::size_t g = 0; g < n_genes; ++g)
        child[g] = rng.uniform() < 0.5 ? pa[g] : pb[g];
      for (std::size_t g = 0; g < n_genes; ++g) {
        const double range = bounds.hi[g] - bounds.lo[g];
        child[g] = std::clamp(child[g] + rng.normal(0.0, par.mutation * range),
                              bounds.lo[g], bounds.hi[g]);
      }
      next.push_back(std::move(child));
    }

    pop = std::move(next);
    evaluate(pop);
    rank();
    record();
  }

  res.best_genes = pop[order[0]];
  res.best_fitness = fit[order[0]];
  res.best_field = genes_to_field(prob, spec, res.best_genes);
  res.pair_evals = CostCounters::global().pair_evals - pairs_before;
  return res;
}

}  // namespace lcross
