#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "darboux/backlund.hpp"
#include "darboux/elliptic.hpp"
#include "darboux/errors.hpp"
#include "darboux/sampled.hpp"
#include "darboux/spectral.hpp"
#include "darboux/superpotential.hpp"

namespace darboux {

struct FigureOptions {
  std::optional<int> periods_each_side;  // default: enough for the bound states to decay
  int window_periods = 2;                // half-width of the central defect window
  std::size_t points_per_period = 400;
  double decay_target = 1e-7;     // |psi(end)| / max |psi| used to size the domain
  double background_tol = 1e-6;   // end periods must repeat to this accuracy
};

struct FigureResult {
  LameSystem sys;
  TransformedPotential tp;
  std::vector<double> energies;
  std::vector<cplx> deltas;
  std::vector<cplx> gammas;
  std::size_t candidates_tried = 0;
  int periods_each_side = 0;
  double max_imag_spread = 0.0;
};

/// Floquet multiplier |lambda| >= 1 of the Lame background at energy e.
inline double floquet_multiplier(const LameSystem& sys, double e, std::size_t points_per_period = 400) {
  const double t = sys.period();
  const Grid g{0.0, t / static_cast<double>(points_per_period), points_per_period + 1};
  SampledPotential v = sample(lame_function(sys), g);
  v.period = t;
  const double d = std::abs(hill_discriminant(v, e));
  if (d <= 2.0) return 1.0;
  return 0.5 * d + std::sqrt(0.25 * d * d - 1.0);
}

inline Grid figure_grid(const LameSystem& sys, const std::vector<double>& energies, const FigureOptions& opt,
                        int& periods) {
  if (!std::isfinite(sys.inv.omega)) throw DomainError("figure constructions need a periodic background (m < 1)");
  if (opt.periods_each_side) {
    periods = *opt.periods_each_side;
  } else {
    periods = 8;
    for (double e : energies) {
      const double lam = floquet_multiplier(sys, e, opt.points_per_period);
      if (lam > 1.0) {
        periods = std::max(periods, static_cast<int>(std::ceil(std::log(1.0 / opt.decay_target) / std::log(lam))));
      }
    }
  }
  const double t = sys.period();
  const int half = periods + opt.window_periods;
  const std::size_t n = 2 * static_cast<std::size_t>(half) * opt.points_per_period + 1;
  return {-half * t, t / static_cast<double>(opt.points_per_period), n};
}

/// max |V(x + T) - V(x)| over the first and the last period of the grid.
inline double background_mismatch(const SampledPotential& v) {
  const std::size_t p = v.samples_per_period();
  double worst = 0.0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i <= p && i + p < n; ++i) {
    worst = std::max(worst, std::abs(v.values[i + p] - v.values[i]));
    worst = std::max(worst, std::abs(v.values[n - 1 - i] - v.values[n - 1 - i - p]));
  }
  return worst;
}

/// |Gamma| on a half-decade grid over [1e-3, 1e3], ordered by |log10 |Gamma||,
/// negative sign first.
inline std::vector<double> gamma_search_grid() {
  std::vector<double> out{-1.0, 1.0};
  for (int k = 1; k <= 6; ++k) {
    const double up = std::pow(10.0, 0.5 * k);
    for (double mag : {up, 1.0 / up}) {
      out.push_back(-mag);
      out.push_back(mag);
    }
  }
  return out;
}

/// First-order partner built from the general solution at an energy below the
/// lowest band: a periodic background carrying one localized defect.
inline FigureResult fig1_construction(double m, double eps, std::optional<double> gamma, const FigureOptions& opt = {}) {
  FigureResult r;
  r.sys = make_lame(m);
  if (!(eps < r.sys.E0)) throw DomainError("fig1: energy must lie below E0 = " + std::to_string(r.sys.E0));
  if (gamma && *gamma == 0.0) {
    throw ConstructionError("fig1: Gamma = 0 is a pure displacement and inserts no level");
  }
  const Grid g = figure_grid(r.sys, {eps}, opt, r.periods_each_side);
  const cplx delta = delta_for_energy(r.sys, eps);
  SampledPotential base = sample(lame_function(r.sys), g);
  base.period = r.sys.period();
  const std::vector<double> candidates = gamma ? std::vector<double>{*gamma} : gamma_search_grid();
  std::vector<double> last_singular;
  for (double gm : candidates) {
    ++r.candidates_tried;
    const Superpotential s = Superpotential::general(r.sys, delta, gm);
    const SuperpotentialSamples smp = s.sample(g);
    TransformedPotential tp = chain_from_stage1(base, {smp}, {eps}, false);
    if (!tp.singularities.empty() || !smp.guarded.empty()) {
      last_singular = tp.singularities;
      continue;
    }
    tp.final.period = r.sys.period();
    if (background_mismatch(tp.final) > opt.background_tol) continue;
    tp.deltas = {delta};
    tp.gammas = {gm};
    r.tp = std::move(tp);
    r.energies = {eps};
    r.deltas = {delta};
    r.gammas = {gm};
    r.max_imag_spread = smp.imag_spread;
    return r;
  }
  if (gamma) {
    throw SingularTransformationError("fig1: the requested Gamma gives a singular or non-localized partner",
                                      last_singular);
  }
  throw ConstructionError("fig1: no nonsingular Gamma in the search range");
}

/// Second-order partner with two levels inserted in the gap (E1, E1'). Stage-1
/// solutions come from complex displacements i tau + kappa; the mixing
/// parameters are searched until the chain is smooth and localized.
inline FigureResult fig2_construction(double m, double eps1, double eps2,
                                      std::optional<std::pair<double, double>> gammas = std::nullopt,
                                      const FigureOptions& opt = {}) {
  FigureResult r;
  r.sys = make_lame(m);
  const double lo = r.sys.E1, hi = r.sys.E1p;
  for (double e : {eps1, eps2}) {
    if (!(e > lo + 1e-9 && e < hi - 1e-9)) {
      throw DomainError("fig2: energies must lie strictly inside the gap (" + std::to_string(lo) + ", " +
                        std::to_string(hi) + ")");
    }
  }
  if (std::abs(eps1 - eps2) <= 1e-10) throw DegeneratePairError("fig2: energies coincide");
  const Grid g = figure_grid(r.sys, {eps1, eps2}, opt, r.periods_each_side);
  const cplx d1 = delta_for_energy(r.sys, eps1);
  const cplx d2 = delta_for_energy(r.sys, eps2);
  SampledPotential base = sample(lame_function(r.sys), g);
  base.period = r.sys.period();

  const std::vector<double> grid_g = gammas ? std::vector<double>{} : gamma_search_grid();
  const std::vector<double> c1 = gammas ? std::vector<double>{gammas->first} : grid_g;
  const std::vector<double> c2 = gammas ? std::vector<double>{gammas->second} : grid_g;
  // Samples are built on first use; the search usually stops after a few pairs.
  std::vector<std::optional<SuperpotentialSamples>> s1(c1.size()), s2(c2.size());
  auto get = [&](auto& cache, const std::vector<double>& gs, cplx d, std::size_t i) -> const SuperpotentialSamples& {
    if (!cache[i]) cache[i] = Superpotential::general(r.sys, d, gs[i]).sample(g);
    return *cache[i];
  };

  // Visit pairs in order of total distance from |Gamma| = 1.
  struct Pair {
    std::size_t i, j;
    double cost;
  };
  std::vector<Pair> order;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    for (std::size_t j = 0; j < c2.size(); ++j) {
      order.push_back({i, j, std::abs(std::log10(std::abs(c1[i]))) + std::abs(std::log10(std::abs(c2[j])))});
    }
  }
  std::stable_sort(order.begin(), order.end(), [](const Pair& a, const Pair& b) { return a.cost < b.cost; });

  std::vector<double> last_singular;
  for (const auto& p : order) {
    ++r.candidates_tried;
    const SuperpotentialSamples& a = get(s1, c1, d1, p.i);
    const SuperpotentialSamples& b = get(s2, c2, d2, p.j);
    TransformedPotential tp = chain_from_stage1(base, {a, b}, {eps1, eps2}, false);
    if (!tp.singularities.empty()) {
      last_singular = tp.singularities;
      continue;
    }
    tp.final.period = r.sys.period();
    if (background_mismatch(tp.final) > opt.background_tol) continue;
    tp.deltas = {d1, d2};
    tp.gammas = {c1[p.i], c2[p.j]};
    r.tp = std::move(tp);
    r.energies = {eps1, eps2};
    r.deltas = {d1, d2};
    r.gammas = {c1[p.i], c2[p.j]};
    r.max_imag_spread = std::max(a.imag_spread, b.imag_spread);
    return r;
  }
  if (gammas) {
    throw SingularTransformationError("fig2: the requested Gamma pair gives a singular or non-localized chain",
                                      last_singular);
  }
  throw ConstructionError("fig2: no Gamma pair in the search range gives a smooth localized chain");
}

}  // namespace darboux
