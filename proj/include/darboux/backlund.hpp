#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "darboux/elliptic.hpp"
#include "darboux/errors.hpp"
#include "darboux/residuals.hpp"
#include "darboux/sampled.hpp"
#include "darboux/superpotential.hpp"

namespace darboux {

/// Displacement realizing a factorization energy outside the bands:
/// epsilon < E0 gives a real delta in (0, omega], epsilon in (E1, E1') gives
/// delta = i tau + kappa with kappa in (0, omega) and V(kappa) = -2 epsilon.
inline cplx delta_for_energy(const LameSystem& sys, double eps) {
  const double target = -2.0 * eps;
  const Weierstrass w(sys.inv);
  const bool finite_w = std::isfinite(sys.inv.omega);
  auto bisect = [](auto f, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if ((fm > 0) == (flo > 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  if (finite_w && std::abs(eps - sys.E0) < 1e-14) return sys.inv.omega;
  if (eps < sys.E0) {
    // p decreases from +inf at 0 to e1 at omega along the real axis.
    const double hi = finite_w ? sys.inv.omega : 60.0;
    const double lo = 1e-5;
    auto f = [&](double d) { return w.p(d).real() - target; };
    if (f(lo) < 0) throw NotFoundError("delta_for_energy: energy too far below the band");
    if (f(hi) > 0) throw NotFoundError("delta_for_energy: no real displacement for this energy");
    return bisect(f, lo, hi);
  }
  if (eps > sys.E1 && eps < sys.E1p) {
    // V(kappa) increases from e3 at 0 to e2 at omega.
    const double hi = finite_w ? sys.inv.omega : 60.0;
    auto f = [&](double k) { return lame_potential(k, sys) - target; };
    if (f(0.0) > 0 || f(hi) < 0) throw NotFoundError("delta_for_energy: kappa root not bracketed");
    return {bisect(f, 0.0, hi), sys.inv.tau};
  }
  throw DomainError("delta_for_energy: energy " + std::to_string(eps) + " lies in an allowed band or on an edge");
}

struct BacklundStep {
  SuperpotentialSamples alpha;  // alpha_2(x; eps1, eps2)
  SuperpotentialSamples beta;   // alpha_1(x; eps1) + alpha_2, smooth where W has no zero
  std::vector<double> singularities;
};

/// alpha_2 = -alpha_1(e1) - 2 (e1 - e2) / (alpha_1(e1) - alpha_1(e2)), with its
/// analytic derivative. Points where the denominator drops below `guard` are
/// excluded; poles of the result are reported in `singularities`.
inline BacklundStep backlund_step(const SuperpotentialSamples& a1, const SuperpotentialSamples& a2, double eps1,
                                  double eps2, double guard = 1e-10) {
  if (!a1.grid.aligned_with(a2.grid)) throw ShapeError("backlund_step: grid mismatch");
  if (std::abs(eps1 - eps2) <= 1e-10) throw DegeneratePairError("backlund_step: coincident energies");
  const std::size_t n = a1.grid.n;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  BacklundStep out;
  out.alpha = {a1.grid, std::vector<double>(n), std::vector<double>(n), {}, 0.0};
  out.beta = out.alpha;
  const double c = 2.0 * (eps2 - eps1);
  for (std::size_t i = 0; i < n; ++i) {
    const double den = a1.value[i] - a2.value[i];
    if (!std::isfinite(den) || std::abs(den) < guard) {
      out.alpha.value[i] = out.alpha.derivative[i] = nan;
      out.beta.value[i] = out.beta.derivative[i] = nan;
      out.alpha.guarded.push_back(i);
      out.beta.guarded.push_back(i);
      continue;
    }
    const double b = c / den;
    const double db = -c * (a1.derivative[i] - a2.derivative[i]) / (den * den);
    out.beta.value[i] = b;
    out.beta.derivative[i] = db;
    out.alpha.value[i] = b - a1.value[i];
    out.alpha.derivative[i] = db - a1.derivative[i];
  }
  // A zero of alpha_1(e1) - alpha_1(e2) between finite samples is a pole of beta.
  out.singularities = pole_abscissae(a1.grid, out.beta.value);
  for (std::size_t i : out.beta.guarded) {
    if (std::isfinite(a1.value[i]) && std::isfinite(a2.value[i])) out.singularities.push_back(a1.grid.x(i));
  }
  std::sort(out.singularities.begin(), out.singularities.end());
  return out;
}

struct StageSource {
  enum class Kind { zeta, general, complex_delta };
  Kind kind = Kind::zeta;
  cplx gamma{};
};

struct ChainStage {
  double epsilon = 0.0;
  StageSource source;
};

struct ChainSpec {
  LameSystem sys;
  std::vector<ChainStage> stages;
  Grid grid;
};

struct TransformedPotential {
  SampledPotential base;
  std::vector<SampledPotential> stages;  // V_k = V + sum_{j<=k} alpha_j', accumulated stage by stage
  SampledPotential final;                // V_n from the telescoped sum of the chain
  std::vector<std::vector<double>> stage_singularities;
  std::vector<double> singularities;  // poles of the final potential
  std::vector<double> stage_residuals;  // Riccati residual of alpha_k against V_{k-1}, k >= 2
  std::vector<double> energies;
  std::vector<cplx> deltas;
  std::vector<cplx> gammas;
};

/// First-stage superpotential for one chain stage.
inline Superpotential stage_superpotential(const LameSystem& sys, const ChainStage& st) {
  const cplx d = delta_for_energy(sys, st.epsilon);
  if (st.source.kind == StageSource::Kind::complex_delta && d.imag() == 0.0) {
    throw DomainError("complex displacement requested for an energy below the lowest band");
  }
  if (st.source.kind == StageSource::Kind::zeta) return Superpotential::zeta_form(sys, d);
  return Superpotential::general(sys, d, st.source.gamma);
}

namespace detail {

inline std::vector<std::size_t> near_poles(const Grid& g, const std::vector<double>& poles, std::size_t pad) {
  std::vector<std::size_t> idx;
  for (double p : poles) {
    const double f = (p - g.x0) / g.dx;
    const long long c = static_cast<long long>(std::llround(f));
    for (long long k = c - static_cast<long long>(pad); k <= c + static_cast<long long>(pad); ++k) {
      if (k >= 0 && static_cast<std::size_t>(k) < g.n) idx.push_back(static_cast<std::size_t>(k));
    }
  }
  return idx;
}

}  // namespace detail

/// Runs the chain on precomputed first-stage samples (one per energy).
inline TransformedPotential chain_from_stage1(const SampledPotential& base, std::vector<SuperpotentialSamples> level,
                                              const std::vector<double>& eps, bool require_smooth = true) {
  const std::size_t n = eps.size();
  if (n == 0 || level.size() != n) throw DomainError("chain: need one first-stage solution per energy");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(eps[i] - eps[j]) <= 1e-10) throw DegeneratePairError("chain: stage energies coincide");
    }
  }
  const Grid g = base.grid();
  TransformedPotential tp;
  tp.base = base;
  tp.energies = eps;

  // telescoped accumulates beta_1 + beta_3 + ... (+ alpha_n for odd n)
  std::vector<double> tel(g.n, 0.0), dtel(g.n, 0.0);
  SampledPotential cur = base;
  std::vector<std::size_t> excluded;

  for (std::size_t k = 0; k < n; ++k) {
    // level[j] holds alpha_{k+1}(eps_j) for j >= k.
    const SuperpotentialSamples& ak = level[k];
    std::vector<double> poles = pole_abscissae(g, ak.value);
    for (std::size_t i : ak.guarded) poles.push_back(g.x(i));
    std::sort(poles.begin(), poles.end());
    tp.stage_singularities.push_back(poles);

    if (k > 0) {
      const RiccatiResidual r = [&] {
        SuperpotentialSamples masked = ak;
        for (std::size_t i : excluded) masked.value[i] = std::numeric_limits<double>::quiet_NaN();
        return riccati_residual(masked, cur, eps[k]);
      }();
      tp.stage_residuals.push_back(r.max);
    }
    const auto ex = detail::near_poles(g, poles, 5);
    excluded.insert(excluded.end(), ex.begin(), ex.end());

    SampledPotential next = cur;
    next.label = "stage " + std::to_string(k + 1);
    for (std::size_t i = 0; i < g.n; ++i) next.values[i] += ak.derivative[i];
    tp.stages.push_back(next);
    cur = std::move(next);

    std::vector<SuperpotentialSamples> up(n);
    std::optional<BacklundStep> pair;
    for (std::size_t j = k + 1; j < n; ++j) {
      BacklundStep st = backlund_step(ak, level[j], eps[k], eps[j]);
      if (j == k + 1) pair = st;
      up[j] = std::move(st.alpha);
    }
    if (k % 2 == 0) {
      const bool last = k + 1 == n;
      const SuperpotentialSamples& add = last ? ak : pair->beta;
      for (std::size_t i = 0; i < g.n; ++i) {
        tel[i] += add.value[i];
        dtel[i] += add.derivative[i];
      }
    }
    for (std::size_t j = k + 1; j < n; ++j) level[j] = std::move(up[j]);
  }

  tp.final = base;
  tp.final.label = "final";
  for (std::size_t i = 0; i < g.n; ++i) tp.final.values[i] += dtel[i];
  tp.singularities = pole_abscissae(g, tel);
  for (std::size_t i = 0; i < g.n; ++i) {
    if (std::isfinite(tel[i]) && !std::isfinite(dtel[i])) tp.singularities.push_back(g.x(i));
  }
  std::sort(tp.singularities.begin(), tp.singularities.end());
  tp.singularities.erase(std::unique(tp.singularities.begin(), tp.singularities.end()), tp.singularities.end());
  if (require_smooth && !tp.singularities.empty()) {
    throw SingularTransformationError(
        "chain: final potential has " + std::to_string(tp.singularities.size()) + " singular point(s)",
        tp.singularities);
  }
  return tp;
}

inline TransformedPotential chain_potential(const ChainSpec& spec, bool require_smooth = true) {
  if (spec.stages.empty()) throw DomainError("chain: at least one stage is required");
  if (spec.grid.n < 16) throw DomainError("chain: grid needs at least 16 points");
  std::vector<SuperpotentialSamples> level;
  std::vector<double> eps;
  std::vector<cplx> deltas, gammas;
  for (const auto& st : spec.stages) {
    const Superpotential s = stage_superpotential(spec.sys, st);
    level.push_back(s.sample(spec.grid));
    eps.push_back(st.epsilon);
    deltas.push_back(s.delta());
    gammas.push_back(s.gamma());
  }
  SampledPotential base = sample(lame_function(spec.sys), spec.grid);
  TransformedPotential tp = chain_from_stage1(base, std::move(level), eps, require_smooth);
  tp.deltas = std::move(deltas);
  tp.gammas = std::move(gammas);
  return tp;
}

}  // namespace darboux
