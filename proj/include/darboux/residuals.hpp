#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "darboux/errors.hpp"
#include "darboux/sampled.hpp"
#include "darboux/superpotential.hpp"

namespace darboux {

/// V~ = V + alpha'. Uses the analytic alpha' carried by the samples, or a
/// 5-point stencil of alpha when the derivative is absent. Any pole of alpha on
/// the grid is fatal.
inline SampledPotential displaced_potential(const SampledPotential& v, const SuperpotentialSamples& a) {
  if (!v.grid().aligned_with(a.grid)) throw ShapeError("displaced_potential: grid mismatch");
  std::vector<double> poles = pole_abscissae(a.grid, a.value);
  for (std::size_t i : a.guarded) poles.push_back(a.grid.x(i));
  if (!poles.empty()) {
    std::sort(poles.begin(), poles.end());
    poles.erase(std::unique(poles.begin(), poles.end()), poles.end());
    throw SingularTransformationError("superpotential is singular on the grid", poles);
  }
  const std::vector<double> d = a.derivative.empty() ? five_point_derivative(a.value, a.grid.dx) : a.derivative;
  SampledPotential out = v;
  out.label = v.label + " transformed";
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += d[i];
  return out;
}

enum class RiccatiDirection { forward, backward };

struct RiccatiResidual {
  double max = 0.0;
  double argmax = 0.0;
  std::size_t excluded = 0;
};

/// max |-+alpha' + alpha^2 - 2(V - epsilon)| over the grid. Forward checks the
/// equation against the original potential, backward against the partner.
/// Guarded and non-finite samples are excluded and counted.
inline RiccatiResidual riccati_residual(const SuperpotentialSamples& a, const SampledPotential& v, double eps,
                                        RiccatiDirection dir = RiccatiDirection::forward) {
  if (!v.grid().aligned_with(a.grid) || a.value.size() != a.grid.n) {
    throw ShapeError("riccati_residual: grid mismatch");
  }
  const std::vector<double> d = a.derivative.empty() ? five_point_derivative(a.value, a.grid.dx) : a.derivative;
  const double s = dir == RiccatiDirection::forward ? -1.0 : 1.0;
  RiccatiResidual r;
  for (std::size_t i = 0; i < a.grid.n; ++i) {
    const double al = a.value[i];
    if (!std::isfinite(al) || !std::isfinite(d[i])) {
      ++r.excluded;
      continue;
    }
    const double res = std::abs(s * d[i] + al * al - 2.0 * (v.values[i] - eps));
    if (res > r.max) {
      r.max = res;
      r.argmax = a.grid.x(i);
    }
  }
  return r;
}

/// V~ = V + alpha' for a Lame superpotential, after checking alpha against its
/// own Riccati equation (max residual below riccati_tol).
inline SampledPotential displaced_potential(const Superpotential& s, const Grid& g, double riccati_tol = 1e-7) {
  SampledPotential v = sample(lame_function(s.system()), g);
  const SuperpotentialSamples a = s.sample(g);
  const RiccatiResidual r = riccati_residual(a, v, s.epsilon());
  if (r.max >= riccati_tol) {
    throw ConsistencyError("displaced_potential: Riccati residual " + std::to_string(r.max) + " at x = " +
                           std::to_string(r.argmax));
  }
  return displaced_potential(v, a);
}

struct DisplacementResidual {
  double spread = 0.0;
  double epsilon_recovered = 0.0;
  std::size_t guarded = 0;
};

/// Evaluates V + V_d - 1/4 [(V' + V_d') / (V - V_d)]^2 with V_d = V(. + delta) on
/// the grid. A Weierstrass potential makes it the constant 2 epsilon. Points with
/// |V - V_d| < guard * max(1, |V|) are skipped.
inline DisplacementResidual displacement_residual(const PotentialFunction& v, double delta, const Grid& g,
                                                  double guard = 1e-6) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  std::size_t used = 0;
  DisplacementResidual r;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    const double v0 = v.value(x);
    const double v1 = v.value(x + delta);
    const double den = v0 - v1;
    if (std::abs(den) < guard * std::max(1.0, std::abs(v0))) {
      ++r.guarded;
      continue;
    }
    const double q = (v.derivative(x) + v.derivative(x + delta)) / den;
    const double lhs = v0 + v1 - 0.25 * q * q;
    lo = std::min(lo, lhs);
    hi = std::max(hi, lhs);
    sum += lhs;
    ++used;
  }
  if (used == 0) throw DegenerateGridError("displacement_residual: every grid point lies in the guard band");
  r.spread = hi - lo;
  r.epsilon_recovered = 0.5 * sum / static_cast<double>(used);
  return r;
}

inline DisplacementResidual displacement_residual(const LameSystem& sys, double delta, const Grid& g,
                                                  double guard = 1e-6) {
  return displacement_residual(lame_function(sys), delta, g, guard);
}

/// Test function with analytic derivatives f, f', f'', f'''.
struct TestFunction {
  std::function<std::array<double, 4>(double)> eval;
  std::string label;
};

inline TestFunction gaussian(double center, double width) {
  return {[center, width](double x) {
            const double u = (x - center) / width;
            const double g = std::exp(-0.5 * u * u);
            const double w = width;
            return std::array<double, 4>{g, -u / w * g, (u * u - 1.0) / (w * w) * g,
                                         (3.0 * u - u * u * u) / (w * w * w) * g};
          },
          "gaussian"};
}

/// exp(-u^2/2) cos(k x), u = (x - center)/width.
inline TestFunction windowed_wave(double center, double width, double k) {
  return {[center, width, k](double x) {
            const double u = (x - center) / width;
            const double w = width;
            const double g0 = std::exp(-0.5 * u * u);
            const double g1 = -u / w * g0;
            const double g2 = (u * u - 1.0) / (w * w) * g0;
            const double g3 = (3.0 * u - u * u * u) / (w * w * w) * g0;
            const double c = std::cos(k * x);
            const double s = std::sin(k * x);
            const double c1 = -k * s, c2 = -k * k * c, c3 = k * k * k * s;
            return std::array<double, 4>{g0 * c, g1 * c + g0 * c1, g2 * c + 2 * g1 * c1 + g0 * c2,
                                         g3 * c + 3 * g2 * c1 + 3 * g1 * c2 + g0 * c3};
          },
          "windowed wave"};
}

/// alpha, alpha', alpha'' at x.
using AlphaJet = std::function<std::array<double, 3>(double)>;

inline AlphaJet alpha_jet(const Superpotential& s) {
  return [s](double x) {
    const auto j = s.jet(x);
    return std::array<double, 3>{j.value.real(), j.d1.real(), s.second_derivative(x).real()};
  };
}

/// max |A H f - H~ A f| over test functions and grid points, with
/// A = (d/dx + alpha)/sqrt 2, H = -1/2 d^2 + V, H~ = -1/2 d^2 + V~.
inline double intertwining_residual(const AlphaJet& alpha, const PotentialFunction& v,
                                    const PotentialFunction& v_partner, std::span<const TestFunction> tests,
                                    const Grid& g) {
  double worst = 0.0;
  for (const auto& t : tests) {
    for (std::size_t i = 0; i < g.n; ++i) {
      const double x = g.x(i);
      const auto f = t.eval(x);
      const auto a = alpha(x);
      const double vx = v.value(x);
      const double hf = -0.5 * f[2] + vx * f[0];
      const double dhf = -0.5 * f[3] + v.derivative(x) * f[0] + vx * f[1];
      const double ahf = dhf + a[0] * hf;
      const double af = f[1] + a[0] * f[0];
      const double daf2 = f[3] + a[2] * f[0] + 2.0 * a[1] * f[1] + a[0] * f[2];
      const double haf = -0.5 * daf2 + v_partner.value(x) * af;
      worst = std::max(worst, std::abs(ahf - haf) / std::numbers::sqrt2);
    }
  }
  return worst;
}

/// Intertwining check of a real displacement superpotential against V(. + delta).
inline double intertwining_residual(const Superpotential& s, std::span<const TestFunction> tests, const Grid& g) {
  const PotentialFunction v = lame_function(s.system());
  return intertwining_residual(alpha_jet(s), v, shifted(v, s.delta().real()), tests, g);
}

}  // namespace darboux
