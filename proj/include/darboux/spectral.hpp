#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "darboux/errors.hpp"
#include "darboux/sampled.hpp"

namespace darboux {

// Numerov for -1/2 psi'' + V psi = E psi, i.e. psi'' = f psi with f = 2(V - E).
// In the variable phi_n = (1 - h^2 f_n / 12) psi_n the scheme reads
//   phi_{n+1} - 2 phi_n + phi_{n-1} = g_n phi_n,  g_n = h^2 f_n / (1 - h^2 f_n / 12).
// It is iterated in summed form on (phi_n, d_n = phi_n - phi_{n-1}):
//   d_{n+1} = d_n + g_n phi_n,  phi_{n+1} = phi_n + d_{n+1},
// which avoids the systematic rounding of 2 + g_n for small steps.

enum class Direction { forward, backward };

struct NumerovSolution {
  std::vector<double> psi;
  bool rescaled = false;
};

namespace detail {

inline double numerov_g(double v, double e, double h) {
  const double hf = h * h * 2.0 * (v - e);
  return hf / (1.0 - hf / 12.0);
}

inline double numerov_a(double v, double e, double h) { return 1.0 - h * h * 2.0 * (v - e) / 12.0; }

/// State (phi_n, d_n).
struct Pair {
  double phi;
  double d;
  void step(double g) noexcept {
    d += g * phi;
    phi += d;
  }
};

using Mat2 = std::array<double, 4>;  // row-major, acting on (phi, d)

/// Monodromy over samples first, first + stride, ..., first + (count-1) stride:
/// maps (phi_first, d_first) to the state `count` steps later.
inline Mat2 transfer(const std::vector<double>& v, std::size_t first, std::size_t count, double e, double h,
                     std::size_t stride = 1) {
  Pair c0{1.0, 0.0}, c1{0.0, 1.0};
  for (std::size_t k = 0; k < count; ++k) {
    const double g = numerov_g(v[first + k * stride], e, h);
    c0.step(g);
    c1.step(g);
  }
  return {c0.phi, c1.phi, c0.d, c1.d};
}

/// Eigenvector of a unimodular 2x2 matrix for its eigenvalue of largest modulus.
/// Throws when the eigenvalues are not real (energy inside a band).
inline std::array<double, 2> growing_eigenvector(const Mat2& m, double& lambda) {
  const double tr = m[0] + m[3];
  const double disc = 0.25 * tr * tr - (m[0] * m[3] - m[1] * m[2]);
  if (disc <= 0.0) throw IllPosedWindowError("energy lies inside an allowed band of the background");
  const double sq = std::sqrt(disc);
  lambda = 0.5 * tr + (tr >= 0 ? sq : -sq);
  // (m - lambda) v = 0; use the row with the larger entries.
  std::array<double, 2> v;
  if (std::abs(m[1]) + std::abs(m[0] - lambda) >= std::abs(m[2]) + std::abs(m[3] - lambda)) {
    v = {-m[1], m[0] - lambda};
  } else {
    v = {m[3] - lambda, -m[2]};
  }
  const double nrm = std::hypot(v[0], v[1]);
  return {v[0] / nrm, v[1] / nrm};
}

}  // namespace detail

/// Integrates from the given initial pair (psi at the first two samples in the
/// chosen direction). Growth beyond 1e150 is rescaled and flagged.
inline NumerovSolution numerov_integrate(const SampledPotential& v, double e, Direction dir, double psi0,
                                         double psi1) {
  const std::size_t n = v.size();
  if (n < 3) throw ShapeError("numerov_integrate: need at least 3 samples");
  const double h = v.dx;
  NumerovSolution s;
  std::vector<double> phi(n);
  auto idx = [&](std::size_t k) { return dir == Direction::forward ? k : n - 1 - k; };
  phi[idx(0)] = psi0 * detail::numerov_a(v.values[idx(0)], e, h);
  phi[idx(1)] = psi1 * detail::numerov_a(v.values[idx(1)], e, h);
  detail::Pair p{phi[idx(1)], phi[idx(1)] - phi[idx(0)]};
  for (std::size_t k = 1; k + 1 < n; ++k) {
    p.step(detail::numerov_g(v.values[idx(k)], e, h));
    phi[idx(k + 1)] = p.phi;
    if (std::abs(p.phi) > 1e150) {
      for (std::size_t j = 0; j <= k + 1; ++j) phi[idx(j)] *= 1e-150;
      p.phi *= 1e-150;
      p.d *= 1e-150;
      s.rescaled = true;
    }
  }
  s.psi.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.psi[i] = phi[i] / detail::numerov_a(v.values[i], e, h);
  return s;
}

inline double hill_discriminant_strided(const SampledPotential& v, double e, std::size_t stride) {
  const std::size_t per = v.samples_per_period();
  if (per % stride != 0) throw DomainError("hill_discriminant: stride does not divide the period");
  if (v.size() < per + 1) throw ShapeError("hill_discriminant: fewer samples than one period");
  const auto m = detail::transfer(v.values, stride, per / stride, e, v.dx * static_cast<double>(stride), stride);
  return m[0] + m[3];
}

/// Trace of the one-period monodromy, from the first period of samples.
/// With check_order, also evaluates at steps 2h and 4h and throws
/// AccuracyError when the observed order falls below 3.
inline double hill_discriminant(const SampledPotential& v, double e, bool check_order = false) {
  const double d1 = hill_discriminant_strided(v, e, 1);
  if (check_order && v.samples_per_period() % 4 == 0) {
    const double d2 = hill_discriminant_strided(v, e, 2);
    const double d4 = hill_discriminant_strided(v, e, 4);
    const double e21 = std::abs(d2 - d1);
    const double e42 = std::abs(d4 - d2);
    // Differences at round-off level carry no order information.
    const double floor = 1e-11 * std::max(1.0, std::abs(d1));
    if (e42 > floor && e21 > floor) {
      const double order = std::log2(e42 / e21);
      if (order < 3.0) {
        throw AccuracyError("hill_discriminant: observed order " + std::to_string(order) +
                            " below 3; refine the grid");
      }
    }
  }
  return d1;
}

enum class EdgeType { lower, upper };

struct BandEdge {
  double energy = 0.0;
  EdgeType type = EdgeType::lower;
};

struct BandEdgeOptions {
  double tol = 1e-12;
  std::size_t scan_points = 2000;
  double closed_gap = 1e-7;  // max excess |Delta| - 2 of a gap treated as closed
};

/// Edges of the allowed bands (|Delta| <= 2) inside [e_lo, e_hi]. A lower edge
/// opens a band as E increases, an upper edge closes it. Gaps whose |Delta|
/// exceeds 2 by less than `closed_gap` are treated as closed and skipped.
inline std::vector<BandEdge> band_edges(const SampledPotential& v, double e_lo, double e_hi,
                                        const BandEdgeOptions& opt = {}) {
  if (!(e_hi > e_lo)) throw DomainError("band_edges: empty energy range");
  hill_discriminant(v, e_hi, true);
  const std::size_t ns = std::max<std::size_t>(opt.scan_points, 8);
  std::vector<double> es(ns + 1), ds(ns + 1);
  for (std::size_t i = 0; i <= ns; ++i) {
    es[i] = e_lo + (e_hi - e_lo) * static_cast<double>(i) / static_cast<double>(ns);
    ds[i] = hill_discriminant(v, es[i]);
  }
  auto excess = [](double d) { return std::abs(d) - 2.0; };
  auto refine = [&](double a, double b, double target) {
    double fa = hill_discriminant(v, a) - target;
    for (int it = 0; it < 200 && b - a > opt.tol; ++it) {
      const double mid = 0.5 * (a + b);
      const double fm = hill_discriminant(v, mid) - target;
      if ((fm > 0) == (fa > 0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  };

  // Runs of consecutive gap samples (|Delta| > 2).
  struct Run {
    std::size_t first, last;
    double peak;
  };
  std::vector<Run> gaps;
  for (std::size_t i = 0; i <= ns; ++i) {
    if (excess(ds[i]) > 0) {
      if (!gaps.empty() && gaps.back().last + 1 == i) {
        gaps.back().last = i;
        gaps.back().peak = std::max(gaps.back().peak, excess(ds[i]));
      } else {
        gaps.push_back({i, i, excess(ds[i])});
      }
    }
  }
  std::vector<BandEdge> edges;
  for (const auto& g : gaps) {
    const bool touches_lo = g.first == 0;
    const bool touches_hi = g.last == ns;
    if (!touches_lo && !touches_hi && g.peak < opt.closed_gap) continue;
    const double sgn_target = [&] { return ds[g.first] > 0 ? 2.0 : -2.0; }();
    if (!touches_lo) {
      edges.push_back({refine(es[g.first - 1], es[g.first], sgn_target), EdgeType::upper});
    }
    if (!touches_hi) {
      const double t = ds[g.last] > 0 ? 2.0 : -2.0;
      edges.push_back({refine(es[g.last], es[g.last + 1], t), EdgeType::lower});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const BandEdge& a, const BandEdge& b) { return a.energy < b.energy; });
  return edges;
}

/// The first `count` band edges above the potential minimum, widening the
/// search range until they are found.
inline std::vector<BandEdge> lowest_band_edges(const SampledPotential& v, std::size_t count,
                                               const BandEdgeOptions& opt = {}) {
  const auto [mn, mx] = std::minmax_element(v.values.begin(), v.values.end());
  const double lo = *mn - 1e-3;
  double span = std::max(1.0, *mx - *mn);
  for (int attempt = 0; attempt < 12; ++attempt) {
    auto edges = band_edges(v, lo, *mx + span, opt);
    if (edges.size() >= count) {
      edges.resize(count);
      return edges;
    }
    span *= 2.0;
  }
  throw NotFoundError("band_edges: fewer than " + std::to_string(count) + " edges found");
}

struct BoundState {
  double energy = 0.0;
  int nodes = 0;
  double residual = 0.0;
  double decay = 0.0;  // max(|psi| at the domain ends) / max |psi|
};

enum class Boundary { floquet, dirichlet };

struct BoundStateOptions {
  Boundary boundary = Boundary::floquet;
  std::size_t scan_points = 400;
  std::optional<std::size_t> match_index;  // default: middle of the grid
  std::optional<std::size_t> background_samples;  // default: the period, or ~1 length unit
  double tol = 1e-13;
};

namespace detail {

struct Shot {
  double theta = 0.0;  // line-angle mismatch in (-pi/2, pi/2]
  double sin_theta = 0.0;
  int nodes = 0;
};

class Shooter {
 public:
  Shooter(const SampledPotential& v, const BoundStateOptions& opt) : v_(v), opt_(opt) {
    n_ = v.size();
    if (n_ < 16) throw ShapeError("bound_states: need at least 16 samples");
    m_ = opt.match_index.value_or(n_ / 2);
    if (m_ < 2 || m_ + 3 >= n_) throw DomainError("bound_states: matching index out of range");
    if (opt.background_samples) {
      per_ = *opt.background_samples;
    } else if (v.period) {
      per_ = v.samples_per_period();
    } else {
      per_ = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(1.0 / v.dx)), 4, n_ / 8);
    }
    if (opt.boundary == Boundary::floquet && 2 * per_ + 4 > n_) {
      throw ShapeError("bound_states: domain shorter than two background periods");
    }
    rev_.resize(per_ + 2);
    for (std::size_t k = 0; k < per_ + 2 && k < n_; ++k) rev_[k] = v_.values[n_ - 1 - k];
  }

  /// Start states at sample 1 from the left and from the right (reversed
  /// coordinates r = n-1-i), both as (phi_1, d_1).
  std::pair<Pair, Pair> starts(double e) const {
    if (opt_.boundary == Boundary::dirichlet) return {{1.0, 1.0}, {1.0, 1.0}};
    // The mode growing along the integration direction decays behind it.
    double lam = 0.0;
    const auto vl = growing_eigenvector(transfer(v_.values, 1, per_, e, v_.dx), lam);
    if (std::abs(lam) <= 1.0 + 1e-12) throw IllPosedWindowError("left background allows propagation");
    const auto vr = growing_eigenvector(transfer(rev_, 1, per_, e, v_.dx), lam);
    if (std::abs(lam) <= 1.0 + 1e-12) throw IllPosedWindowError("right background allows propagation");
    return {{vl[0], vl[1]}, {vr[0], vr[1]}};
  }

  /// Background discriminants at both ends (for window validation).
  std::pair<double, double> background_discriminants(double e) const {
    const auto ml = transfer(v_.values, 1, per_, e, v_.dx);
    const auto mr = transfer(rev_, 1, per_, e, v_.dx);
    return {ml[0] + ml[3], mr[0] + mr[3]};
  }

  Shot shoot(double e) const {
    const double h = v_.dx;
    auto [l, r] = starts(e);
    int nodes = 0;
    auto count = [&nodes](double a, double b) {
      if (a != 0.0 && b != 0.0 && (a > 0) != (b > 0)) ++nodes;
    };
    // Left: from sample 1 to sample m+1, counting every pair up to (m, m+1).
    // A node at the junction is then seen by one continuous solution.
    count(l.phi - l.d, l.phi);
    for (std::size_t k = 1; k <= m_; ++k) {
      const double prev = l.phi;
      l.step(numerov_g(v_.values[k], e, h));
      count(prev, l.phi);
      renorm(l);
    }
    // Right: reversed index 1 to n-1-m (sample m); pairs down to (m+2, m+1).
    count(r.phi - r.d, r.phi);
    const std::size_t steps = n_ - 2 - m_;
    for (std::size_t k = 1; k <= steps; ++k) {
      const double prev = r.phi;
      r.step(numerov_g(v_.values[n_ - 1 - k], e, h));
      if (k < steps) count(prev, r.phi);
      renorm(r);
    }
    // Both as (phi_m, phi_{m+1} - phi_m): left holds (phi_{m+1}, d_{m+1}),
    // right holds (phi_m, phi_m - phi_{m+1}).
    const double al = std::atan2(l.d / h, l.phi - l.d);
    const double ar = std::atan2(-r.d / h, r.phi);
    double th = std::remainder(al - ar, std::numbers::pi);
    if (th <= -0.5 * std::numbers::pi) th += std::numbers::pi;
    return {th, std::sin(th), nodes};
  }

  /// Glued wavefunction at energy e (left and right solutions matched at m).
  std::vector<double> wavefunction(double e) const {
    const double h = v_.dx;
    auto [l, r] = starts(e);
    std::vector<double> phi(n_), rgt(n_);
    phi[0] = l.phi - l.d;
    phi[1] = l.phi;
    for (std::size_t k = 1; k < m_; ++k) {
      l.step(numerov_g(v_.values[k], e, h));
      phi[k + 1] = l.phi;
      if (std::abs(l.phi) > 1e150) {
        for (std::size_t j = 0; j <= k + 1; ++j) phi[j] *= 1e-150;
        l.phi *= 1e-150;
        l.d *= 1e-150;
      }
    }
    rgt[n_ - 1] = r.phi - r.d;
    rgt[n_ - 2] = r.phi;
    for (std::size_t k = 1; k + 1 < n_ - m_; ++k) {
      r.step(numerov_g(v_.values[n_ - 1 - k], e, h));
      rgt[n_ - 2 - k] = r.phi;
      if (std::abs(r.phi) > 1e150) {
        for (std::size_t j = n_ - 2 - k; j < n_; ++j) rgt[j] *= 1e-150;
        r.phi *= 1e-150;
        r.d *= 1e-150;
      }
    }
    // Least-squares scale over samples m and m+1, robust when psi(m) is near a node.
    l.step(numerov_g(v_.values[m_], e, h));
    const double den = rgt[m_] * rgt[m_] + rgt[m_ + 1] * rgt[m_ + 1];
    const double scale = den > 0.0 ? (phi[m_] * rgt[m_] + l.phi * rgt[m_ + 1]) / den : 1.0;
    for (std::size_t k = m_ + 1; k < n_; ++k) phi[k] = rgt[k] * scale;
    for (std::size_t k = 0; k < n_; ++k) phi[k] /= numerov_a(v_.values[k], e, h);
    return phi;
  }

 private:
  static void renorm(Pair& p) {
    const double s = std::max(std::abs(p.phi), std::abs(p.d));
    if (s > 1e100) {
      p.phi /= s;
      p.d /= s;
    }
  }

  const SampledPotential& v_;
  BoundStateOptions opt_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t per_ = 0;
  std::vector<double> rev_;
};

}  // namespace detail

/// Bound states with energies in (e_lo, e_hi). In Floquet mode the window must
/// lie in a gap of both end backgrounds.
inline std::vector<BoundState> bound_states(const SampledPotential& v, double e_lo, double e_hi,
                                            const BoundStateOptions& opt = {}) {
  if (!(e_hi > e_lo)) throw DomainError("bound_states: empty window");
  const detail::Shooter sh(v, opt);
  const std::size_t ns = std::max<std::size_t>(opt.scan_points, 4);
  std::vector<double> es(ns + 1);
  std::vector<detail::Shot> shots(ns + 1);
  for (std::size_t i = 0; i <= ns; ++i) {
    es[i] = e_lo + (e_hi - e_lo) * static_cast<double>(i) / static_cast<double>(ns);
    if (opt.boundary == Boundary::floquet) {
      const auto [dl, dr] = sh.background_discriminants(es[i]);
      if (std::abs(dl) <= 2.0 || std::abs(dr) <= 2.0) {
        throw IllPosedWindowError("bound_states: window touches an allowed band at E = " + std::to_string(es[i]));
      }
    }
    shots[i] = sh.shoot(es[i]);
  }
  const double quarter = 0.25 * std::numbers::pi;
  std::vector<BoundState> out;
  for (std::size_t i = 0; i < ns; ++i) {
    const auto& a = shots[i];
    const auto& b = shots[i + 1];
    if ((a.theta > 0) == (b.theta > 0) && a.theta != 0.0) continue;
    if (std::abs(a.theta) >= quarter || std::abs(b.theta) >= quarter) continue;
    double lo = es[i], hi = es[i + 1];
    double flo = a.theta;
    detail::Shot mid_shot = a;
    for (int it = 0; it < 200 && hi - lo > opt.tol * std::max(1.0, std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      mid_shot = sh.shoot(mid);
      if ((mid_shot.theta > 0) == (flo > 0)) {
        lo = mid;
        flo = mid_shot.theta;
      } else {
        hi = mid;
      }
    }
    const double e = 0.5 * (lo + hi);
    const detail::Shot s = sh.shoot(e);
    const auto psi = sh.wavefunction(e);
    double mx = 0.0;
    for (double p : psi) mx = std::max(mx, std::abs(p));
    const double ends = std::max(std::abs(psi.front()), std::abs(psi.back()));
    out.push_back({e, s.nodes, std::abs(s.sin_theta), mx > 0 ? ends / mx : 1.0});
  }
  return out;
}

/// Glued eigenfunction at energy e with the same boundary treatment as bound_states.
inline std::vector<double> bound_state_wavefunction(const SampledPotential& v, double e,
                                                    const BoundStateOptions& opt = {}) {
  return detail::Shooter(v, opt).wavefunction(e);
}

struct DiscriminantSample {
  double energy = 0.0;
  double value = 0.0;
};

struct SpectralReport {
  std::vector<BandEdge> band_edges;
  std::vector<BoundState> bound_states;
  std::vector<DiscriminantSample> discriminant_samples;
};

inline std::vector<DiscriminantSample> sample_discriminant(const SampledPotential& v, double e_lo, double e_hi,
                                                           std::size_t count) {
  std::vector<DiscriminantSample> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double e = count > 1 ? e_lo + (e_hi - e_lo) * static_cast<double>(i) / static_cast<double>(count - 1) : e_lo;
    out.push_back({e, hill_discriminant(v, e)});
  }
  return out;
}

}  // namespace darboux
