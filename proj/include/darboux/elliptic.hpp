#pragma once

// Weierstrass p, p', zeta, sigma for real invariants with three real roots,
// Jacobi sn/cn/dn, and the Lame (n = 1) potential built on them.
//
// Evaluation: reduce z into the period cell centred at the origin, scale by
// 2^-d until the Laurent series converges fast, then undo the scaling with the
// duplication formulas. The degenerate lattices (one or both periods infinite)
// use closed trigonometric / hyperbolic forms.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "darboux/errors.hpp"

namespace darboux {

using cplx = std::complex<double>;

enum class LatticeKind {
  generic,        // both half-periods finite
  trigonometric,  // e2 == e3, imaginary period infinite
  hyperbolic,     // e1 == e2, real period infinite (one-soliton limit)
  rational        // g2 == g3 == 0, p(z) = 1/z^2
};

/// Lattice data of one Weierstrass system. Roots are ordered e3 <= e2 <= e1;
/// 2*omega is the real period and 2*i*tau the imaginary one. An infinite
/// omega (tau) marks the degenerate lattice.
struct EllipticInvariants {
  double g2 = 0.0;
  double g3 = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  double omega = 0.0;
  double tau = 0.0;

  LatticeKind kind() const noexcept {
    const bool inf_w = std::isinf(omega);
    const bool inf_t = std::isinf(tau);
    if (inf_w && inf_t) return LatticeKind::rational;
    if (inf_w) return LatticeKind::hyperbolic;
    if (inf_t) return LatticeKind::trigonometric;
    return LatticeKind::generic;
  }
  bool one_soliton() const noexcept { return kind() == LatticeKind::hyperbolic; }
  cplx omega_prime() const noexcept { return {0.0, tau}; }
};

// --- complete elliptic integral and Jacobi functions -----------------------

namespace detail {

inline double agm(double a, double b) {
  for (int i = 0; i < 64; ++i) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    a = an;
    b = bn;
    if (std::abs(a - b) <= 4 * std::numeric_limits<double>::epsilon() * a) break;
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// K(m) by the arithmetic-geometric mean; K(1) = +inf.
inline double complete_elliptic_k(double m) {
  if (!(m >= 0.0 && m <= 1.0)) throw DomainError("complete_elliptic_k: m outside [0,1]");
  if (m == 1.0) return std::numeric_limits<double>::infinity();
  return std::numbers::pi / (2.0 * detail::agm(1.0, std::sqrt(1.0 - m)));
}

struct JacobiTriple {
  double sn;
  double cn;
  double dn;
};

/// sn, cn, dn of real argument by the descending Landen (AGM) scheme.
inline JacobiTriple jacobi_sncndn(double x, double m) {
  if (!(m >= 0.0 && m <= 1.0)) throw DomainError("jacobi_sncndn: m outside [0,1]");
  if (m == 0.0) return {std::sin(x), std::cos(x), 1.0};
  if (m == 1.0) {
    const double s = 1.0 / std::cosh(x);
    return {std::tanh(x), s, s};
  }
  const double quarter = complete_elliptic_k(m);
  x -= 4.0 * quarter * std::round(x / (4.0 * quarter));

  constexpr int kMax = 32;
  std::array<double, kMax + 1> a{};
  std::array<double, kMax + 1> c{};
  a[0] = 1.0;
  c[0] = std::sqrt(m);
  double b = std::sqrt(1.0 - m);
  int n = 0;
  while (n < kMax && std::abs(c[n]) > std::numeric_limits<double>::epsilon()) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  double phi = std::ldexp(a[n] * x, n);
  for (int k = n; k >= 1; --k) phi = 0.5 * (phi + std::asin(c[k] * std::sin(phi) / a[k]));
  const double sn = std::sin(phi);
  return {sn, std::cos(phi), std::sqrt(1.0 - m * sn * sn)};
}

inline double jacobi_sn(double x, double m) { return jacobi_sncndn(x, m).sn; }

// --- invariants --------------------------------------------------------------

/// Builds the lattice from (g2, g3). Only the all-real-roots case
/// g2^3 - 27 g3^2 >= 0 is supported.
inline EllipticInvariants invariants_from_g(double g2, double g3) {
  const double scale = std::max({std::abs(g2 * g2 * g2), 27.0 * g3 * g3, 1e-300});
  const double disc = g2 * g2 * g2 - 27.0 * g3 * g3;
  if (disc < -1e-12 * scale) throw UnsupportedCaseError("complex roots (g2^3 - 27 g3^2 < 0) are not supported");

  EllipticInvariants inv;
  inv.g2 = g2;
  inv.g3 = g3;
  if (g2 <= 0.0) {
    // Real roots with g2 <= 0 force g2 == g3 == 0.
    inv.omega = inv.tau = std::numeric_limits<double>::infinity();
    return inv;
  }
  // 4t^3 - g2 t - g3 = 0 by the trigonometric method, then one Newton polish.
  const double r = std::sqrt(g2 / 3.0);
  double arg = 3.0 * std::sqrt(3.0) * g3 / (g2 * std::sqrt(g2));
  arg = std::clamp(arg, -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;
  std::array<double, 3> e{};
  for (int k = 0; k < 3; ++k) {
    double t = r * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
    const double f = 4 * t * t * t - g2 * t - g3;
    const double df = 12 * t * t - g2;
    if (std::abs(df) > 1e-8 * g2) t -= f / df;
    e[static_cast<std::size_t>(k)] = t;
  }
  std::sort(e.begin(), e.end());
  inv.e3 = e[0];
  inv.e2 = e[1];
  inv.e1 = e[2];
  if (disc <= 1e-12 * scale) {
    // Double root: snap to the exact degenerate configuration.
    if (g3 < 0.0) {
      const double c = -1.5 * g3 / g2;  // e1 == e2 == c
      inv.e1 = inv.e2 = c;
      inv.e3 = -2.0 * c;
    } else {
      const double c = 1.5 * g3 / g2;  // e2 == e3 == -c
      inv.e1 = 2.0 * c;
      inv.e2 = inv.e3 = -c;
    }
  }
  const double span = inv.e1 - inv.e3;
  const double k2 = (inv.e2 - inv.e3) / span;
  const double s = std::sqrt(span);
  inv.omega = complete_elliptic_k(k2) / s;
  inv.tau = complete_elliptic_k(1.0 - k2) / s;
  return inv;
}

/// Invariants of the Lame-normalised lattice (e1 - e3 = 1) for modulus m.
inline EllipticInvariants invariants_from_modulus(double m) {
  if (!(m >= 0.0 && m <= 1.0)) throw DomainError("invariants_from_modulus: m outside [0,1]");
  EllipticInvariants inv;
  inv.g2 = 4.0 * (m * m - m + 1.0) / 3.0;
  inv.g3 = 4.0 * (m - 2.0) * (2.0 * m - 1.0) * (m + 1.0) / 27.0;
  inv.e1 = (2.0 - m) / 3.0;
  inv.e2 = (2.0 * m - 1.0) / 3.0;
  inv.e3 = -(m + 1.0) / 3.0;
  inv.omega = complete_elliptic_k(m);
  inv.tau = complete_elliptic_k(1.0 - m);
  return inv;
}

/// Lame (n = 1) system V(x) = m sn^2(x|m) - (m+1)/3 with its band edges.
struct LameSystem {
  double m = 0.5;
  EllipticInvariants inv;
  double E0 = 0.0;   // bottom of the lowest band
  double E1 = 0.0;   // top of the lowest band
  double E1p = 0.0;  // bottom of the second band

  double period() const noexcept { return 2.0 * inv.omega; }
};

inline LameSystem make_lame(double m) {
  LameSystem sys;
  sys.m = m;
  sys.inv = invariants_from_modulus(m);
  sys.E0 = (m - 2.0) / 6.0;
  sys.E1 = (1.0 - 2.0 * m) / 6.0;
  sys.E1p = (m + 1.0) / 6.0;
  return sys;
}

/// V(x) = m sn^2(x|m) - (m+1)/3, bounded in [e3, e2], period 2K(m).
inline double lame_potential(double x, const LameSystem& sys) {
  const double sn = jacobi_sn(x, sys.m);
  return sys.m * sn * sn - (sys.m + 1.0) / 3.0;
}

inline double lame_potential_derivative(double x, const LameSystem& sys) {
  const auto j = jacobi_sncndn(x, sys.m);
  return 2.0 * sys.m * j.sn * j.cn * j.dn;
}

// --- Weierstrass functions ---------------------------------------------------

/// Argument reduced into the period cell [-omega, omega) x [-tau, tau):
/// z = z0 + 2 j omega + 2 k i tau.
struct CellPoint {
  cplx z0;
  long long j = 0;
  long long k = 0;
};

class Weierstrass {
 public:
  static constexpr double kDefaultPoleRadius = 1e-6;

  struct Values {
    cplx p;
    cplx dp;
    cplx zeta;
    cplx log_sigma;  // defined modulo 2 pi i
  };

  explicit Weierstrass(const EllipticInvariants& inv, double pole_radius = kDefaultPoleRadius)
      : inv_(inv), pole_radius_(pole_radius), kind_(inv.kind()) {
    switch (kind_) {
      case LatticeKind::hyperbolic:
        c_ = inv_.e1;
        a_ = std::sqrt(3.0 * c_);
        break;
      case LatticeKind::trigonometric:
        c_ = -inv_.e3;
        a_ = std::sqrt(3.0 * c_);
        break;
      case LatticeKind::generic:
        init_series();
        break;
      case LatticeKind::rational:
        break;
    }
  }

  const EllipticInvariants& invariants() const noexcept { return inv_; }
  double pole_radius() const noexcept { return pole_radius_; }

  /// eta = zeta(omega) (real), and eta' = zeta(i tau) (purely imaginary).
  double eta() const noexcept { return eta_; }
  cplx eta_prime() const noexcept { return eta_p_; }

  CellPoint reduce(cplx z) const {
    CellPoint c{z, 0, 0};
    if (std::isfinite(inv_.omega)) {
      c.j = static_cast<long long>(std::floor((z.real() + inv_.omega) / (2.0 * inv_.omega)));
    }
    if (std::isfinite(inv_.tau)) {
      c.k = static_cast<long long>(std::floor((z.imag() + inv_.tau) / (2.0 * inv_.tau)));
    }
    if (c.j != 0) c.z0 -= 2.0 * inv_.omega * static_cast<double>(c.j);
    if (c.k != 0) c.z0 -= cplx(0.0, 2.0 * inv_.tau * static_cast<double>(c.k));
    return c;
  }

  /// Distance from z to the nearest lattice point (pole of p).
  double distance_to_lattice(cplx z) const {
    switch (kind_) {
      case LatticeKind::generic:
        return std::abs(reduce(z).z0);
      case LatticeKind::hyperbolic: {
        const double per = std::numbers::pi / a_;  // lattice i*pi*n/a
        const double im = z.imag() - per * std::round(z.imag() / per);
        return std::hypot(z.real(), im);
      }
      case LatticeKind::trigonometric: {
        const double per = std::numbers::pi / a_;
        const double re = z.real() - per * std::round(z.real() / per);
        return std::hypot(re, z.imag());
      }
      case LatticeKind::rational:
        return std::abs(z);
    }
    return 0.0;
  }

  /// p, p', zeta and log sigma at z. Throws PoleError within the pole radius.
  Values evaluate(cplx z) const {
    const double dist = distance_to_lattice(z);
    if (dist < pole_radius_) {
      throw PoleError("argument within " + std::to_string(dist) + " of a lattice point", dist);
    }
    return evaluate_unchecked(z);
  }

  cplx p(cplx z) const { return evaluate(z).p; }
  cplx dp(cplx z) const { return evaluate(z).dp; }
  cplx zeta(cplx z) const { return evaluate(z).zeta; }

  /// log sigma(z) modulo 2 pi i; -inf real part on lattice points.
  cplx log_sigma(cplx z) const {
    if (distance_to_lattice(z) == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
    return evaluate_unchecked(z).log_sigma;
  }

  /// sigma is entire; no pole check.
  cplx sigma(cplx z) const {
    if (distance_to_lattice(z) == 0.0) return {0.0, 0.0};
    return std::exp(evaluate_unchecked(z).log_sigma);
  }

 private:
  static constexpr int kTerms = 48;

  void init_series() {
    coef_[2] = inv_.g2 / 20.0;
    coef_[3] = inv_.g3 / 28.0;
    for (int k = 4; k < kTerms; ++k) {
      double s = 0.0;
      for (int j = 2; j <= k - 2; ++j) s += coef_[j] * coef_[k - j];
      coef_[k] = 3.0 * s / ((2.0 * k + 1.0) * (k - 3.0));
    }
    series_radius_ = 0.3 * 2.0 * std::min(inv_.omega, inv_.tau);
    eta_ = scaled(cplx(inv_.omega, 0.0)).zeta.real();
    eta_p_ = cplx(0.0, scaled(cplx(0.0, inv_.tau)).zeta.imag());
  }

  // Laurent series about the origin, valid for |w| <= series_radius_.
  Values series(cplx w) const {
    const cplx w2 = w * w;
    cplx p = 1.0 / w2;
    cplx dp = -2.0 / (w2 * w);
    cplx zeta = 1.0 / w;
    cplx ls = 0.0;
    cplx pw = w2;  // w^(2k-2)
    int small = 0;  // odd-index coefficients vanish when g3 == 0
    for (int k = 2; k < kTerms; ++k) {
      const double kk = static_cast<double>(k);
      const cplx tp = coef_[k] * pw;
      p += tp;
      dp += (2.0 * kk - 2.0) * tp / w;
      zeta -= tp * w / (2.0 * kk - 1.0);
      ls -= tp * w2 / ((2.0 * kk - 1.0) * 2.0 * kk);
      small = std::abs(tp) <= 1e-18 * std::abs(p) ? small + 1 : 0;
      if (small == 2) break;
      pw *= w2;
    }
    return {p, dp, zeta, std::log(w) + ls};
  }

  // Series at z / 2^d followed by d duplication steps; no reduction.
  Values scaled(cplx z) const {
    int d = 0;
    const double r = std::abs(z);
    if (r > series_radius_) d = static_cast<int>(std::ceil(std::log2(r / series_radius_)));
    Values v = series(std::ldexp(1.0, -d) * z);
    const double g2 = inv_.g2;
    for (int i = 0; i < d; ++i) {
      const cplx p2 = 6.0 * v.p * v.p - 0.5 * g2;
      const cplx q = p2 / (2.0 * v.dp);
      const cplx p3 = 12.0 * v.p * v.dp;
      const cplx dq = (v.dp * p3 - p2 * p2) / (2.0 * v.dp * v.dp);
      Values n;
      n.p = -2.0 * v.p + q * q;
      n.dp = -v.dp + q * dq;
      n.zeta = 2.0 * v.zeta + q;
      n.log_sigma = std::log(-v.dp) + 4.0 * v.log_sigma;
      v = n;
    }
    return v;
  }

  Values evaluate_unchecked(cplx z) const {
    switch (kind_) {
      case LatticeKind::generic:
        return generic(z);
      case LatticeKind::hyperbolic:
        return hyperbolic(z, c_, a_);
      case LatticeKind::trigonometric: {
        // sin(a z) = -i sinh(i a z): reuse the hyperbolic forms in w = i z.
        const cplx I(0.0, 1.0);
        Values h = hyperbolic(I * z, c_, a_);
        // p(z) = -p_h(iz), p'(z) = -i p_h'(iz), zeta(z) = i zeta_h(iz),
        // sigma(z) = -i sigma_h(iz).
        return {-h.p, -I * h.dp, I * h.zeta, h.log_sigma - I * (std::numbers::pi / 2.0)};
      }
      case LatticeKind::rational:
        return {1.0 / (z * z), -2.0 / (z * z * z), 1.0 / z, std::log(z)};
    }
    return {};
  }

  Values generic(cplx z) const {
    const CellPoint c = reduce(z);
    Values v = scaled(c.z0);
    if (c.j == 0 && c.k == 0) return v;
    const double jd = static_cast<double>(c.j);
    const double kd = static_cast<double>(c.k);
    const cplx h = jd * eta_ + kd * eta_p_;
    const cplx half = cplx(jd * inv_.omega, kd * inv_.tau);
    v.zeta += 2.0 * h;
    const long long parity = c.j + c.k + c.j * c.k;
    v.log_sigma += 2.0 * h * (c.z0 + half) + cplx(0.0, (parity % 2 != 0) ? std::numbers::pi : 0.0);
    return v;
  }

  // p(w) = c + a^2 / sinh^2(a w), zeta = -c w + a coth(a w),
  // sigma = sinh(a w)/a exp(-c w^2 / 2). Written with exp(-2|Re|) so that
  // large real parts neither overflow nor lose precision.
  static Values hyperbolic(cplx w, double c, double a) {
    const cplx aw = a * w;
    const bool flip = aw.real() < 0.0;
    const cplx s = flip ? -aw : aw;
    const cplx e = std::exp(-2.0 * s);
    const cplx one_m = 1.0 - e;
    const cplx inv_sinh2 = 4.0 * e / (one_m * one_m);
    const cplx coth = (1.0 + e) / one_m;
    const double sgn = flip ? -1.0 : 1.0;
    Values v;
    v.p = c + a * a * inv_sinh2;
    v.dp = -2.0 * a * a * a * (sgn * coth) * inv_sinh2;
    v.zeta = -c * w + a * sgn * coth;
    // log sinh(s) = s + log(1 - e^{-2s}) - log 2 ; sinh(-s) = -sinh(s).
    cplx ls = s + std::log(one_m) - std::log(2.0) - std::log(a) - 0.5 * c * w * w;
    if (flip) ls += cplx(0.0, std::numbers::pi);
    v.log_sigma = ls;
    return v;
  }

  EllipticInvariants inv_;
  double pole_radius_;
  LatticeKind kind_;
  double c_ = 0.0;
  double a_ = 0.0;
  std::array<double, kTerms> coef_{};
  double series_radius_ = 0.0;
  double eta_ = 0.0;
  cplx eta_p_{};
};

// Free-function forms. Each builds a Weierstrass evaluator; prefer the class
// for repeated evaluation on one lattice.
inline cplx wp(cplx z, const EllipticInvariants& inv) { return Weierstrass(inv).p(z); }
inline cplx wp_prime(cplx z, const EllipticInvariants& inv) { return Weierstrass(inv).dp(z); }
inline cplx weier_zeta(cplx z, const EllipticInvariants& inv) { return Weierstrass(inv).zeta(z); }
inline cplx weier_sigma(cplx z, const EllipticInvariants& inv) { return Weierstrass(inv).sigma(z); }

/// |p'^2 - (4 p^3 - g2 p - g3)| at z.
inline double weierstrass_ode_residual(cplx z, const Weierstrass& w) {
  const auto v = w.evaluate(z);
  const auto& inv = w.invariants();
  return std::abs(v.dp * v.dp - (4.0 * v.p * v.p * v.p - inv.g2 * v.p - inv.g3));
}

inline double weierstrass_ode_residual(cplx z, const EllipticInvariants& inv) {
  return weierstrass_ode_residual(z, Weierstrass(inv));
}

enum class Branch { singular, regular };

/// |LHS - RHS| of the addition law
///   E(u+v) + f(u) + f(v) = 1/4 [(f'(u) - f'(v)) / (f(u) - f(v))]^2
/// with f = p (singular branch) or f(x) = p(x + i tau) (regular branch), and
/// E = p on the singular branch in both cases.
inline double addition_residual(double u, double v, const Weierstrass& w, Branch branch,
                                double degenerate_tol = 1e-8) {
  const cplx shift = branch == Branch::regular ? w.invariants().omega_prime() : cplx(0.0, 0.0);
  const auto fu = w.evaluate(cplx(u, 0.0) + shift);
  const auto fv = w.evaluate(cplx(v, 0.0) + shift);
  const cplx diff = fu.p - fv.p;
  if (std::abs(diff) < degenerate_tol) {
    throw DegeneratePairError("addition_residual: p(u) and p(v) coincide");
  }
  const cplx lhs = w.p(cplx(u + v, 0.0)) + fu.p + fv.p;
  const cplx q = (fu.dp - fv.dp) / diff;
  return std::abs(lhs - 0.25 * q * q);
}

inline double addition_residual(double u, double v, const EllipticInvariants& inv, Branch branch) {
  return addition_residual(u, v, Weierstrass(inv), branch);
}

/// Permitted regions of the "particle" phi moving under (phi')^2 = P(phi).
struct PortraitReport {
  double regular_lo = 0.0;  // [R] = [e3, e2], bounded oscillation
  double regular_hi = 0.0;
  double singular_lo = 0.0;  // [S] = [e1, +inf)
  bool infinite_period = false;    // e1 == e2: one-soliton well
  bool constant_regular = false;   // e2 == e3: regular branch frozen at e3
  double real_period = 0.0;        // 2 omega (inf when infinite_period)
};

inline PortraitReport classify_phase_portrait(double g2, double g3) {
  const EllipticInvariants inv = invariants_from_g(g2, g3);
  PortraitReport r;
  r.regular_lo = inv.e3;
  r.regular_hi = inv.e2;
  r.singular_lo = inv.e1;
  r.infinite_period = std::isinf(inv.omega);
  r.constant_regular = std::isinf(inv.tau);
  r.real_period = 2.0 * inv.omega;
  return r;
}

}  // namespace darboux
