#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "darboux/elliptic.hpp"
#include "darboux/errors.hpp"
#include "darboux/sampled.hpp"

namespace darboux {

/// epsilon(delta) = -p(delta)/2 on the singular branch.
inline double factorization_energy(cplx delta, const Weierstrass& w) {
  const cplx e = -0.5 * w.p(delta);
  if (std::abs(e.imag()) > 1e-10) {
    throw NonRealEnergyError("factorization energy has imaginary part " + std::to_string(e.imag()));
  }
  return e.real();
}

inline double factorization_energy(cplx delta, const LameSystem& sys) {
  return factorization_energy(delta, Weierstrass(sys.inv));
}

inline PotentialFunction lame_function(const LameSystem& sys) {
  return {[sys](double x) { return lame_potential(x, sys); },
          [sys](double x) { return lame_potential_derivative(x, sys); },
          std::isfinite(sys.inv.omega) ? std::optional<double>(sys.period()) : std::nullopt,
          "lame"};
}

inline PotentialFunction shifted(const PotentialFunction& v, double delta) {
  return {[v, delta](double x) { return v.value(x + delta); },
          [v, delta](double x) { return v.derivative(x + delta); }, v.period, v.label + " shifted"};
}

enum class SuperpotentialForm { sqrt_form, zeta_form, general_form };

/// One superpotential alpha(x) of the Lame system, solving
/// -alpha' + alpha^2 = 2 (V - epsilon).
///
///   sqrt_form:     sign * sqrt(V(x) + V(x+delta) - 2 epsilon), delta real
///   zeta_form:     zeta(x^) - zeta(x^ + delta) + zeta(delta), x^ = x + i tau
///   general_form:  (a - b t) / (1 - t), a = alpha(x, delta), b = alpha(x, -delta),
///                  t = Gamma R(x), R = sigma(x^-delta)/sigma(x^+delta) e^{2 zeta(delta) x}
///                  normalized to R(0) = 1.
class Superpotential {
 public:
  struct Jet {
    cplx value;
    cplx d1;
    cplx d2;
    bool has_d2 = false;
  };

  static Superpotential sqrt_form(const LameSystem& sys, double delta, int sign = 1) {
    if (sign != 1 && sign != -1) throw DomainError("sqrt_form: sign must be +1 or -1");
    Superpotential s(sys, cplx(delta, 0.0), SuperpotentialForm::sqrt_form);
    s.sign_ = sign;
    return s;
  }

  static Superpotential zeta_form(const LameSystem& sys, cplx delta) {
    Superpotential s(sys, delta, SuperpotentialForm::zeta_form);
    s.init_zeta_constant();
    return s;
  }

  static Superpotential general(const LameSystem& sys, cplx delta, cplx gamma) {
    Superpotential s(sys, delta, SuperpotentialForm::general_form);
    s.gamma_ = gamma;
    s.init_zeta_constant();
    s.log_r0_ = s.log_r_raw(0.0);
    return s;
  }

  cplx delta() const noexcept { return delta_; }
  double epsilon() const noexcept { return eps_; }
  cplx gamma() const noexcept { return gamma_; }
  SuperpotentialForm form() const noexcept { return form_; }
  int sign() const noexcept { return sign_; }
  const LameSystem& system() const noexcept { return sys_; }
  const Weierstrass& weierstrass() const noexcept { return w_; }
  /// Constant added to the zeta form to enforce the Riccati relation (zero in exact arithmetic).
  cplx zeta_correction() const noexcept { return corr_; }

  cplx operator()(double x) const { return jet(x).value; }

  Jet jet(double x) const {
    switch (form_) {
      case SuperpotentialForm::sqrt_form:
        return sqrt_jet(x);
      case SuperpotentialForm::zeta_form:
        return zeta_jet(x, delta_, corr_);
      case SuperpotentialForm::general_form:
        return general_jet(x, 1e-10);
    }
    return {};
  }

  /// Second derivative: analytic for the zeta form, 5-point stencil of alpha' otherwise.
  cplx second_derivative(double x, double h = 1e-3) const {
    const Jet j = jet(x);
    if (j.has_d2) return j.d2;
    auto d1 = [&](double y) { return jet(y).d1; };
    return (d1(x - 2 * h) - 8.0 * d1(x - h) + 8.0 * d1(x + h) - d1(x + 2 * h)) / (12.0 * h);
  }

  /// t(x) = Gamma R(x) of the general form.
  cplx tilde_alpha(double x) const {
    if (form_ != SuperpotentialForm::general_form) return 0.0;
    return gamma_ * std::exp(log_r_raw(x) - log_r0_);
  }

  /// Real samples of alpha and alpha' on a grid. Points within the pole radius or
  /// with |1 - t| < guard are excluded (NaN) and listed in `guarded`.
  SuperpotentialSamples sample(const Grid& g, double guard = 1e-6) const {
    SuperpotentialSamples s{g, std::vector<double>(g.n), std::vector<double>(g.n), {}, 0.0};
    double im_lo = std::numeric_limits<double>::infinity();
    double im_hi = -im_lo;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < g.n; ++i) {
      const double x = g.x(i);
      Jet j;
      try {
        j = form_ == SuperpotentialForm::general_form ? general_jet(x, guard) : jet(x);
      } catch (const PoleError&) {
        s.value[i] = s.derivative[i] = nan;
        s.guarded.push_back(i);
        continue;
      } catch (const SingularTransformationError&) {
        s.value[i] = s.derivative[i] = nan;
        s.guarded.push_back(i);
        continue;
      }
      s.value[i] = j.value.real();
      s.derivative[i] = j.d1.real();
      // Near poles the imaginary round-off scales with |alpha|.
      const double im = j.value.imag() / std::max(1.0, std::abs(j.value));
      im_lo = std::min(im_lo, im);
      im_hi = std::max(im_hi, im);
    }
    s.imag_spread = im_hi > im_lo ? im_hi - im_lo : 0.0;
    if (s.imag_spread > 1e-8) {
      throw BranchError("superpotential imaginary part is not constant (spread " +
                        std::to_string(s.imag_spread) + ")");
    }
    return s;
  }

  /// Abscissae where alpha has a pole on the grid: zeros of 1 - t for the
  /// general form, real-axis lattice points for the zeta form.
  std::vector<double> singularities(const Grid& g) const {
    const SuperpotentialSamples s = sample(g);
    return pole_abscissae(g, s.value);
  }

 private:
  Superpotential(const LameSystem& sys, cplx delta, SuperpotentialForm form)
      : sys_(sys), w_(sys.inv), delta_(delta), form_(form) {
    eps_ = factorization_energy(delta, w_);
  }

  bool trig() const noexcept { return std::isinf(sys_.inv.tau); }
  cplx shift() const noexcept { return {0.0, sys_.inv.tau}; }

  // zeta(x^) - zeta(x^ + d) with its x-derivative and second derivative.
  struct Diff {
    cplx value;
    cplx d1;
    cplx d2;
  };
  Diff zeta_diff(double x, cplx d) const {
    if (trig()) return {sys_.inv.e3 * d, 0.0, 0.0};
    const cplx xh = cplx(x, 0.0) + shift();
    const auto u = w_.evaluate(xh);
    const auto v = w_.evaluate(xh + d);
    return {u.zeta - v.zeta, v.p - u.p, v.dp - u.dp};
  }

  Jet zeta_jet(double x, cplx d, cplx corr) const {
    const Diff df = zeta_diff(x, d);
    return {df.value + w_.zeta(d) + corr, df.d1, df.d2, true};
  }

  void init_zeta_constant() {
    // Enforce alpha^2 = V(x) + V(x+delta) - 2 epsilon at one reference point.
    const double xs = std::isfinite(sys_.inv.omega) ? sys_.inv.omega / 3.0 : 1.0 / 3.0;
    const cplx a = zeta_jet(xs, delta_, 0.0).value;
    cplx rad;
    if (trig()) {
      rad = 2.0 * sys_.inv.e3 - 2.0 * eps_;
    } else {
      const cplx xh = cplx(xs, 0.0) + shift();
      rad = w_.p(xh) + w_.p(xh + delta_) - 2.0 * eps_;
    }
    if (std::abs(a * a - rad) <= 1e-9 * std::max(1.0, std::abs(rad))) return;
    // Pick the root of rad closest to the uncorrected value.
    cplx r = std::sqrt(rad);
    if (std::abs(r - a) > std::abs(-r - a)) r = -r;
    corr_ = r - a;
  }

  cplx log_r_raw(double x) const {
    if (trig()) return 2.0 * (w_.zeta(delta_) + sys_.inv.e3 * delta_) * x;
    const cplx xh = cplx(x, 0.0) + shift();
    return w_.log_sigma(xh - delta_) - w_.log_sigma(xh + delta_) + 2.0 * w_.zeta(delta_) * x;
  }

  Jet general_jet(double x, double guard) const {
    const Jet a = zeta_jet(x, delta_, corr_);
    if (gamma_ == cplx(0.0, 0.0)) return a;
    const Jet bj = zeta_jet(x, -delta_, -corr_);
    const cplx b = bj.value;
    const cplx log_t = std::log(gamma_) + log_r_raw(x) - log_r0_;
    const cplx ab = a.value - b;
    Jet out;
    if (log_t.real() <= 0.0) {
      const cplx t = std::exp(log_t);
      const cplx den = 1.0 - t;
      if (std::abs(den) < guard) throw SingularTransformationError("1 - t vanishes", {x});
      out.value = (a.value - b * t) / den;
      out.d1 = (a.d1 - bj.d1 * t) / den + t * ab * ab / (den * den);
    } else {
      const cplx u = std::exp(-log_t);
      const cplx den = u - 1.0;
      if (std::abs(den) < guard * std::abs(u)) throw SingularTransformationError("1 - t vanishes", {x});
      out.value = (a.value * u - b) / den;
      out.d1 = (a.d1 * u - bj.d1) / den + u * ab * ab / (den * den);
    }
    return out;
  }

  Jet sqrt_jet(double x) const {
    const double d = delta_.real();
    const double v0 = lame_potential(x, sys_);
    const double v1 = lame_potential(x + d, sys_);
    double rad = v0 + v1 - 2.0 * eps_;
    if (rad < -1e-12) {
      throw ConsistencyError("sqrt_form: negative radicand " + std::to_string(rad) + " at x = " +
                             std::to_string(x));
    }
    rad = std::max(rad, 0.0);
    const double alpha = sign_ * std::sqrt(rad);
    const double dv = lame_potential_derivative(x, sys_) + lame_potential_derivative(x + d, sys_);
    return {alpha, alpha != 0.0 ? dv / (2.0 * alpha) : std::numeric_limits<double>::infinity(), 0.0,
            false};
  }

  LameSystem sys_;
  Weierstrass w_;
  cplx delta_;
  double eps_ = 0.0;
  cplx gamma_{};
  SuperpotentialForm form_;
  int sign_ = 1;
  cplx corr_{};
  cplx log_r0_{};
};

inline double superpotential_sqrt(double x, double delta, const LameSystem& sys, int sign = 1) {
  return Superpotential::sqrt_form(sys, delta, sign)(x).real();
}

inline cplx superpotential_zeta(double x, cplx delta, const LameSystem& sys) {
  return Superpotential::zeta_form(sys, delta)(x);
}

/// General-form solution at one point; throws SingularTransformationError when
/// |1 - t| < 1e-10.
inline double general_riccati_solution(double x, double delta, cplx gamma, const LameSystem& sys) {
  return Superpotential::general(sys, delta, gamma)(x).real();
}

}  // namespace darboux
