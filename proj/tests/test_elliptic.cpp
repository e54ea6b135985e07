#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "darboux/elliptic.hpp"
#include "darboux/io.hpp"

using namespace darboux;

namespace {

// Reference values from tests/oracle/theta_oracle.py (mpmath, 30 digits).
struct LatticeRef {
  double m, omega, tau, eta;
};
constexpr LatticeRef kLattices[] = {
    {0.25, 1.6857503548125960429, 2.1565156474996432354, 0.48410783569874613045},
    {0.5, 1.8540746773013719184, 1.8540746773013719184, 0.4236065423969895433},
    {0.75, 2.1565156474996432354, 1.6857503548125960429, 0.31250784111027484337},
};

std::vector<cplx> sample_points(int count) {
  std::vector<cplx> out;
  for (int i = 0; i < count; ++i) {
    // Deterministic scatter inside the period cell, away from the origin.
    const double a = 0.37 + 1.1 * std::sin(1.3 * i + 0.2);
    const double b = 0.21 + 0.9 * std::cos(0.7 * i + 0.5);
    out.emplace_back(a, b);
  }
  return out;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Invariants, HalfModulusRootsAndInvariants) {
  const auto inv = invariants_from_modulus(0.5);
  EXPECT_NEAR(inv.g2, 1.0, 1e-14);
  EXPECT_NEAR(inv.g3, 0.0, 1e-14);
  EXPECT_NEAR(inv.e1, 0.5, 1e-14);
  EXPECT_NEAR(inv.e2, 0.0, 1e-14);
  EXPECT_NEAR(inv.e3, -0.5, 1e-14);
  EXPECT_EQ(inv.kind(), LatticeKind::generic);
}

TEST(Invariants, DegenerateModuli) {
  const auto one = invariants_from_modulus(1.0);
  EXPECT_NEAR(one.e1, 1.0 / 3, 1e-14);
  EXPECT_NEAR(one.e2, 1.0 / 3, 1e-14);
  EXPECT_NEAR(one.e3, -2.0 / 3, 1e-14);
  EXPECT_TRUE(one.one_soliton());
  const auto zero = invariants_from_modulus(0.0);
  EXPECT_NEAR(zero.e1, 2.0 / 3, 1e-14);
  EXPECT_NEAR(zero.e2, -1.0 / 3, 1e-14);
  EXPECT_NEAR(zero.e3, -1.0 / 3, 1e-14);
  EXPECT_EQ(zero.kind(), LatticeKind::trigonometric);
}

TEST(Invariants, FrozenHalfPeriods) {
  for (const auto& r : kLattices) {
    const auto inv = invariants_from_modulus(r.m);
    EXPECT_NEAR(inv.omega, r.omega, 1e-13) << "m=" << r.m;
    EXPECT_NEAR(inv.tau, r.tau, 1e-13) << "m=" << r.m;
    EXPECT_NEAR(Weierstrass(inv).eta(), r.eta, 1e-12) << "m=" << r.m;
  }
}

TEST(Invariants, FromG2G3RoundTrip) {
  const auto a = invariants_from_modulus(0.3);
  const auto b = invariants_from_g(a.g2, a.g3);
  EXPECT_NEAR(a.e1, b.e1, 1e-13);
  EXPECT_NEAR(a.e3, b.e3, 1e-13);
  EXPECT_NEAR(a.omega, b.omega, 1e-12);
}

TEST(Weierstrass, OracleValues) {
  const Weierstrass w(invariants_from_modulus(0.5));
  EXPECT_NEAR(w.p(1.0).real(), 1.0508397910402370184, 1e-12);
  EXPECT_NEAR(w.zeta(0.8).real(), 1.2414416504027365087, 1e-12);
  EXPECT_NEAR(w.sigma(1.2).real(), 1.1896000221350905654, 1e-12);
  EXPECT_LT(rel(w.zeta({0.7, 0.3}), {1.2043467531211333449, -0.52414670285241395607}), 1e-12);
  const Weierstrass w25(invariants_from_modulus(0.25));
  EXPECT_LT(rel(w25.p({0.7, 0.3}), {1.2104779146742340776, -1.2236960587979938445}), 1e-12);
  const Weierstrass w75(invariants_from_modulus(0.75));
  EXPECT_LT(rel(w75.sigma({0.5, 0.2}), {0.50006435691350431978, 0.19980788848825875136}), 1e-12);
}

TEST(Weierstrass, ValuesAtHalfPeriodsAreRoots) {
  const auto inv = invariants_from_modulus(0.5);
  const Weierstrass w(inv);
  const cplx om(inv.omega, 0.0), tp(0.0, inv.tau);
  EXPECT_NEAR(std::abs(w.p(om) - inv.e1), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(w.p(om + tp) - inv.e2), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(w.p(tp) - inv.e3), 0.0, 1e-12);
  EXPECT_LT(std::abs(w.dp(om)), 1e-11);
  EXPECT_LT(std::abs(w.dp(om + tp)), 1e-11);
  EXPECT_LT(std::abs(w.dp(tp)), 1e-11);
}

TEST(Weierstrass, LaurentLimits) {
  const Weierstrass w(invariants_from_modulus(0.5));
  const cplx z(1e-3, 2e-4);
  EXPECT_NEAR(std::abs(w.p(z) * z * z - 1.0), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(w.dp(z) * z * z * z + 2.0), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(w.sigma(z) / z - 1.0), 0.0, 1e-12);
}

TEST(Weierstrass, PoleWithinRadiusThrows) {
  const auto inv = invariants_from_modulus(0.5);
  const Weierstrass w(inv);
  EXPECT_THROW(w.p(cplx(1e-8, 0.0)), PoleError);
  EXPECT_THROW(w.p(cplx(2.0 * inv.omega, 1e-9)), PoleError);
  EXPECT_EQ(w.sigma(0.0), cplx(0.0, 0.0));
}

TEST(Weierstrass, OdeResidual) {
  for (double m : {0.25, 0.5, 0.75}) {
    const Weierstrass w(invariants_from_modulus(m));
    for (const cplx z : sample_points(200)) EXPECT_LT(weierstrass_ode_residual(z, w), 1e-9) << z;
  }
  const Weierstrass w(invariants_from_modulus(0.5));
  EXPECT_LT(weierstrass_ode_residual({0.7, 0.3}, w), 1e-10);
  EXPECT_LT(weierstrass_ode_residual(0.5 * w.invariants().omega, w), 1e-10);
  EXPECT_LT(weierstrass_ode_residual({0.3, 0.9}, w), 1e-10);
}

TEST(Weierstrass, OdeResidualDegenerateKinds) {
  for (double m : {0.0, 1.0}) {
    const Weierstrass w(invariants_from_modulus(m));
    for (const cplx z : sample_points(50)) EXPECT_LT(weierstrass_ode_residual(z, w), 1e-9) << "m=" << m << z;
  }
}

TEST(Weierstrass, Parity) {
  const Weierstrass w(invariants_from_modulus(0.5));
  for (const cplx z : sample_points(50)) {
    EXPECT_LT(std::abs(w.p(-z) - w.p(z)), 1e-10);
    EXPECT_LT(std::abs(w.dp(-z) + w.dp(z)), 1e-10);
    EXPECT_LT(std::abs(w.zeta(-z) + w.zeta(z)), 1e-10);
    EXPECT_LT(std::abs(w.sigma(-z) + w.sigma(z)), 1e-10);
  }
}

TEST(Weierstrass, Periodicity) {
  const auto inv = invariants_from_modulus(0.5);
  const Weierstrass w(inv);
  const cplx two_w(2.0 * inv.omega, 0.0), two_t(0.0, 2.0 * inv.tau);
  const cplx shift = w.zeta(cplx(0.4, 0.1) + two_w) - w.zeta({0.4, 0.1});
  EXPECT_LT(std::abs(shift - 2.0 * w.eta()), 1e-10);
  for (const cplx z : sample_points(50)) {
    EXPECT_LT(std::abs(w.p(z + two_w) - w.p(z)), 1e-9);
    EXPECT_LT(std::abs(w.p(z + two_t) - w.p(z)), 1e-9);
    EXPECT_LT(std::abs(w.zeta(z + two_w) - w.zeta(z) - shift), 1e-10);
  }
}

TEST(Weierstrass, LegendreRelation) {
  for (const auto& r : kLattices) {
    const auto inv = invariants_from_modulus(r.m);
    const Weierstrass w(inv);
    // eta omega' - eta' omega = i pi / 2
    const cplx lhs = w.eta() * inv.omega_prime() - w.eta_prime() * inv.omega;
    EXPECT_LT(std::abs(lhs - cplx(0.0, 0.5 * std::numbers::pi)), 1e-12) << "m=" << r.m;
  }
}

TEST(Weierstrass, DerivativeChainConvergesAtSecondOrder) {
  const Weierstrass w(invariants_from_modulus(0.5));
  const cplx z(0.5, 0.2);
  auto zeta_err = [&](double h) { return std::abs((w.zeta(z + h) - w.zeta(z - h)) / (2 * h) + w.p(z)); };
  auto sigma_err = [&](double h) {
    return std::abs((w.log_sigma(z + h) - w.log_sigma(z - h)) / (2 * h) - w.zeta(z));
  };
  const double h = 1e-2;
  EXPECT_NEAR(std::log2(zeta_err(h) / zeta_err(h / 2)), 2.0, 0.2);
  EXPECT_NEAR(std::log2(sigma_err(h) / sigma_err(h / 2)), 2.0, 0.2);
  EXPECT_LT(sigma_err(1e-5), 1e-8);
}

TEST(Jacobi, DegenerateModuli) {
  for (double x : {-2.0, -0.3, 0.4, 1.7, 5.0}) {
    EXPECT_NEAR(jacobi_sn(x, 0.0), std::sin(x), 1e-14);
    EXPECT_NEAR(jacobi_sn(x, 1.0), std::tanh(x), 1e-14);
  }
  EXPECT_NEAR(jacobi_sn(complete_elliptic_k(0.5), 0.5), 1.0, 1e-14);
}

TEST(Lame, IdentityAtSamplePoint) {
  const LameSystem sys = make_lame(0.5);
  const Weierstrass w(sys.inv);
  const double sn = jacobi_sn(0.9, 0.5);
  const cplx rhs = w.p(cplx(0.9, sys.inv.tau)) + (0.5 + 1.0) / 3.0;
  EXPECT_LT(std::abs(0.5 * sn * sn - rhs), 1e-10);
}

TEST(Lame, IdentityOnGrid) {
  for (double m : {0.25, 0.5, 0.75}) {
    const LameSystem sys = make_lame(m);
    const Weierstrass w(sys.inv);
    double worst = 0.0;
    for (int i = 0; i < 2001; ++i) {
      const double x = -3 * sys.inv.omega + 6 * sys.inv.omega * i / 2000.0;
      worst = std::max(worst, std::abs(lame_potential(x, sys) - w.p(cplx(x, sys.inv.tau))));
    }
    EXPECT_LT(worst, 1e-9) << "m=" << m;
  }
}

TEST(Lame, RangeAndTurningPoints) {
  const LameSystem sys = make_lame(0.5);
  EXPECT_NEAR(lame_potential(0.0, sys), sys.inv.e3, 1e-15);
  EXPECT_NEAR(lame_potential(sys.inv.omega, sys), sys.inv.e2, 1e-13);
  EXPECT_DOUBLE_EQ(sys.E0, -0.25);
  EXPECT_DOUBLE_EQ(sys.E1, 0.0);
  EXPECT_DOUBLE_EQ(sys.E1p, 0.25);
  const double h = 1e-5;
  const double fd = (lame_potential(0.6 + h, sys) - lame_potential(0.6 - h, sys)) / (2 * h);
  EXPECT_NEAR(lame_potential_derivative(0.6, sys), fd, 1e-8);
}

TEST(Addition, BothBranchesAtSamplePair) {
  const Weierstrass w(invariants_from_modulus(0.5));
  EXPECT_LT(addition_residual(0.6, 0.9, w, Branch::singular), 1e-9);
  EXPECT_LT(addition_residual(0.6, 0.9, w, Branch::regular), 1e-9);
  EXPECT_THROW(addition_residual(0.6, 0.6, w, Branch::singular), DegeneratePairError);
}

TEST(PhasePortrait, Regions) {
  const auto r = classify_phase_portrait(1.0, 0.0);
  EXPECT_NEAR(r.regular_lo, -0.5, 1e-14);
  EXPECT_NEAR(r.regular_hi, 0.0, 1e-14);
  EXPECT_NEAR(r.singular_lo, 0.5, 1e-14);
  EXPECT_FALSE(r.infinite_period);
  const auto one = invariants_from_modulus(1.0);
  EXPECT_TRUE(classify_phase_portrait(one.g2, one.g3).infinite_period);
  const auto zero = invariants_from_modulus(0.0);
  EXPECT_TRUE(classify_phase_portrait(zero.g2, zero.g3).constant_regular);
}

TEST(Golden, BundledSampleMatches) {
  const auto recs = io::read_golden(std::string(DARBOUX_TEST_DATA) + "/golden_sample.jsonl");
  ASSERT_FALSE(recs.empty());
  for (const auto& r : recs) EXPECT_LT(io::golden_error(r), 1e-12) << r.fn << " m=" << r.m << " z=" << r.z;
}

TEST(Golden, ExternalVectors) {
  const char* path = std::getenv("DARBOUX_GOLDEN");
  if (!path || !*path) GTEST_SKIP() << "DARBOUX_GOLDEN not set";
  const auto recs = io::read_golden(std::string(path));
  ASSERT_FALSE(recs.empty());
  for (const auto& r : recs) EXPECT_LT(io::golden_error(r), 1e-12) << r.fn << " m=" << r.m << " z=" << r.z;
}
