#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "homog/core/multi_index.hpp"
#include "homog/core/shift.hpp"
#include "homog/core/symbol.hpp"

using namespace homog;

namespace {

constexpr double pi = std::numbers::pi;

// (xi_1 + i xi_2) as a 1x1 symbol in d = 2.
Symbol cauchy_riemann() {
  CMatrix a = CMatrix::Ones(1, 1), b = CMatrix::Constant(1, 1, cplx(0.0, 1.0));
  return Symbol(2, 1, 1, 1, {{MultiIndex{1, 0}, a}, {MultiIndex{0, 1}, b}});
}

}  // namespace

TEST(MultiIndex, OrderAndPartialOrder) {
  MultiIndex a{2, 1, 0};
  EXPECT_EQ(a.order(), 3);
  EXPECT_TRUE(MultiIndex({1, 1, 0}).le(a));
  EXPECT_FALSE(MultiIndex({0, 2, 0}).le(a));
  EXPECT_THROW(MultiIndex({-1}), DomainError);
  EXPECT_EQ((a + MultiIndex{0, 0, 4}).order(), 7);
}

TEST(MultiIndex, Enumeration) {
  auto lvl = multi_indices_of_order(2, 2);
  ASSERT_EQ(lvl.size(), 3u);
  EXPECT_EQ(lvl[0], (MultiIndex{2, 0}));
  EXPECT_EQ(lvl[1], (MultiIndex{1, 1}));
  EXPECT_EQ(lvl[2], (MultiIndex{0, 2}));
  EXPECT_EQ(multi_indices_up_to(2, 2).size(), 6u);
  EXPECT_EQ(multi_indices_of_order(3, 2).size(), 6u);
}

TEST(Symbol, Invariants) {
  EXPECT_THROW(Symbol(1, 1, 1, 2, {}), DomainError);
  EXPECT_THROW(Symbol(1, 2, 1, 1, {{MultiIndex{1}, CMatrix::Ones(1, 1)}}), DomainError);
  EXPECT_THROW(Symbol(1, 1, 1, 1, {{MultiIndex{1}, CMatrix::Ones(2, 1)}}), DimensionError);
  Symbol b = Symbol::power_1d(1);
  EXPECT_THROW(b.set_ellipticity({2.0, 1.0, true}), DomainError);
}

TEST(SymbolEval, PowerHessianGradient) {
  RVector xi(1);
  xi << 2.0;
  EXPECT_NEAR(std::abs(symbol_eval(Symbol::power_1d(2), xi)(0, 0) - 4.0), 0.0, 1e-15);

  RVector x2(2);
  x2 << 3.0, 4.0;
  CMatrix g = symbol_eval(Symbol::gradient(2), x2);
  EXPECT_EQ(g.rows(), 2);
  EXPECT_NEAR(std::abs(g(0, 0) - 3.0) + std::abs(g(1, 0) - 4.0), 0.0, 1e-15);

  x2 << 1.0, 1.0;
  CMatrix h = symbol_eval(Symbol::hessian_2d(), x2);
  // oracle: (xi1^2, sqrt2 xi1 xi2, xi2^2)
  EXPECT_NEAR(std::abs(h(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(h(1, 0) - std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(h(2, 0) - 1.0), 0.0, 1e-15);

  CVector bad(3);
  EXPECT_THROW(symbol_eval(Symbol::gradient(2), bad), DimensionError);
}

TEST(SymbolEval, Homogeneity) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  for (const Symbol& b : {Symbol::hessian_2d(), Symbol::gradient(2), cauchy_riemann()}) {
    for (int t = 0; t < 20; ++t) {
      RVector xi(2);
      xi << n(rng), n(rng);
      const double s = std::exp(n(rng));
      const CMatrix lhs = symbol_eval(b, RVector(s * xi));
      const CMatrix rhs = std::pow(s, b.order()) * symbol_eval(b, xi);
      EXPECT_LE((lhs - rhs).norm(), 1e-12 * std::max(1.0, rhs.norm()));
    }
  }
}

TEST(Ellipticity, KnownSymbols) {
  for (const Symbol& b : {Symbol::gradient(2), Symbol::hessian_2d(), Symbol::power_1d(1), Symbol::power_1d(3)}) {
    const Ellipticity e = symbol_ellipticity(b, default_sphere_samples(b.dim()));
    EXPECT_NEAR(e.alpha0, 1.0, 1e-12);
    EXPECT_NEAR(e.alpha1, 1.0, 1e-12);
    EXPECT_TRUE(e.rank_ok);
  }
  EXPECT_THROW(symbol_ellipticity(Symbol::gradient(2), 0), DomainError);
}

TEST(Ellipticity, EnclosesSampledEigenvalues) {
  CMatrix a(2, 1), c(2, 1);
  a << 2.0, 0.5;
  c << 0.0, 1.0;
  Symbol b(2, 1, 2, 1, {{MultiIndex{1, 0}, a}, {MultiIndex{0, 1}, c}});
  const Ellipticity e = symbol_ellipticity(b, 4096);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int t = 0; t < 200; ++t) {
    RVector th(2);
    th << n(rng), n(rng);
    th.normalize();
    const CMatrix bt = symbol_eval(b, th);
    const double v = (bt.adjoint() * bt)(0, 0).real();
    EXPECT_GE(v, e.alpha0 - 1e-5);
    EXPECT_LE(v, e.alpha1 + 1e-5);
  }
}

TEST(ComplexRank, Examples) {
  EXPECT_TRUE(complex_rank_check(Symbol::power_1d(2)));
  EXPECT_TRUE(complex_rank_check(Symbol::gradient(2)));
  EXPECT_FALSE(complex_rank_check(cauchy_riemann()));
  EXPECT_THROW(complex_rank_check(Symbol::gradient(2), 0), DomainError);
}

TEST(CPhi, Branches) {
  EXPECT_DOUBLE_EQ(c_of_phi(pi), 1.0);
  EXPECT_NEAR(c_of_phi(pi / 4), std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(c_of_phi(pi / 2), 1.0);
  EXPECT_THROW(c_of_phi(0.0), DomainError);
  EXPECT_THROW(c_of_phi(2 * pi), DomainError);
  for (double phi = 0.05; phi < 2 * pi; phi += 0.1) {
    EXPECT_NEAR(c_of_phi(phi), c_of_phi(2 * pi - phi), 1e-12);
    EXPECT_GE(c_of_phi(phi), 1.0);
  }
}

TEST(ShiftData, Make) {
  EXPECT_FALSE(Shift::make(2.0).phi.has_value());
  const Shift s = Shift::make(-1.0);
  ASSERT_TRUE(s.c_phi.has_value());
  EXPECT_DOUBLE_EQ(*s.c_phi, 1.0);
  EXPECT_NEAR(*s.phi, pi, 1e-15);
  const Shift t = Shift::make(cplx(1.0, 1.0));
  EXPECT_NEAR(*t.c_phi, std::sqrt(2.0), 1e-12);
}

TEST(RhoFlat, Examples) {
  const double cf = 0.9;
  EXPECT_NEAR(rho_flat(cf - 1.0, cf), 1.0, 1e-14);
  EXPECT_NEAR(rho_flat(cf - 0.5, cf), 4.0, 1e-14);
  EXPECT_NEAR(rho_flat(cplx(cf, 0.1), cf), 100.0, 1e-10);
  EXPECT_THROW(rho_flat(cf + 0.3, cf), DomainError);
  EXPECT_THROW(rho_flat(-1.0, 0.0), DomainError);
}

TEST(RhoFlat, ContinuousAtUnitCircleOnNegativeRay) {
  const double cf = 2.0;
  EXPECT_NEAR(rho_flat(cf - (1.0 - 1e-9), cf), rho_flat(cf - (1.0 + 1e-9), cf), 1e-8);
}
