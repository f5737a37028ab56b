#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "homog/cell/cell_problem.hpp"
#include "homog/neumann/studies.hpp"
#include "homog/torus/coefficient_library.hpp"

using namespace homog;

namespace {

constexpr double pi = std::numbers::pi;
const Lattice unit({1.0});
const Interval I01{0.0, 1.0};
const std::vector<double> eps_list{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};

CoefficientG const_g(double v, const Lattice& lat = unit) { return CoefficientG::constant(lat, {16}, CMatrix::Constant(1, 1, v)); }

CoefficientG two_phase_1d(double a = 1.0, double b = 4.0) { return two_phase(unit, {64}, a, b); }

CoefficientG smooth_g() {
  return CoefficientG::from_function(unit, {64}, 1, [](const RVector& y) {
    return CMatrix::Constant(1, 1, 1.0 / (2.0 + std::sin(2 * pi * y(0))));
  });
}

CoefFn as_fn(const CoefficientG& g) {
  return [g](const RVector& x) { return g.at(x); };
}

double hermitian_defect(const SpMat& A) { return CMatrix(CMatrix(A) - CMatrix(A).adjoint()).cwiseAbs().maxCoeff(); }

CVector random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> N;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(N(rng), N(rng));
  return v;
}

NeumannProblem two_phase_problem(int p) {
  NeumannProblem pb;
  pb.g = two_phase_1d();
  pb.b = Symbol::power_1d(p);
  pb.F = [](double x) { return cplx(std::cos(pi * x) + x); };
  return pb;
}

}  // namespace

TEST(GalerkinSpace, PartitionOfUnity) {
  std::vector<GalerkinSpace> spaces;
  for (int q = 1; q <= 5; ++q) spaces.push_back(GalerkinSpace::bspline({-0.5, 2.0}, q, 7, {0.3, 1.17}, std::max(0, q - 2)));
  spaces.push_back(GalerkinSpace::q1({0.0, 2.0, -1.0, 0.5}, 5, 3));
  for (const auto& sp : spaces) {
    sp.for_each_point(1, {}, [&](const PointData& pd) {
      double s = 0.0, ds = 0.0;
      for (std::size_t j = 0; j < pd.dofs.size(); ++j) {
        s += pd.D[0][j];
        ds += pd.D[1][j];
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
      EXPECT_NEAR(ds, 0.0, 1e-10);
    });
  }
}

TEST(GalerkinSpace, Conformity) {
  EXPECT_TRUE(GalerkinSpace::bspline(I01, 3, 8, {0.5}, 1).conforming(2));
  EXPECT_FALSE(GalerkinSpace::bspline(I01, 3, 8, {0.5}, 0).conforming(2));
  EXPECT_TRUE(GalerkinSpace::q1({}, 4, 4).conforming(1));
  EXPECT_FALSE(GalerkinSpace::q1({}, 4, 4).conforming(2));
}

TEST(GalerkinSpace, InterpolationReproducesPolynomials) {
  const auto sp = GalerkinSpace::bspline(I01, 3, 5);
  const CVector c = sp.interpolate_1d([](double x) { return cplx(x * x * x - 2 * x, x); });
  for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    const auto v = sp.eval_1d(c, x, 2);
    EXPECT_NEAR(std::abs(v[0] - cplx(x * x * x - 2 * x, x)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(v[1] - cplx(3 * x * x - 2, 1.0)), 0.0, 1e-11);
    EXPECT_NEAR(std::abs(v[2] - cplx(6 * x, 0.0)), 0.0, 1e-10);
  }
}

TEST(Assemble, TextbookLaplacian) {
  const int n = 8;
  const double h = 1.0 / n;
  const auto sp = GalerkinSpace::bspline(I01, 1, n);
  const Assembled A = assemble(sp, as_fn(const_g(1.0)), Symbol::power_1d(1));
  CMatrix S = CMatrix::Zero(n + 1, n + 1), M = S;
  for (int e = 0; e < n; ++e) {
    S(e, e) += 1 / h, S(e + 1, e + 1) += 1 / h, S(e, e + 1) -= 1 / h, S(e + 1, e) -= 1 / h;
    M(e, e) += h / 3, M(e + 1, e + 1) += h / 3, M(e, e + 1) += h / 6, M(e + 1, e) += h / 6;
  }
  EXPECT_LT((CMatrix(A.stiffness) - S).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((CMatrix(A.mass) - M).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Assemble, ConstantsAreNullAndStiffnessHermitian) {
  const double eps = 1.0 / 8;
  const auto sp = GalerkinSpace::bspline(I01, 2, 256);
  AssemblyOptions opt;
  opt.period = eps;
  const CoefficientG g = two_phase_1d();
  const Assembled A = assemble(sp, [&](const RVector& x) { return g.at(x / eps); }, Symbol::power_1d(1), opt);
  EXPECT_LT((A.stiffness * CVector::Ones(sp.dof_count())).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(hermitian_defect(A.stiffness), 1e-12);
  EXPECT_LT(hermitian_defect(A.mass), 1e-14);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<CMatrix>(CMatrix(A.mass)).eigenvalues().minCoeff(), 0.0);
}

TEST(Assemble, UnderResolvedQuadratureIsRefused) {
  const auto sp = GalerkinSpace::bspline(I01, 2, 8);
  AssemblyOptions opt;
  opt.period = 1.0 / 64;
  opt.max_subdivisions = 2;
  EXPECT_THROW(assemble(sp, as_fn(const_g(1.0)), Symbol::power_1d(1), opt), DomainError);
}

TEST(Garding, GradientOnQ1) {
  const auto sp = GalerkinSpace::q1({0.0, 1.0, 0.0, 1.0}, 6, 6);
  const GardingResult r = estimate_garding(sp, Symbol::gradient(2));
  EXPECT_NEAR(r.k1, 1.0, 1e-8);
  EXPECT_DOUBLE_EQ(r.k2, 1.0);
}

TEST(Garding, PowerSymbolFeasibleOnRandomVectors) {
  for (int p : {1, 2, 3}) {
    const auto sp = GalerkinSpace::bspline(I01, p + 1, 12);
    const Symbol b = Symbol::power_1d(p);
    const GardingResult r = estimate_garding(sp, b);
    ASSERT_TRUE(std::isfinite(r.k1));
    const Assembled A = assemble_constant(sp, CMatrix::Identity(1, 1), b);
    const SpMat G = hs_gram(sp, p);
    for (unsigned s = 0; s < 200; ++s) {
      const CVector v = random_vector(sp.dof_count(), s);
      const double lhs = v.dot(G * v).real();
      const double rhs = r.k1 * v.dot(A.stiffness * v).real() + r.k2 * v.dot(A.mass * v).real();
      EXPECT_LE(lhs, rhs * (1 + 1e-9));
    }
  }
}

TEST(Garding, ScaledSymbol) {
  const auto sp = GalerkinSpace::bspline(I01, 3, 10);
  const GardingResult r1 = estimate_garding(sp, Symbol::power_1d(2));
  const GardingResult r2 = estimate_garding(sp, Symbol::power_1d(2).scaled(2.0));
  EXPECT_NEAR(r2.k1, r1.k1 / 4, 1e-8 * r1.k1);
  EXPECT_DOUBLE_EQ(r2.k2, r1.k2);
}

TEST(SolveNeumann, Examples) {
  const auto sp = GalerkinSpace::bspline(I01, 2, 64);
  const double eps = 1.0 / 8;
  AssemblyOptions opt;
  opt.period = eps;
  const CoefficientG g = two_phase_1d();
  const Assembled A = assemble(sp, [&](const RVector& x) { return g.at(x / eps); }, Symbol::power_1d(1), opt);
  const int n = sp.dof_count();
  EXPECT_EQ(solve_neumann(A.stiffness, A.mass, -1.0, CVector::Zero(n)).u.norm(), 0.0);
  const CVector c = CVector::Constant(n, cplx(2.0, -1.0));
  EXPECT_LT((solve_neumann(A.stiffness, A.mass, -1.0, c).u - c).cwiseAbs().maxCoeff(), 1e-10);
  const CVector F = random_vector(n, 1), G = random_vector(n, 2);
  const NeumannSolution uF = solve_neumann(A.stiffness, A.mass, -0.7, F), uG = solve_neumann(A.stiffness, A.mass, -0.7, G);
  EXPECT_LT(std::abs(uF.u.dot(A.mass * G) - F.dot(A.mass * uG.u)), 1e-10 * F.norm() * G.norm());
  EXPECT_LT(uF.residual, 1e-10);
  // Galerkin residual against every basis function
  const CVector r = A.stiffness * uF.u + 0.7 * (A.mass * uF.u) - A.mass * F;
  EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-10 * (A.mass * F).cwiseAbs().maxCoeff());
  EXPECT_THROW(solve_neumann(A.stiffness, A.mass, 0.0, F), SolverError);
}

TEST(KernelZ, PowerSymbolsAndGradient) {
  {
    const auto sp = GalerkinSpace::bspline(I01, 3, 16);
    const Symbol b = Symbol::power_1d(2);
    const KernelZ Z = kernel_Z(sp, b);
    ASSERT_EQ(Z.q, 2);
    const Assembled A = assemble_constant(sp, CMatrix::Identity(1, 1), b);
    EXPECT_LT((Z.basis.adjoint() * (A.mass * Z.basis) - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
    // subspace angle to span{1, x}: distance of each normalized polynomial from span(Z)
    for (auto f : {std::function<cplx(double)>([](double) { return cplx(1.0); }), std::function<cplx(double)>([](double x) { return cplx(x); })}) {
      CVector v = sp.interpolate_1d(f);
      v /= form_norm(A.mass, v);
      EXPECT_LT(form_norm(A.mass, v - Z.project(A.mass, v)), 1e-8);
    }
    const double Snorm = CMatrix(A.stiffness).cwiseAbs().rowwise().sum().maxCoeff();
    for (int i = 0; i < Z.q; ++i) EXPECT_LT((A.stiffness * Z.basis.col(i)).cwiseAbs().maxCoeff(), 1e-12 * Snorm);
  }
  {
    const auto sp = GalerkinSpace::bspline(I01, 2, 16);
    const KernelZ Z = kernel_Z(sp, Symbol::power_1d(1));
    ASSERT_EQ(Z.q, 1);
    const CVector z = Z.basis.col(0);
    EXPECT_LT((z / z(0) - CVector::Ones(z.size())).cwiseAbs().maxCoeff(), 1e-8);
  }
  {
    const auto sp = GalerkinSpace::q1({0.0, 1.0, 0.0, 2.0}, 5, 6);
    const KernelZ Z = kernel_Z(sp, Symbol::gradient(2));
    ASSERT_EQ(Z.q, 1);
    const CVector z = Z.basis.col(0);
    EXPECT_LT((z / z(0) - CVector::Ones(z.size())).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(KernelZ, NullForEveryCoefficient) {
  const auto sp = GalerkinSpace::bspline(I01, 3, 128);
  const Symbol b = Symbol::power_1d(2);
  const KernelZ Z = kernel_Z(sp, b);
  AssemblyOptions opt;
  opt.period = 1.0 / 16;
  const CoefficientG g = two_phase_1d(0.3, 7.0);
  const Assembled A = assemble(sp, [&](const RVector& x) { return g.at(x * 16.0); }, b, opt);
  const double Snorm = CMatrix(A.stiffness).cwiseAbs().rowwise().sum().maxCoeff();
  for (int i = 0; i < Z.q; ++i) EXPECT_LT((A.stiffness * Z.basis.col(i)).cwiseAbs().maxCoeff(), 1e-10 * Snorm);
}

TEST(Extension, Examples) {
  const ExtensionOperator P(I01, 1);
  const DerivFn one = [](double, int k) { return cplx(k == 0 ? 1.0 : 0.0); };
  for (double x : {-0.25, -0.2, -0.1, 1.05, 1.24}) EXPECT_NEAR(std::abs(P.reflected(one, x, 0) - 1.0), 0.0, 1e-13);
  const DerivFn lin = [](double x, int k) { return cplx(k == 0 ? x : (k == 1 ? 1.0 : 0.0)); };
  const double h = 1e-5;
  for (double a : {0.0, 1.0}) {
    const double left = (P.eval(lin, a, 0).real() - P.eval(lin, a - h, 0).real()) / h;
    const double right = (P.eval(lin, a + h, 0).real() - P.eval(lin, a, 0).real()) / h;
    EXPECT_NEAR(left, right, 1e-6);
    EXPECT_NEAR(P.eval(lin, a - h, 0).real(), P.eval(lin, a + h, 0).real(), 3e-5);
  }
  EXPECT_GE(P.measure_norms({lin, one})[0], 1.0);
  EXPECT_THROW(ExtensionOperator(I01, 1, 0.2), DomainError);
}

TEST(Extension, ReproducesLowDegreePolynomialsAndAgreesOnDomain) {
  const ExtensionOperator P({-1.0, 2.0}, 2);
  const DerivFn u = [](double x, int k) {
    const double c[4] = {0.5, -2.0, 0.3, 1.0};  // 0.5 - 2x + 0.3x^2 + x^3
    double v = 0.0;
    for (int r = k; r < 4; ++r) {
      double f = c[r];
      for (int i = 0; i < k; ++i) f *= r - i;
      v += f * std::pow(x, r - k);
    }
    return cplx(v);
  };
  for (double x : {-1.7, -1.3, 2.2, 2.7})
    for (int k = 0; k <= 3; ++k) EXPECT_NEAR(std::abs(P.reflected(u, x, k) - u(x, k)), 0.0, 1e-10);
  for (double x : {-1.0, 0.0, 1.5, 2.0}) EXPECT_EQ(P.eval(u, x, 0), u(x, 0));
}

TEST(Extension, CutoffIsSmoothAcrossItsSeams) {
  for (int p : {1, 2, 3}) {
    const ExtensionOperator P(I01, p);
    const double c = P.collar();
    for (double s : {-c, -0.5 * c, 1 + 0.5 * c, 1 + c})
      for (int k = 0; k <= P.cutoff_smoothness(); ++k) {
        const double scale = std::pow(2.0 / c, k);
        EXPECT_NEAR(P.cutoff(s - 1e-14, k), P.cutoff(s + 1e-14, k), 1e-5 * scale) << "p=" << p << " k=" << k;
      }
  }
}

TEST(LambdaProfile, MatchesCellSolver) {
  const Lattice lat({2 * pi});
  const CoefficientG g = CoefficientG::from_function(lat, {64}, 1, [](const RVector& y) {
    return CMatrix::Constant(1, 1, 1.0 / (2.0 + std::sin(y(0))));
  });
  for (int p : {1, 2}) {
    const Symbol b = Symbol::power_1d(p);
    const LambdaProfile lam(g, b);
    EXPECT_NEAR(lam.g0(), 0.5, 1e-10);
    const EffectiveData data = homogenize(g, b);
    const auto vals = data.Lambda.grid_values();
    const int N = static_cast<int>(vals.size());
    for (int i = 0; i < N; i += 5) EXPECT_NEAR(std::abs(lam.derivative(2 * pi * i / N, 0) - vals[i](0, 0)), 0.0, 1e-9);
  }
}

TEST(LambdaProfile, TwoPhaseClosedForm) {
  // p = 1, g = a on [0, 1/2), b on [1/2, 1): Lambda' = i (g0 / g - 1), piecewise linear and zero-mean
  const LambdaProfile lam(two_phase_1d(1.0, 4.0), Symbol::power_1d(1));
  EXPECT_NEAR(lam.g0(), 1.6, 1e-12);
  EXPECT_NEAR(std::abs(lam.derivative(0.2, 1) - cplx(0.0, 0.6)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(lam.derivative(0.7, 1) - cplx(0.0, -0.6)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(lam.derivative(0.0, 0) - cplx(0.0, -0.15)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(lam.derivative(0.5, 0) - cplx(0.0, 0.15)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(lam.derivative(1.0, 0) - lam.derivative(0.0, 0)), 0.0, 1e-12);
}

TEST(Correctors, TrivialCases) {
  const ExtensionOperator P(I01, 1);
  const Symbol b = Symbol::power_1d(1);
  const DerivFn u0 = [](double x, int k) { return k == 0 ? cplx(std::cos(pi * x)) : (k == 1 ? cplx(-pi * std::sin(pi * x)) : cplx(-pi * pi * std::cos(pi * x))); };
  const LambdaProfile zero(const_g(3.0), b);
  const DerivFn K = corrector_KN(zero, b, 1.0 / 8, u0, P);
  const DerivFn K0 = corrector_KN0(zero, b, 1.0 / 8, u0, CaseTag::generic);
  for (double x : {0.0, 0.3, 1.0}) {
    EXPECT_LT(std::abs(K(x, 0)) + std::abs(K(x, 1)), 1e-14);
    EXPECT_LT(std::abs(K0(x, 0)), 1e-14);
  }
  const Symbol b2 = Symbol::power_1d(2);
  const ExtensionOperator P2(I01, 2);
  const LambdaProfile lam(two_phase_1d(), b2);
  const DerivFn lin = [](double x, int k) { return cplx(k == 0 ? 2 - 3 * x : (k == 1 ? -3.0 : 0.0)); };
  const DerivFn Kz = corrector_KN(lam, b2, 1.0 / 8, lin, P2);
  for (double x : {0.0, 0.01, 0.5, 0.99, 1.0})
    for (int k = 0; k <= 2; ++k) EXPECT_LT(std::abs(Kz(x, k)), 1e-11);
}

TEST(Correctors, StandardCorrectorGate) {
  const LambdaProfile lam(two_phase_1d(), Symbol::power_1d(1));
  const DerivFn u0 = [](double, int) { return cplx(0.0); };
  EXPECT_THROW(corrector_KN0(lam, Symbol::gradient(2), 1.0 / 8, u0, CaseTag::generic), DomainError);
  EXPECT_NO_THROW(corrector_KN0(lam, Symbol::power_1d(1), 1.0 / 8, u0, CaseTag::generic));
}

TEST(Correctors, TorusRouteAgreesWithPointwiseRoute) {
  const CoefficientG g = smooth_g();
  const Symbol b = Symbol::power_1d(1);
  const EffectiveData data = homogenize(g, b);
  const LambdaProfile lam(g, b);
  const ExtensionOperator P(I01, 1);
  const DerivFn u0 = [](double x, int k) {
    const double w = 1.3;
    return cplx(std::pow(w, k) * std::cos(w * x + k * pi / 2) + (k == 0 ? x * x : (k == 1 ? 2 * x : (k == 2 ? 2.0 : 0.0))));
  };
  const double eps = 1.0 / 8;
  const DerivFn K = corrector_KN(lam, b, eps, u0, P);
  const PeriodicField Kt = corrector_KN_torus(data, b, eps, u0, P);
  const auto vals = Kt.grid_values();
  const int N = static_cast<int>(vals.size());
  const double dx = 1.5 / N;
  double err = 0.0, ref = 0.0;
  for (int i = 0; i < N; ++i) {
    const double x = -0.25 + i * dx;
    if (x < 0.0 || x > 1.0) continue;
    err = std::max(err, std::abs(vals[i](0, 0) - K(x, 0)));
    ref = std::max(ref, std::abs(K(x, 0)));
  }
  EXPECT_GT(ref, 1e-3);
  EXPECT_LT(err, 2e-3 * ref);
}

TEST(NeumannStudy, ConstantCoefficientAtFloor) {
  NeumannProblem pb;
  pb.g = const_g(2.0);
  pb.F = [](double x) { return cplx(std::cos(pi * x) + x, 0.5 * x * x); };
  const NeumannStudy s = neumann_error_study(pb, {1.0 / 4, 1.0 / 8, 1.0 / 16}, -1.0);
  for (const auto& r : s.rows) {
    EXPECT_LT(r.e_L2, 1e-8);
    EXPECT_LT(r.e_Hp_plain, 1e-5);
    EXPECT_NEAR(r.e_Hp_corr, r.e_Hp_plain, 1e-12);
    EXPECT_NEAR(r.e_Hp_plain, s.rows[0].e_Hp_plain, 1e-3 * s.rows[0].e_Hp_plain);
  }
}

TEST(NeumannStudy, ReferenceResolutionGuard) {
  NeumannProblem pb = two_phase_problem(1);
  pb.ref_factor = 4;
  EXPECT_THROW(neumann_error_study(pb, eps_list, -1.0), DomainError);
}

TEST(NeumannStudy, TwoPhaseP1) {
  const NeumannStudy s = neumann_error_study(two_phase_problem(1), eps_list, -1.0);
  EXPECT_GE(s.e_L2.slope, 0.9);
  double plain_min = 1e300;
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const auto& r = s.rows[i];
    plain_min = std::min(plain_min, r.e_Hp_plain);
    // K_N and the standard corrector agree (2p > d)
    EXPECT_LT(std::max(r.e_Hp_corr, r.e_Hp_corr0) / std::min(r.e_Hp_corr, r.e_Hp_corr0), 2.0);
    // e_Hp_corr / eps^{1/2} stays bounded
    if (i > 0) EXPECT_LE(r.e_Hp_corr / std::sqrt(r.eps), 1.05 * s.rows[i - 1].e_Hp_corr / std::sqrt(s.rows[i - 1].eps));
  }
  EXPECT_GT(plain_min, 10.0 * s.rows.back().e_Hp_corr);
  ASSERT_TRUE(s.e_Hp_corr0.has_value());
  // under case m = n: the standard corrector converges at rate >= 0.9
  EXPECT_GE(s.e_Hp_corr0->slope, 0.9);
  EXPECT_FALSE(s.e_L2.flagged);
}

TEST(NeumannStudy, TwoPhaseP2L2Rate) {
  NeumannProblem pb = two_phase_problem(2);
  const NeumannStudy s = neumann_error_study(pb, eps_list, -1.0);
  EXPECT_GE(s.e_L2.slope, 0.9);
  EXPECT_LT(s.rows.back().e_Hp_corr, 0.2 * s.rows.back().e_Hp_plain);
}

TEST(NeumannStudy, EffectiveRegularityProxy) {
  for (int p : {1, 2}) {
    NeumannProblem pb = two_phase_problem(p);
    const LambdaProfile lam(pb.g, pb.b);
    const detail::Solved eff = detail::solve_effective_1d(pb, lam.g0(), -1.0, ResolventVariant::A);
    const GardingResult gr = estimate_garding(GalerkinSpace::bspline(I01, 2 * p, 16), pb.b);
    const double C0 = std::sqrt(2 * gr.k1 * (1.0 / 1.0) + gr.k2);  // |g^{-1}| = 1 / min g = 1
    const CVector Fc = eff.space.interpolate_1d(pb.F);
    EXPECT_LE(form_norm(hs_gram(eff.space, p), eff.u), C0 * form_norm(eff.A.mass, Fc));
  }
}

TEST(Correctors, ScaledNormIsBounded) {
  const Symbol b = Symbol::power_1d(1);
  const LambdaProfile lam(two_phase_1d(), b);
  const ExtensionOperator P(I01, 1);
  const DerivFn u0 = [](double x, int k) { return cplx(std::pow(pi, k) * std::cos(pi * x + k * pi / 2)); };
  std::vector<double> nrm;
  for (double eps : eps_list) {
    const DerivFn K = corrector_KN(lam, b, eps, u0, P);
    double acc = 0.0;
    const GaussRule gr = gauss_legendre(8);
    const int panels = static_cast<int>(std::lround(32 / eps));
    for (int c = 0; c < panels; ++c)
      for (std::size_t i = 0; i < gr.x.size(); ++i) {
        const double x = (c + gr.x[i]) / panels;
        acc += gr.w[i] / panels * (std::norm(K(x, 0)) + std::norm(K(x, 1)));
      }
    nrm.push_back(std::sqrt(acc));
  }
  EXPECT_GT(*std::min_element(nrm.begin(), nrm.end()), 1e-2);
  EXPECT_LT(*std::max_element(nrm.begin(), nrm.end()) / *std::min_element(nrm.begin(), nrm.end()), 2.0);
}

TEST(SpectralShift, NeumannLaplacianOnZeroPi) {
  const auto sp = GalerkinSpace::bspline({0.0, pi}, 2, 64);
  const Symbol b = Symbol::power_1d(1);
  const Assembled A = assemble_constant(sp, CMatrix::Identity(1, 1), b);
  const KernelZ Z = kernel_Z(sp, b);
  const SpectralShiftData d = spectral_shift(A, A, Z);
  EXPECT_NEAR(d.lambda_eff(1), 1.0, 1e-6);
  EXPECT_NEAR(d.c_flat, 0.9, 1e-6);
  EXPECT_LT(std::abs(d.lambda_eps(0)), 1e-8 * d.lambda_eps(1));
  const CVector v = random_vector(sp.dof_count(), 3);
  EXPECT_LT((d.apply_P(A.mass, v) + d.apply_PZ(A.mass, v) - v).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SpectralShift, KernelIdentityAndCut) {
  NeumannProblem pb = two_phase_problem(2);
  pb.study_elements = 32;
  const BResolventStudy s = b_resolvent_study(pb, -1.0, {1.0 / 4, 1.0 / 8, 1.0 / 16}, 5.0);
  EXPECT_LT(s.kernel_identity, 1e-10);
  EXPECT_THROW(b_resolvent_study(pb, 6.0, {1.0 / 4}, 5.0), DomainError);
  EXPECT_THROW(b_resolvent_study(pb, 0.0, {1.0 / 4}, 5.0), DomainError);
}

TEST(SpectralShift, BelowTheCutForSoftCoefficient) {
  NeumannProblem pb;
  pb.g = two_phase_1d(0.1, 0.4);
  pb.F = [](double x) { return cplx(std::cos(pi * x) + x); };
  pb.study_elements = 32;
  const std::vector<double> el{1.0 / 4, 1.0 / 8, 1.0 / 16};
  const double c = problem_c_flat(pb, el);
  EXPECT_LT(c, 2.0);
  EXPECT_NEAR(c, 0.9 * 0.16 * pi * pi, 0.05);
  const BResolventStudy half = b_resolvent_study(pb, 0.5 * c, el, c);
  EXPECT_GE(half.errors.e_L2.slope, 0.9);
  const BResolventStudy near = b_resolvent_study(pb, 0.9 * c, el, c);
  for (std::size_t i = 0; i < el.size(); ++i) EXPECT_GT(near.errors.rows[i].e_L2, half.errors.rows[i].e_L2);
  EXPECT_NEAR(near.rho[0], 100.0 / (c * c), 1e-9);
}
