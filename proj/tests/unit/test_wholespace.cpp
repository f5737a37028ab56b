#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "homog/torus/coefficient_library.hpp"
#include "homog/wholespace/studies.hpp"

using namespace homog;

namespace {

constexpr double pi = std::numbers::pi;
const Lattice L2pi({2 * pi});

PeriodicField mode(int j, cplx c = 1.0, int N = 16) {
  return PeriodicField::sample(L2pi, {N}, 1, 1, [=](const RVector& x) {
    return CMatrix::Constant(1, 1, c * std::exp(cplx(0.0, j * x(0))));
  });
}

PeriodicField study_F() {
  auto F = PeriodicField::sample(L2pi, {16}, 1, 1, [](const RVector& x) {
    return CMatrix::Constant(1, 1, std::cos(x(0)) + 0.5 * std::sin(2 * x(0)));
  });
  return F * cplx(1.0 / norms(F, 0));
}

// Naive DFT coefficients of nodal samples, FFT ordering.
std::vector<cplx> dft(const std::vector<double>& v) {
  const int N = static_cast<int>(v.size());
  std::vector<cplx> out(N);
  for (int k = 0; k < N; ++k) {
    cplx s = 0.0;
    for (int i = 0; i < N; ++i) s += v[i] * std::exp(cplx(0.0, -2 * pi * k * i / N));
    out[k] = s / static_cast<double>(N);
  }
  return out;
}

int wave(int k, int N) { return k < N / 2 ? k : k - N; }

}  // namespace

TEST(SolveEffective, Examples) {
  const CMatrix g0 = CMatrix::Constant(1, 1, 2.0);
  auto zero = solve_effective(g0, Symbol::power_1d(1), -1.0, mode(1, 0.0));
  EXPECT_EQ(norms(zero.u, 0), 0.0);
  auto s = solve_effective(g0, Symbol::power_1d(1), -1.0, mode(1));
  EXPECT_LT(norms(s.u - mode(1, 1.0 / 3.0), 0), 1e-14);
  auto c = solve_effective(g0, Symbol::power_1d(1), -1.0, mode(0, 0.7));
  EXPECT_LT(norms(c.u - mode(0, 0.7), 0), 1e-14);
  EXPECT_THROW(solve_effective(g0, Symbol::power_1d(1), 2.0, mode(1)), SolverError);
}

TEST(SolveOscillatory, ConstantCoefficientMatchesEffective) {
  auto g = CoefficientG::constant(L2pi, {16}, CMatrix::Constant(1, 1, 3.0));
  auto data = homogenize(g, Symbol::power_1d(2));
  for (cplx z : {cplx(-1.0), cplx(1.0, 1.0)}) {
    auto ue = solve_oscillatory(g, data.g0, Symbol::power_1d(2), 1.0 / 4, z, study_F());
    auto u0 = solve_effective(data.g0, Symbol::power_1d(2), z, study_F());
    EXPECT_LT(norms(ue.u - resample(u0.u, ue.u.cutoff()), 0), 1e-11);
  }
}

TEST(SolveOscillatory, DenseAssemblyOracle) {
  const int N = 16;
  auto g = two_phase(L2pi, {N}, 1.0, 4.0);
  std::vector<double> nodal(N);
  for (int i = 0; i < N; ++i) nodal[i] = i < N / 2 ? 1.0 : 4.0;
  const auto gh = dft(nodal);
  for (int p : {1, 2}) {
    for (cplx z : {cplx(-1.0), cplx(0.5, 2.0)}) {
      CMatrix A(N, N);
      auto bx = [&](int k) -> cplx {
        const int w = wave(k, N);
        return w == -N / 2 ? 0.0 : std::pow(cplx(0.0, w), p);
      };
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) A(k, l) = std::conj(bx(k)) * gh[((k - l) % N + N) % N] * bx(l) - (k == l ? z : 0.0);
      CVector f = CVector::Zero(N);
      f(1) = 0.3;
      f(N - 2) = cplx(0.1, -0.2);
      f(3) = 1.0;
      const CVector u = A.lu().solve(f);
      PeriodicField F(L2pi, GridShape({N}), 1, 1);
      F.coeffs(0, 0) = f;
      auto s = solve_oscillatory(g, CMatrix::Constant(1, 1, 1.6), Symbol::power_1d(p), 1.0, z, F);
      EXPECT_LT((s.u.coeffs(0, 0) - u).norm(), 1e-9 * u.norm()) << p << " " << z;
      EXPECT_LT(s.solver_residual, 1e-11);
    }
  }
}

TEST(SolveOscillatory, AdjointAndResolventIdentities) {
  auto g = random_trig(L2pi, {16}, 1, 2, 5);
  const Symbol b = Symbol::power_1d(1);
  auto data = homogenize(g, b);
  auto probes = probe_fields(L2pi, {16}, 1, 2, 11);
  const double eps = 1.0 / 4;
  const cplx z(-0.5, 1.5);
  auto u = solve_oscillatory(g, data.g0, b, eps, z, probes[0]);
  auto v = solve_oscillatory(g, data.g0, b, eps, std::conj(z), probes[1]);
  const auto F = resample(probes[0], u.u.cutoff()), G = resample(probes[1], u.u.cutoff());
  EXPECT_LT(std::abs(inner(u.u, G) - inner(F, v.u)), 1e-9);

  const cplx z1(-1.0), z2(0.3, 2.0);
  auto r1 = solve_oscillatory(g, data.g0, b, eps, z1, probes[0]);
  auto r2 = solve_oscillatory(g, data.g0, b, eps, z2, probes[0]);
  auto r12 = solve_oscillatory(g, data.g0, b, eps, z1, r2.u);
  EXPECT_LT(norms(r1.u - r2.u - r12.u * (z1 - z2), 0), 1e-8);
}

TEST(SolveOscillatory, RealSolutionForNegativeShift) {
  auto g = two_phase(L2pi, {32}, 1.0, 4.0);
  auto data = homogenize(g, Symbol::power_1d(2));
  auto s = solve_oscillatory(g, data.g0, Symbol::power_1d(2), 1.0 / 8, -1.0, study_F());
  double imag = 0.0;
  for (const auto& v : s.u.grid_values()) imag = std::max(imag, std::abs(v(0, 0).imag()));
  EXPECT_LT(imag, 1e-10);
}

TEST(Corrector, TrivialCases) {
  auto c = CoefficientG::constant(L2pi, {16}, CMatrix::Constant(1, 1, 2.0));
  auto dc = homogenize(c, Symbol::power_1d(1));
  auto u0 = solve_effective(dc.g0, Symbol::power_1d(1), -1.0, mode(1));
  EXPECT_EQ(norms(corrector_K(dc, Symbol::power_1d(1), 1.0 / 4, u0.u), 0), 0.0);

  auto tp = two_phase(L2pi, {16}, 1.0, 4.0);
  auto dt = homogenize(tp, Symbol::power_1d(1));
  EXPECT_EQ(norms(corrector_K(dt, Symbol::power_1d(1), 1.0 / 4, mode(0, 2.0)), 0), 0.0);
}

TEST(Corrector, SingleModeOracle) {
  // p = 1: Lambda' = g0 / g - 1 at the nodes, so Lambda_m = h_m / (i m)
  const int N = 16, k = 4;
  auto tp = two_phase(L2pi, {N}, 1.0, 4.0);
  auto data = homogenize(tp, Symbol::power_1d(1));
  std::vector<double> h(N);
  for (int i = 0; i < N; ++i) h[i] = 1.6 / (i < N / 2 ? 1.0 : 4.0) - 1.0;
  const auto hh = dft(h);
  const double eps = 1.0 / k;
  auto u0 = solve_effective(data.g0, Symbol::power_1d(1), -1.0, mode(1));
  const cplx flux = cplx(0.0, 1.0) / 2.6 * sinc(eps * pi);
  auto K = corrector_K(data, Symbol::power_1d(1), eps, u0.u);
  ASSERT_GT(norms(K, 0), 0.0);
  const int M = k * N;
  CVector oracle = CVector::Zero(M);
  for (int m = -N / 2 + 1; m < N / 2; ++m) {
    if (m == 0) continue;
    const cplx lam = hh[(m + N) % N] / cplx(0.0, m);
    oracle((k * m + 1 + M) % M) = eps * lam * flux;
  }
  EXPECT_LT((K.coeffs(0, 0) - oracle).norm(), 1e-9);
}

TEST(WholespaceStudy, ConstantCoefficientIsAtFloor) {
  auto c = CoefficientG::constant(L2pi, {16}, CMatrix::Constant(1, 1, 2.0));
  auto data = homogenize(c, Symbol::power_1d(1));
  auto s = wholespace_error_study(c, Symbol::power_1d(1), data, -1.0, study_F(), {1.0 / 2, 1.0 / 4, 1.0 / 8});
  for (const auto& r : s.rows) {
    EXPECT_LT(r.e_L2, 1e-10);
    EXPECT_LT(r.e_Hp, 1e-10);
    // only the smoothing residue g (1 - S_eps) b(D) u0 remains in the flux
    auto u0 = solve_effective(data.g0, Symbol::power_1d(1), -1.0, study_F());
    auto w = apply_bD(Symbol::power_1d(1), u0.u);
    EXPECT_NEAR(r.e_flux, 2.0 * norms(w - apply_steklov(w, r.eps), 0), 1e-10);
  }
  EXPECT_FALSE(s.e_L2.fitted);
  EXPECT_TRUE(s.e_L2.flagged);
}

TEST(WholespaceStudy, TwoPhaseRates) {
  auto g = two_phase(L2pi, {64}, 1.0, 4.0);
  const std::vector<double> eps{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  for (int p : {1, 2}) {
    const Symbol b = Symbol::power_1d(p);
    auto data = homogenize(g, b);
    auto s = wholespace_error_study(g, b, data, -1.0, study_F(), eps);
    EXPECT_GE(s.e_L2.slope, 0.9) << p;
    EXPECT_GE(s.e_Hp.slope, 0.9) << p;
    EXPECT_GE(s.e_Hp.r2, 0.95) << p;
    double lo = 1e300, hi = 0.0, plain_min = 1e300;
    for (const auto& r : s.rows) {
      lo = std::min(lo, r.e_L2 / r.eps);
      hi = std::max(hi, r.e_L2 / r.eps);
      plain_min = std::min(plain_min, r.e_Hp_plain);
    }
    if (p == 1) {
      EXPECT_LT((hi - lo) / hi, 0.5);
    }
    EXPECT_GT(plain_min, 10.0 * s.rows.back().e_Hp) << p;
  }
}

TEST(WholespaceStudy, ConjugateShiftSymmetry) {
  auto g = two_phase(L2pi, {32}, 1.0, 4.0);
  const Symbol b = Symbol::power_1d(1);
  auto data = homogenize(g, b);
  const cplx z(0.5, 2.0);
  auto a = wholespace_error_study(g, b, data, z, study_F(), {1.0 / 4, 1.0 / 8, 1.0 / 16});
  auto c = wholespace_error_study(g, b, data, std::conj(z), study_F(), {1.0 / 4, 1.0 / 8, 1.0 / 16});
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_NEAR(a.rows[i].e_L2, c.rows[i].e_L2, 1e-10);
    EXPECT_NEAR(a.rows[i].e_Hp, c.rows[i].e_Hp, 1e-10);
  }
}

TEST(ZetaScaling, DegenerateForConstantG) {
  auto c = CoefficientG::constant(L2pi, {16}, CMatrix::Constant(1, 1, 2.0));
  auto data = homogenize(c, Symbol::power_1d(1));
  ProbeOptions po;
  po.count = 2;
  po.power_steps = 2;
  auto s = zeta_scaling_study(c, Symbol::power_1d(1), data, 1.0 / 4, {-1.0, -4.0, -16.0}, po);
  EXPECT_TRUE(s.degenerate);
  EXPECT_THROW(zeta_scaling_study(c, Symbol::power_1d(1), data, 1.0 / 4, {-1.0, cplx(0.0, 4.0), -16.0}, po), DomainError);
}

TEST(ZetaScaling, FirstOrderExponent) {
  auto g = two_phase(L2pi, {64}, 1.0, 4.0);
  const Symbol b = Symbol::power_1d(1);
  auto data = homogenize(g, b);
  auto F = study_F();
  auto s = zeta_scaling_study(g, b, data, 1.0 / 32, {-1.0, -4.0, -16.0, -64.0}, {}, {}, &F);
  ASSERT_TRUE(s.record.fitted);
  EXPECT_LE(s.record.slope, -0.5 + 0.15);
  ASSERT_TRUE(s.fixed);
  EXPECT_LT(s.fixed->slope, 0.0);
}
