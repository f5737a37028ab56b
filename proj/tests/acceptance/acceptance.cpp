// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "homog/cell/flux_potentials.hpp"
#include "homog/harness/study.hpp"

using namespace homog;

namespace {

constexpr double pi = std::numbers::pi;
const Lattice L2pi({2 * pi});
const Lattice Torus2({2 * pi, 2 * pi});
const Lattice unit({1.0});
const std::vector<double> eps4{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};

struct Outcome {
  bool pass = true;
  std::string detail;

  void clause(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "[x] ") + what;
  }
};

std::string f(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

PeriodicField torus_F() {
  auto F = PeriodicField::sample(L2pi, {16}, 1, 1, [](const RVector& x) {
    return CMatrix::Constant(1, 1, std::cos(x(0)) + 0.5 * std::sin(2 * x(0)));
  });
  return F * cplx(1.0 / norms(F, 0));
}

NeumannProblem neumann_two_phase(int p, double a = 1.0, double b = 4.0) {
  NeumannProblem pb;
  pb.g = two_phase(unit, {64}, a, b);
  pb.b = Symbol::power_1d(p);
  pb.F = [](double x) { return cplx(std::cos(pi * x) + x); };
  return pb;
}

// Neumann studies shared by criteria 6, 7 and 8.
const NeumannStudy& neumann_study(int p) {
  static std::vector<std::optional<NeumannStudy>> cache(3);
  if (!cache[p]) cache[p] = neumann_error_study(neumann_two_phase(p), eps4, -1.0);
  return *cache[p];
}

Outcome effective_matrix_oracle() {
  Outcome o;
  const auto tp = two_phase(L2pi, {128}, 1.0, 4.0);
  const double e1 = std::abs(homogenize(tp, Symbol::power_1d(1)).g0(0, 0) - 1.6);
  o.clause(e1 < 1e-8, "two-phase |g0 - 1.6| = " + f(e1));
  const auto sine = CoefficientG::from_function(L2pi, {64}, 1, [](const RVector& x) {
    return CMatrix::Constant(1, 1, 1.0 / (2.0 + std::sin(x(0))));
  });
  const double e2 = std::abs(homogenize(sine, Symbol::power_1d(1)).g0(0, 0) - 0.5);
  o.clause(e2 < 1e-10, "(2 + sin x)^-1 |g0 - 0.5| = " + f(e2));
  return o;
}

Outcome voigt_reuss_suite() {
  Outcome o;
  const Symbol b = Symbol::gradient(2);
  std::vector<double> worst(100);
  parallel_for(100, [&](int s) {
    const auto g = random_trig(Torus2, {16, 16}, 2, 2, static_cast<unsigned>(s));
    const EffectiveData d = homogenize(g, b);
    worst[static_cast<std::size_t>(s)] = std::min(min_eigenvalue(d.g_bar - d.g0), min_eigenvalue(d.g0 - d.g_under));
  });
  int bad = 0;
  double lo = 1e300;
  for (double w : worst) {
    bad += w < -1e-10;
    lo = std::min(lo, w);
  }
  o.clause(bad == 0, std::to_string(bad) + " of 100 seeded g violate; smallest eigenvalue " + f(lo));
  return o;
}

Outcome trivial_corrector() {
  Outcome o;
  CMatrix c(2, 2);
  c << 2.0, cplx(0.0, 0.5), cplx(0.0, -0.5), 1.0;
  const EffectiveData d = homogenize(CoefficientG::constant(Torus2, {16, 16}, c), Symbol::gradient(2));
  const double lam = norms(d.Lambda, 0), dg = (d.g0 - c).cwiseAbs().maxCoeff();
  o.clause(lam < 1e-12, "|Lambda| = " + f(lam));
  o.clause(dg == 0.0, "max |g0 - g| = " + f(dg));
  return o;
}

Outcome wholespace_rates() {
  Outcome o;
  const auto g = two_phase(L2pi, {64}, 1.0, 4.0);
  for (int p : {1, 2}) {
    const Symbol b = Symbol::power_1d(p);
    const WholespaceStudy s = wholespace_error_study(g, b, homogenize(g, b), -1.0, torus_F(), eps4);
    o.clause(s.e_L2.fitted && s.e_L2.slope >= 0.9 && s.e_L2.r2 >= 0.95,
             "p=" + std::to_string(p) + " e_L2 slope " + f(s.e_L2.slope) + " R2 " + f(s.e_L2.r2));
    o.clause(s.e_Hp.fitted && s.e_Hp.slope >= 0.9 && s.e_Hp.r2 >= 0.95,
             "e_Hp slope " + f(s.e_Hp.slope) + " R2 " + f(s.e_Hp.r2));
  }
  return o;
}

Outcome zeta_scaling() {
  Outcome o;
  const auto g = two_phase(L2pi, {64}, 1.0, 4.0);
  const PeriodicField F = torus_F();
  for (int p : {1, 2}) {
    const Symbol b = Symbol::power_1d(p);
    const ZetaScalingStudy s = zeta_scaling_study(g, b, homogenize(g, b), 1.0 / 32, {-1.0, -4.0, -16.0, -64.0}, {}, {}, &F);
    const double limit = -(1.0 - 1.0 / (2.0 * p)) + 0.15;
    o.clause(s.record.fitted && s.record.slope <= limit,
             "p=" + std::to_string(p) + " operator-norm exponent " + f(s.record.slope) + " <= " + f(limit) +
                 " (single-F e_L2 exponent " + f(s.fixed->slope) + ")");
  }
  return o;
}

Outcome neumann_l2_rate() {
  Outcome o;
  for (int p : {1, 2}) {
    const NeumannStudy& s = neumann_study(p);
    o.clause(s.e_L2.fitted && s.e_L2.slope >= 0.9, "p=" + std::to_string(p) + " slope " + f(s.e_L2.slope));
  }
  return o;
}

Outcome neumann_corrected_bound() {
  Outcome o;
  for (int p : {1, 2}) {
    const NeumannStudy& s = neumann_study(p);
    double lo = 1e300, hi = 0.0;
    for (const auto& r : s.rows) {
      lo = std::min(lo, r.e_Hp_corr / std::sqrt(r.eps));
      hi = std::max(hi, r.e_Hp_corr / std::sqrt(r.eps));
    }
    const double var = (hi - lo) / hi;
    o.clause(var < 0.6, "p=" + std::to_string(p) + " variation of e_Hp_corr/eps^1/2 " + f(var) + " < 0.6");
    const auto& last = s.rows.back();
    o.clause(last.e_Hp_corr < 0.2 * last.e_Hp_plain, "corr/plain at 1/64 " + f(last.e_Hp_corr / last.e_Hp_plain) + " < 0.2");
  }
  return o;
}

Outcome smoothing_removal() {
  Outcome o;
  const NeumannStudy& s = neumann_study(1);
  double worst = 0.0;
  bool ok = true;
  for (const auto& r : s.rows) {
    if (std::isnan(r.e_Hp_corr0)) ok = false;
    else worst = std::max(worst, std::max(r.e_Hp_corr, r.e_Hp_corr0) / std::min(r.e_Hp_corr, r.e_Hp_corr0));
  }
  o.clause(ok && worst < 2.0, "largest K_N / K0_N error ratio " + f(worst) + " < 2");
  return o;
}

Outcome kernel_and_shift() {
  Outcome o;
  const SpectrumReport r = neumann_spectrum(neumann_two_phase(2), 1.0 / 16);
  o.clause(r.q == 2, "p=2 q = " + std::to_string(r.q));
  o.clause(r.subspace_angle < 1e-8, "angle to span{1, x} " + f(r.subspace_angle));
  o.clause(r.kernel_ratio < 1e-8, "kernel eigenvalues / lambda_{q+1} " + f(r.kernel_ratio));
  o.clause(r.kernel_identity < 1e-10, "identity at zeta=-2 " + f(r.kernel_identity));
  const auto sp = GalerkinSpace::bspline({0.0, pi}, 2, 64);
  const Symbol b = Symbol::power_1d(1);
  const Assembled A = assemble_constant(sp, CMatrix::Identity(1, 1), b);
  const SpectralShiftData d = spectral_shift(A, A, kernel_Z(sp, b));
  const double e = std::abs(d.lambda_eff(1) - 1.0);
  o.clause(e < 1e-6, "g=1 on [0, pi] |lambda_2 - 1| = " + f(e));
  return o;
}

Outcome b_regime() {
  Outcome o;
  const NeumannProblem pb = neumann_two_phase(1, 0.1, 0.4);
  const double c = problem_c_flat(pb, eps4);
  o.clause(c < 2.0, "c_flat = " + f(c) + " < 2");
  const BResolventStudy half = b_resolvent_study(pb, 0.5 * c, eps4, c);
  o.clause(half.errors.e_L2.fitted && half.errors.e_L2.slope >= 0.9, "slope at 0.5 c_flat " + f(half.errors.e_L2.slope));
  // 1 / (c_flat - zeta) doubles from 0.8 c_flat to 0.9 c_flat
  const BResolventStudy a = b_resolvent_study(pb, 0.8 * c, eps4, c);
  const BResolventStudy z = b_resolvent_study(pb, 0.9 * c, eps4, c);
  bool mono = true;
  for (std::size_t i = 0; i < eps4.size(); ++i)
    mono = mono && half.errors.rows[i].e_L2 < a.errors.rows[i].e_L2 && a.errors.rows[i].e_L2 < z.errors.rows[i].e_L2;
  o.clause(mono, "monotone growth towards c_flat");
  const double re = z.errors.rows.back().e_L2 / a.errors.rows.back().e_L2, rr = z.rho.front() / a.rho.front();
  const double factor = std::max(re / rr, rr / re);
  o.clause(factor < 3.0, "error ratio " + f(re) + " vs rho ratio " + f(rr) + ", factor " + f(factor) + " < 3");
  return o;
}

Outcome steklov_checks() {
  Outcome o;
  const Lattice lat({2 * pi, 1.5});
  const Symbol grad = Symbol::gradient(2);
  int contraction = 0, bound = 0;
  for (unsigned s = 0; s < 50; ++s) {
    const PeriodicField u = detail::random_bandlimited(lat, {16, 16}, 1, 6, s);
    const double nu = norms(u, 0), du = norms(apply_bD(grad, u), 0);
    for (double eps : {1.0, 0.5, 0.25, 0.1, 1.0 / 32}) {
      const PeriodicField su = apply_steklov(u, eps);
      contraction += norms(su, 0) > nu * (1 + 1e-14);
      bound += norms(su - u, 0) > eps * lat.r1() * du * (1 + 1e-12);
    }
  }
  o.clause(contraction == 0, std::to_string(contraction) + " contraction violations");
  o.clause(bound == 0, std::to_string(bound) + " smoothing-bound violations over 50 fields x 5 eps");
  return o;
}

Outcome flux_potential_check() {
  Outcome o;
  const Symbol b = Symbol::gradient(2);
  const auto g = random_trig(Torus2, {32, 32}, 2, 1, 3);
  CellOptions opt;
  opt.tol = 1e-12;
  const FluxPotentials fp = flux_potentials(homogenize(g, b, opt), b);
  o.clause(fp.residual_div < 1e-9, "residual_div " + f(fp.residual_div));
  o.clause(fp.residual_repr < 1e-9, "residual_repr " + f(fp.residual_repr));
  double anti = 0.0;
  for (const auto& a : fp.alphas)
    for (const auto& c : fp.alphas) anti = std::max(anti, norms(fp.at(a, c) + fp.at(c, a), 0));
  o.clause(anti == 0.0, "antisymmetry defect " + f(anti));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"effective-matrix oracle", effective_matrix_oracle},
      {"Voigt-Reuss property suite", voigt_reuss_suite},
      {"trivial-corrector case", trivial_corrector},
      {"whole-space rates", wholespace_rates},
      {"zeta scaling", zeta_scaling},
      {"Neumann L2 rate", neumann_l2_rate},
      {"Neumann corrected H^p bound", neumann_corrected_bound},
      {"smoothing removal", smoothing_removal},
      {"kernel and spectral shift", kernel_and_shift},
      {"B-operator regime", b_regime},
      {"Steklov checks", steklov_checks},
      {"flux potentials", flux_potential_check},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
