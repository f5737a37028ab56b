#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "homog/core/parallel.hpp"
#include "homog/core/shift.hpp"
#include "homog/harness/rate_fit.hpp"
#include "homog/neumann/correctors.hpp"
#include "homog/neumann/spectral.hpp"

namespace homog {

/// 1-D scalar Neumann problem (A_eps - zeta) u = F on an interval with g(x / eps), g periodic on [0, l).
struct NeumannProblem {
  CoefficientG g = CoefficientG::constant(Lattice({1.0}), {16}, CMatrix::Ones(1, 1));
  Symbol b = Symbol::power_1d(1);
  Interval domain{0.0, 1.0};
  std::function<cplx(double)> F = [](double) { return cplx(1.0); };
  int study_elements = 128;       // mesh of the effective solution
  int ref_cells_per_period = 16;  // reference mesh: at least this many elements per eps-period
  int ref_factor = 8;             // and at least this multiple of study_elements
  double collar_fraction = 0.25;
  double noise_floor = 1e-12;
};

struct NeumannRow {
  double eps = 0.0;
  cplx zeta;
  int ref_elements = 0;
  double e_L2 = 0.0, e_Hp_corr = 0.0, e_Hp_plain = 0.0, e_flux = 0.0;
  double e_Hp_corr0 = std::numeric_limits<double>::quiet_NaN();  // standard corrector, when admissible
};

struct NeumannStudy {
  std::vector<NeumannRow> rows;
  ConvergenceRecord e_L2, e_Hp_corr, e_Hp_plain, e_flux;
  std::optional<ConvergenceRecord> e_Hp_corr0;
  double g0 = 0.0;
};

enum class ResolventVariant { A, B };  // raw F, or F projected off Ker b(D)

namespace detail {

inline void check_problem(const NeumannProblem& pb) {
  require_dims(pb.b.dim() == 1 && pb.b.rows() == 1 && pb.b.cols() == 1, "Neumann studies: scalar 1-D symbol required");
  require_dims(pb.g.lattice().dim() == 1 && pb.g.size() == 1, "Neumann studies: scalar 1-D coefficient required");
  if (pb.ref_factor < 8) throw DomainError("Neumann studies: reference mesh must be at least 8x the study mesh");
  if (pb.ref_cells_per_period < 16) throw DomainError("Neumann studies: reference mesh needs >= 16 cells per eps-period");
}

inline GalerkinSpace effective_space(const NeumannProblem& pb) {
  const int p = pb.b.order();
  return GalerkinSpace::bspline(pb.domain, 2 * p, pb.study_elements);
}

/// Reference space for g(x / eps): degree p + 1, C^p except C^{p-1} at the material interfaces.
inline GalerkinSpace reference_space(const NeumannProblem& pb, double eps) {
  const int p = pb.b.order();
  const double ell = pb.g.lattice().length(0), period = eps * ell;
  const double periods = pb.domain.length() / period;
  const int elements = std::max(pb.ref_factor * pb.study_elements,
                                pb.ref_cells_per_period * static_cast<int>(std::ceil(periods - 1e-9)));
  std::vector<double> bps;
  const auto& cb = pb.g.breakpoints()[0];
  if (!cb.empty()) {
    const long j0 = static_cast<long>(std::floor(pb.domain.a / period)) - 1, j1 = static_cast<long>(std::ceil(pb.domain.b / period)) + 1;
    for (long j = j0; j <= j1; ++j)
      for (double beta : cb) {
        const double x = (static_cast<double>(j) * ell + beta) * eps;
        if (x > pb.domain.a && x < pb.domain.b) bps.push_back(x);
      }
  }
  return GalerkinSpace::bspline(pb.domain, p + 1, elements, bps, p - 1);
}

inline CoefFn oscillating(const CoefficientG& g, double eps) {
  return [g, eps](const RVector& x) {
    RVector y = x / eps;
    return g.at(y);
  };
}

inline CVector load_of(const GalerkinSpace& sp, const std::function<cplx(double)>& F) {
  QuadratureSpec q;
  q.points = sp.degree() + 6;
  return load_vector(sp, [&](const RVector& x) { return CVector::Constant(1, F(x(0))); }, q);
}

struct Solved {
  GalerkinSpace space;
  Assembled A;
  CVector u;
};

inline Solved solve_effective_1d(const NeumannProblem& pb, double g0, cplx zeta, ResolventVariant v) {
  Solved s{effective_space(pb), {}, {}};
  s.A = assemble_constant(s.space, CMatrix::Constant(1, 1, g0), pb.b);
  CVector load = load_of(s.space, pb.F);
  if (v == ResolventVariant::B) load -= kernel_Z(s.space, pb.b).project_load(s.A.mass, load);
  s.u = solve_assembled(s.A, zeta, load).u;
  return s;
}

inline Solved solve_oscillating_1d(const NeumannProblem& pb, double eps, cplx zeta, ResolventVariant v) {
  Solved s{reference_space(pb, eps), {}, {}};
  AssemblyOptions opt;
  opt.period = eps * pb.g.lattice().length(0);
  s.A = assemble(s.space, oscillating(pb.g, eps), pb.b, opt);
  CVector load = load_of(s.space, pb.F);
  if (v == ResolventVariant::B) load -= kernel_Z(s.space, pb.b).project_load(s.A.mass, load);
  s.u = solve_assembled(s.A, zeta, load).u;
  return s;
}

inline NeumannRow measure_row(const NeumannProblem& pb, const LambdaProfile& lam, const Solved& eff, const Solved& osc,
                              double eps, cplx zeta) {
  const int p = pb.b.order();
  const ExtensionOperator P(pb.domain, p, pb.collar_fraction);
  const DerivFn u0 = spline_function(eff.space, eff.u);
  const DerivFn K = corrector_KN(lam, pb.b, eps, u0, P);
  const DerivFn flux = smoothed_flux(pb.b, eps, lam.period(), P, u0);
  std::optional<DerivFn> K0;
  if (multiplier_condition(p, 1, CaseTag::under_case)) K0 = corrector_KN0(lam, pb.b, eps, u0, CaseTag::under_case);
  const cplx c = detail::symbol_constant(pb.b);
  const CoefFn g = oscillating(pb.g, eps);
  double l2 = 0, hc = 0, hp = 0, fl = 0, h0 = 0;
  QuadratureSpec q;
  q.points = p + 4;
  osc.space.for_each_point(p, q, [&](const PointData& pd) {
    const double x = pd.x(0);
    for (int j = 0; j <= p; ++j) {
      cplx ue = 0.0;
      for (std::size_t i = 0; i < pd.dofs.size(); ++i) ue += pd.D[j][i] * osc.u(pd.dofs[i]);
      const cplx d = ue - u0(x, j);
      const cplx dc = d - K(x, j);
      if (j == 0) l2 += pd.w * std::norm(d);
      hp += pd.w * std::norm(d);
      hc += pd.w * std::norm(dc);
      if (K0) h0 += pd.w * std::norm(d - (*K0)(x, j));
      if (j == p) fl += pd.w * std::norm(g(pd.x)(0, 0) * c * ue - lam.g0() * flux(x, 0));
    }
  });
  NeumannRow r;
  r.eps = eps;
  r.zeta = zeta;
  r.ref_elements = static_cast<int>(osc.space.basis().breaks().size()) - 1;
  r.e_L2 = std::sqrt(l2);
  r.e_Hp_corr = std::sqrt(hc);
  r.e_Hp_plain = std::sqrt(hp);
  r.e_flux = std::sqrt(fl);
  if (K0) r.e_Hp_corr0 = std::sqrt(h0);
  return r;
}

inline NeumannStudy collect(std::vector<NeumannRow> rows, double floor, double g0) {
  NeumannStudy s;
  s.rows = std::move(rows);
  s.g0 = g0;
  std::vector<std::pair<double, double>> a, b, c, d, e;
  bool has0 = true;
  for (const auto& r : s.rows) {
    a.emplace_back(r.eps, r.e_L2);
    b.emplace_back(r.eps, r.e_Hp_corr);
    c.emplace_back(r.eps, r.e_Hp_plain);
    d.emplace_back(r.eps, r.e_flux);
    e.emplace_back(r.eps, r.e_Hp_corr0);
    has0 = has0 && !std::isnan(r.e_Hp_corr0);
  }
  s.e_L2 = make_record("e_L2", a, floor, 1.0);
  s.e_Hp_corr = make_record("e_Hp_corr", b, floor, 0.5);
  s.e_Hp_plain = make_record("e_Hp_plain", c, floor, 0.0);
  s.e_flux = make_record("e_flux", d, floor, 0.5);
  if (has0 && !s.rows.empty()) s.e_Hp_corr0 = make_record("e_Hp_corr0", e, floor, 0.5);
  return s;
}

}  // namespace detail

/// Errors of u0 and of the corrected approximation u0 + K_N against the fine-mesh u_eps for each eps = 1/k.
inline NeumannStudy neumann_error_study(const NeumannProblem& pb, const std::vector<double>& eps_list, cplx zeta,
                                        ResolventVariant variant = ResolventVariant::A) {
  detail::check_problem(pb);
  for (double e : eps_list) reciprocal_integer(e);
  const LambdaProfile lam(pb.g, pb.b);
  const detail::Solved eff = detail::solve_effective_1d(pb, lam.g0(), zeta, variant);
  std::vector<NeumannRow> rows(eps_list.size());
  parallel_for(static_cast<int>(eps_list.size()), [&](int i) {
    const detail::Solved osc = detail::solve_oscillating_1d(pb, eps_list[i], zeta, variant);
    rows[static_cast<std::size_t>(i)] = detail::measure_row(pb, lam, eff, osc, eps_list[i], zeta);
  });
  return detail::collect(std::move(rows), pb.noise_floor, lam.g0());
}

/// c_flat for the problem: margin x the smallest (q+1)-th eigenvalue over the effective pencil and the
/// oscillating pencils of every eps in the list.
inline double problem_c_flat(const NeumannProblem& pb, const std::vector<double>& eps_list, double margin = 0.9) {
  detail::check_problem(pb);
  const LambdaProfile lam(pb.g, pb.b);
  std::vector<double> l2(eps_list.size());
  parallel_for(static_cast<int>(eps_list.size()), [&](int i) {
    const GalerkinSpace sp = detail::reference_space(pb, eps_list[i]);
    AssemblyOptions opt;
    opt.period = eps_list[i] * pb.g.lattice().length(0);
    const Assembled Ae = assemble(sp, detail::oscillating(pb.g, eps_list[i]), pb.b, opt);
    const Assembled A0 = assemble_constant(sp, CMatrix::Constant(1, 1, lam.g0()), pb.b);
    const KernelZ Z = kernel_Z(sp, pb.b);
    l2[static_cast<std::size_t>(i)] = spectral_shift(Ae, A0, Z, 1.0).c_flat;
  });
  return margin * *std::min_element(l2.begin(), l2.end());
}

struct BResolventStudy {
  NeumannStudy errors;
  double c_flat = 0.0;
  double kernel_identity = 0.0;  // max |(A_eps - zeta0)^{-1} z + z / zeta0| / |z| over the kernel basis, zeta0 = -2
  std::vector<double> rho;       // rho_flat(zeta) per row
};

/// Resolvent errors for shifts below the cut [c_flat, inf), including 0 < zeta < c_flat.
inline BResolventStudy b_resolvent_study(const NeumannProblem& pb, cplx zeta, const std::vector<double>& eps_list, double c_flat,
                                         ResolventVariant variant = ResolventVariant::B) {
  if (zeta == cplx(0.0)) throw DomainError("b_resolvent_study: zeta must be nonzero");
  if (zeta.imag() == 0.0 && zeta.real() >= c_flat) throw DomainError("b_resolvent_study: zeta lies on the cut [c_flat, inf)");
  BResolventStudy s;
  s.c_flat = c_flat;
  s.errors = neumann_error_study(pb, eps_list, zeta, variant);
  for (std::size_t i = 0; i < eps_list.size(); ++i) s.rho.push_back(rho_flat(zeta, c_flat));
  const double eps = eps_list.back();
  const GalerkinSpace sp = detail::reference_space(pb, eps);
  AssemblyOptions opt;
  opt.period = eps * pb.g.lattice().length(0);
  const Assembled A = assemble(sp, detail::oscillating(pb.g, eps), pb.b, opt);
  const KernelZ Z = kernel_Z(sp, pb.b);
  const cplx z0 = -2.0;
  for (int i = 0; i < Z.q; ++i) {
    const CVector z = Z.basis.col(i);
    const CVector u = solve_neumann(A, z0, z).u;
    s.kernel_identity = std::max(s.kernel_identity, form_norm(A.mass, u + z / z0) / form_norm(A.mass, z));
  }
  return s;
}

struct SpectrumReport {
  int q = 0;
  Eigen::VectorXd lambda_eps, lambda_eff;  // q + 1 smallest of the oscillating and effective pencils
  double c_flat = 0.0;
  double kernel_ratio = 0.0;     // max_i<q |lambda_i| / lambda_{q+1} over both pencils
  double subspace_angle = 0.0;   // max distance of normalized x^k, k < p, from Z
  double kernel_identity = 0.0;  // max |(A_eps - zeta0)^{-1} z + z / zeta0| / |z|, zeta0 = -2
};

/// Kernel Z, the lowest eigenvalues and c_flat on the reference space of one eps.
inline SpectrumReport neumann_spectrum(const NeumannProblem& pb, double eps, double margin = 0.9) {
  detail::check_problem(pb);
  reciprocal_integer(eps);
  const LambdaProfile lam(pb.g, pb.b);
  const GalerkinSpace sp = detail::reference_space(pb, eps);
  AssemblyOptions opt;
  opt.period = eps * pb.g.lattice().length(0);
  const Assembled Ae = assemble(sp, detail::oscillating(pb.g, eps), pb.b, opt);
  const Assembled A0 = assemble_constant(sp, CMatrix::Constant(1, 1, lam.g0()), pb.b);
  const KernelZ Z = kernel_Z(sp, pb.b);
  const SpectralShiftData d = spectral_shift(Ae, A0, Z, margin);
  SpectrumReport r;
  r.q = Z.q;
  r.lambda_eps = d.lambda_eps;
  r.lambda_eff = d.lambda_eff;
  r.c_flat = d.c_flat;
  for (int i = 0; i < Z.q; ++i)
    r.kernel_ratio = std::max({r.kernel_ratio, std::abs(d.lambda_eps(i)) / d.lambda_eps(Z.q),
                               std::abs(d.lambda_eff(i)) / d.lambda_eff(Z.q)});
  for (int k = 0; k < pb.b.order(); ++k) {
    CVector v = sp.interpolate_1d([k](double x) { return cplx(std::pow(x, k)); });
    v /= form_norm(Ae.mass, v);
    r.subspace_angle = std::max(r.subspace_angle, form_norm(Ae.mass, v - Z.project(Ae.mass, v)));
  }
  const cplx z0 = -2.0;
  for (int i = 0; i < Z.q; ++i) {
    const CVector z = Z.basis.col(i);
    const CVector u = solve_neumann(Ae, z0, z).u;
    r.kernel_identity = std::max(r.kernel_identity, form_norm(Ae.mass, u + z / z0) / form_norm(Ae.mass, z));
  }
  return r;
}

}  // namespace homog
