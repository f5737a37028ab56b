#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "homog/core/parallel.hpp"
#include "homog/harness/rate_fit.hpp"
#include "homog/wholespace/corrector.hpp"

namespace homog {

struct WholespaceRow {
  double eps = 0.0;
  cplx zeta;
  double e_L2 = 0.0, e_Hp = 0.0, e_Hp_plain = 0.0, e_flux = 0.0;
};

struct WholespaceStudy {
  std::vector<WholespaceRow> rows;
  ConvergenceRecord e_L2, e_Hp, e_Hp_plain, e_flux;
};

struct StudyOptions {
  ResolventOptions solver;
  CorrectorOptions corrector;
  double noise_floor = 1e-10;
};

namespace detail {

inline WholespaceRow wholespace_row(const CoefficientG& g, const Symbol& b, const EffectiveData& data, double eps, cplx zeta,
                                    const PeriodicField& F, const StudyOptions& opt) {
  const int p = b.order();
  const ResolventSolution ue = solve_oscillatory(g, data.g0, b, eps, zeta, F, opt.solver);
  const ResolventSolution u0 = solve_effective(data.g0, b, zeta, F);
  const PeriodicField u0d = resample(u0.u, ue.u.cutoff());
  const PeriodicField diff = ue.u - u0d;
  const PeriodicField K = corrector_K(data, b, eps, u0d, opt.corrector);
  WholespaceRow r;
  r.eps = eps;
  r.zeta = zeta;
  r.e_L2 = norms(diff, 0);
  r.e_Hp_plain = norms(diff, p);
  r.e_Hp = norms(diff - K, p);
  r.e_flux = norms(oscillating_flux(g, b, eps, ue.u) - flux_approximation(data, b, eps, u0d, opt.corrector), 0);
  return r;
}

}  // namespace detail

/// Errors of the zeroth-order and corrected approximations for one F over a list of eps = 1/k.
inline WholespaceStudy wholespace_error_study(const CoefficientG& g, const Symbol& b, const EffectiveData& data, cplx zeta,
                                              const PeriodicField& F, const std::vector<double>& eps_list,
                                              const StudyOptions& opt = {}) {
  for (double e : eps_list) reciprocal_integer(e);
  WholespaceStudy s;
  s.rows.resize(eps_list.size());
  parallel_for(static_cast<int>(eps_list.size()),
               [&](int i) { s.rows[static_cast<std::size_t>(i)] = detail::wholespace_row(g, b, data, eps_list[i], zeta, F, opt); });
  std::vector<std::pair<double, double>> l2, hp, hpp, fl;
  for (const auto& r : s.rows) {
    l2.emplace_back(r.eps, r.e_L2);
    hp.emplace_back(r.eps, r.e_Hp);
    hpp.emplace_back(r.eps, r.e_Hp_plain);
    fl.emplace_back(r.eps, r.e_flux);
  }
  s.e_L2 = make_record("e_L2", l2, opt.noise_floor, 1.0);
  s.e_Hp = make_record("e_Hp", hp, opt.noise_floor, 1.0);
  s.e_Hp_plain = make_record("e_Hp_plain", hpp, opt.noise_floor, 0.0);
  s.e_flux = make_record("e_flux", fl, opt.noise_floor, 1.0);
  return s;
}

struct ProbeOptions {
  int count = 8;
  int power_steps = 20;
  unsigned seed = 0;
  std::vector<int> cutoff;  // probe band; empty: the cell grid of g
};

/// Seeded unit-norm probe fields with n rows, band-limited to `cutoff`, Nyquist modes zero.
inline std::vector<PeriodicField> probe_fields(const Lattice& lat, const std::vector<int>& cutoff, int n, int count,
                                               unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<PeriodicField> out;
  for (int c = 0; c < count; ++c) {
    PeriodicField F(lat, GridShape(cutoff), n, 1);
    for (long k = 0; k < F.modes(); ++k) {
      CMatrix v(n, 1);
      for (int r = 0; r < n; ++r) v(r, 0) = cplx(nd(rng), nd(rng));
      if (F.has_nyquist(k)) v.setZero();
      F.set_coeff_matrix(k, v);
    }
    out.push_back(F * cplx(1.0 / norms(F, 0)));
  }
  return out;
}

/// Lower bound for |(A_eps - zeta)^{-1} - (A0 - zeta)^{-1}| in L2 -> L2: maximum over seeded probes, refined
/// by power iteration on E^* E restricted to the probe band.
inline double resolvent_error_norm(const CoefficientG& g, const Symbol& b, const EffectiveData& data, double eps, cplx zeta,
                                   const ProbeOptions& popt = {}, const ResolventOptions& sopt = {}) {
  const std::vector<int> cutoff = popt.cutoff.empty() ? g.field().cutoff() : popt.cutoff;
  auto E = [&](const PeriodicField& F, cplx z) {
    const ResolventSolution ue = solve_oscillatory(g, data.g0, b, eps, z, F, sopt);
    return ue.u - resample(solve_effective(data.g0, b, z, F).u, ue.u.cutoff());
  };
  const auto probes = probe_fields(g.lattice(), cutoff, b.cols(), popt.count, popt.seed);
  std::vector<double> vals(probes.size());
  parallel_for(static_cast<int>(probes.size()), [&](int i) { vals[i] = norms(E(probes[i], zeta), 0); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (vals[i] > vals[best]) best = i;
  double est = vals.empty() ? 0.0 : vals[best];
  if (probes.empty()) return est;
  PeriodicField v = probes[best];
  for (int it = 0; it < popt.power_steps; ++it) {
    const PeriodicField w = E(v, zeta);
    est = std::max(est, norms(w, 0));
    PeriodicField z = resample(E(w, std::conj(zeta)), cutoff);
    for (long k = 0; k < z.modes(); ++k)
      if (z.has_nyquist(k)) z.set_coeff_matrix(k, CMatrix::Zero(z.rows(), z.cols()));
    const double nz = norms(z, 0);
    if (!(nz > 0.0)) break;
    v = z * cplx(1.0 / nz);
  }
  return est;
}

struct ZetaScalingStudy {
  ConvergenceRecord record;                 // operator-norm estimate against |zeta|
  std::optional<ConvergenceRecord> fixed;   // single-F e_L2 against |zeta| when F is supplied
  bool degenerate = false;
};

/// Exponent of the L2 resolvent error in |zeta| at fixed eps; expected -(1 - 1/(2p)).
inline ZetaScalingStudy zeta_scaling_study(const CoefficientG& g, const Symbol& b, const EffectiveData& data, double eps,
                                           const std::vector<cplx>& zetas, const ProbeOptions& popt = {},
                                           const StudyOptions& opt = {}, const PeriodicField* F = nullptr) {
  reciprocal_integer(eps);
  const double ray = zetas.empty() ? 0.0 : arg_0_2pi(zetas.front());
  for (cplx z : zetas) {
    if (std::abs(arg_0_2pi(z) - ray) > 1e-12) throw DomainError("zeta_scaling_study: shifts must lie on one ray");
  }
  const double expected = -(1.0 - 1.0 / (2.0 * b.order()));
  std::vector<std::pair<double, double>> pairs, fixed;
  for (cplx z : zetas) {
    pairs.emplace_back(std::abs(z), resolvent_error_norm(g, b, data, eps, z, popt, opt.solver));
    if (F) {
      const ResolventSolution ue = solve_oscillatory(g, data.g0, b, eps, z, *F, opt.solver);
      fixed.emplace_back(std::abs(z), norms(ue.u - resample(solve_effective(data.g0, b, z, *F).u, ue.u.cutoff()), 0));
    }
  }
  ZetaScalingStudy s;
  s.record = make_record("e_L2_opnorm", pairs, opt.noise_floor, expected, "|zeta|");
  if (F) s.fixed = make_record("e_L2", fixed, opt.noise_floor, expected, "|zeta|");
  s.degenerate = !s.record.fitted;
  return s;
}

}  // namespace homog
