#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "homog/core/error.hpp"
#include "homog/core/parallel.hpp"
#include "homog/core/symbol.hpp"
#include "homog/linalg/krylov.hpp"
#include "homog/torus/coefficient.hpp"
#include "homog/torus/nodal.hpp"
#include "homog/torus/operators.hpp"

namespace homog {

enum class CaseTag { generic, bar_case, under_case };

inline std::string to_string(CaseTag c) {
  switch (c) {
    case CaseTag::bar_case: return "bar_case";
    case CaseTag::under_case: return "under_case";
    default: return "generic";
  }
}

struct EffectiveData {
  PeriodicField Lambda;   // n x m, zero mean
  PeriodicField g_tilde;  // m x m
  CMatrix g0, g_bar, g_under;
  double g0_skew = 0.0;   // |skew part of mean(g_tilde)| / |g0|
  double residual = 0.0;  // max over columns of the relative residual of the cell equation
  std::vector<int> iterations;
  std::vector<std::vector<double>> energy_history;  // per column
  double tail_energy = 0.0;  // share of the coefficient energy of g in the outer half band
  CaseTag case_tag = CaseTag::generic;
  bool has_effective = false;
};

struct CellOptions {
  double tol = 1e-10;
  int max_iter = 0;  // 0: 10 * sqrt(total modes)
  bool check_rank = true;
};

namespace detail {

// Keeps modes with xi != 0 and no Nyquist component.
inline void project_admissible(PeriodicField& f) {
  for (long k = 0; k < f.modes(); ++k) {
    if (k == 0 || f.has_nyquist(k)) {
      for (int r = 0; r < f.rows(); ++r)
        for (int c = 0; c < f.cols(); ++c) f.coeffs(r, c)(k) = 0.0;
    }
  }
}

inline double outer_band_share(const PeriodicField& f) {
  double total = 0.0, outer = 0.0;
  for (long k = 0; k < f.modes(); ++k) {
    const auto w = f.wavenumbers(k);
    bool out = false;
    for (int j = 0; j < f.dim(); ++j) out = out || std::abs(w[j]) >= f.cutoff()[j] / 4;
    double e = 0.0;
    for (int r = 0; r < f.rows(); ++r)
      for (int c = 0; c < f.cols(); ++c) e += std::norm(f.coeffs(r, c)(k));
    if (k != 0) total += e;
    if (out) outer += e;
  }
  return total > 0.0 ? outer / total : 0.0;
}

}  // namespace detail

/// Solves b(D)^* g (b(D) Lambda + 1_m) = 0 for zero-mean periodic Lambda, column by column,
/// by preconditioned CG on the collocation discretization of g.
inline EffectiveData solve_cell_problem(const CoefficientG& g, const Symbol& b, const CellOptions& opt = {},
                                        const std::optional<std::vector<int>>& cutoff = std::nullopt) {
  const CoefficientG gg = cutoff && *cutoff != g.field().cutoff() ? g.resampled(*cutoff) : g;
  const int m = b.rows(), n = b.cols();
  require_dims(gg.size() == m, "solve_cell_problem: g must be m x m");
  require_dims(gg.field().dim() == b.dim(), "solve_cell_problem: dimension mismatch");
  if (opt.check_rank) {
    const Ellipticity e = symbol_ellipticity(b, b.dim() == 1 ? 2 : 1024);
    if (!e.rank_ok) throw DomainError("solve_cell_problem: symbol is not elliptic");
  }
  const PeriodicField& G = gg.field();
  const Lattice& lat = G.lattice();
  const GridShape& shape = G.grid();
  const NodalMultiplier mult(G);
  const CMatrix gbar = G.mean();

  std::vector<CMatrix> precond(static_cast<std::size_t>(G.modes()));
  for (long k = 0; k < G.modes(); ++k) {
    if (k == 0 || G.has_nyquist(k)) continue;
    const CMatrix bx = symbol_eval(b, G.xi_derivative(k));
    precond[k] = (bx.adjoint() * gbar * bx).inverse();
  }

  auto A = [&](const CVector& x) {
    PeriodicField u = unpack(x, lat, shape, n, 1);
    PeriodicField out = apply_bD_adjoint(b, mult.apply(apply_bD(b, u)));
    detail::project_admissible(out);
    return pack(out);
  };
  auto M = [&](const CVector& x) {
    PeriodicField r = unpack(x, lat, shape, n, 1);
    PeriodicField z(lat, shape, n, 1);
    for (long k = 0; k < r.modes(); ++k) {
      if (precond[k].size() == 0) continue;
      z.set_coeff_matrix(k, precond[k] * r.coeff_matrix(k));
    }
    return pack(z);
  };

  EffectiveData data;
  data.Lambda = PeriodicField(lat, shape, n, m);
  data.iterations.assign(static_cast<std::size_t>(m), 0);
  data.energy_history.assign(static_cast<std::size_t>(m), {});
  data.tail_energy = detail::outer_band_share(G);
  const int cap = opt.max_iter > 0 ? opt.max_iter : static_cast<int>(10.0 * std::sqrt(static_cast<double>(G.modes() * n)));
  std::vector<double> resid(static_cast<std::size_t>(m), 0.0);
  std::vector<std::string> failures(static_cast<std::size_t>(m));

  parallel_for(m, [&](int k) {
    PeriodicField rhs = apply_bD_adjoint(b, G.col_block(k, 1)) * cplx(-1.0);
    detail::project_admissible(rhs);
    const CVector bvec = pack(rhs);
    KrylovResult res = pcg(A, bvec, M, opt.tol, cap);
    if (!res.converged) {
      failures[k] = "cell problem column " + std::to_string(k) + " did not converge in " + std::to_string(cap) +
                    " iterations (relative residual " + std::to_string(res.relative_residual) + ")";
      return;
    }
    PeriodicField lk = unpack(res.x, lat, shape, n, 1);
    lk.zero_mean();
    data.Lambda.set_col_block(k, lk);
    data.iterations[k] = res.iterations;
    data.energy_history[k] = res.energy;
    const double bn = bvec.norm();
    resid[k] = bn > 0.0 ? (bvec - A(res.x)).norm() / bn : 0.0;
  });
  for (const auto& f : failures)
    if (!f.empty()) throw SolverError(f);
  for (double r : resid) data.residual = std::max(data.residual, r);
  return data;
}

/// g_tilde = g (b(D) Lambda + 1) at the nodes, Nyquist modes dropped; g0 = mean(g_tilde) (Hermitian part), g_bar, g_under.
inline EffectiveData effective_matrix(EffectiveData data, const CoefficientG& g, const Symbol& b) {
  const PeriodicField& G = g.field();
  require_dims(data.Lambda.grid() == G.grid(), "effective_matrix: Lambda and g live on different grids");
  const int m = b.rows();
  PeriodicField w = apply_bD(b, data.Lambda);
  for (int j = 0; j < m; ++j) w.coeffs(j, j)(0) += 1.0;
  data.g_tilde = NodalMultiplier(G).apply(w);
  // the cell equation does not see Nyquist modes; keep g_tilde in the resolved band
  for (long k = 1; k < data.g_tilde.modes(); ++k) {
    if (!data.g_tilde.has_nyquist(k)) continue;
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) data.g_tilde.coeffs(r, c)(k) = 0.0;
  }
  const CMatrix raw = data.g_tilde.mean();
  data.g0 = 0.5 * (raw + raw.adjoint());
  const double g0n = data.g0.norm();
  data.g0_skew = g0n > 0.0 ? (0.5 * (raw - raw.adjoint())).norm() / g0n : 0.0;
  if (b.rows() > b.cols() && data.g0_skew > 1e-10) {
    throw SolverError("effective_matrix: skew-Hermitian part of g0 is " + std::to_string(data.g0_skew) + " relative");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(data.g0, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0)) throw SolverError("effective_matrix: g0 is not positive definite");
  data.g_bar = G.mean();
  CMatrix inv_mean = CMatrix::Zero(m, m);
  const auto vals = G.grid_values();
  for (const auto& v : vals) inv_mean += v.inverse();
  inv_mean /= static_cast<double>(vals.size());
  data.g_under = inv_mean.inverse();
  data.has_effective = true;
  return data;
}

inline double min_eigenvalue(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// g_under <= g0 <= g_bar up to 1e-10 |g|.
inline bool voigt_reuss_check(const EffectiveData& data) {
  if (!data.has_effective) throw DomainError("voigt_reuss_check: g0 not populated");
  const double tol = 1e-10 * std::max(1.0, data.g_bar.norm());
  return min_eigenvalue(data.g_bar - data.g0) >= -tol && min_eigenvalue(data.g0 - data.g_under) >= -tol;
}

/// bar_case: b(D)^* g_k = 0 for every column g_k; under_case: g_tilde constant.
/// bar_case takes precedence when both hold. Tolerances are relative to |g|.
inline CaseTag detect_special_case(const EffectiveData& data, const Symbol& b, const CoefficientG& g, double tol = 1e-8) {
  if (!data.has_effective) throw DomainError("detect_special_case: g_tilde not populated");
  const PeriodicField& G = g.field();
  const double gnorm = norms(G, 0);
  bool bar = true;
  for (int k = 0; k < G.cols() && bar; ++k) {
    PeriodicField d = apply_bD_adjoint(b, G.col_block(k, 1));
    bar = norms(d, 0) < tol * gnorm;
  }
  if (bar) {
    const double lam = norm_multi(data.Lambda, b.order());
    if (lam > std::sqrt(tol) * std::max(1.0, gnorm) || (data.g0 - data.g_bar).norm() > std::sqrt(tol) * data.g_bar.norm()) {
      throw SolverError("detect_special_case: b(D)^* g_k = 0 but Lambda or g0 - g_bar does not vanish");
    }
    return CaseTag::bar_case;
  }
  PeriodicField dev = data.g_tilde;
  for (int r = 0; r < dev.rows(); ++r)
    for (int c = 0; c < dev.cols(); ++c) dev.coeffs(r, c)(0) -= data.g0(r, c);
  if (norms(dev, 0) < tol * std::max(norms(data.g_tilde, 0), 1e-300)) return CaseTag::under_case;
  return CaseTag::generic;
}

/// Gate for the corrector without Steklov smoothing: 2p > d or g0 = g_under.
inline bool multiplier_condition(int p, int d, CaseTag c) { return 2 * p > d || c == CaseTag::under_case; }

struct LambdaBoundReport {
  double bD_measured = 0.0, bD_bound = 0.0, bD_ratio = 0.0;
  double Hp_measured = 0.0, Hp_bound = 0.0, Hp_ratio = 0.0;
  bool ok = false;
};

/// |b(D) Lambda|_{L2} <= |Omega|^{1/2} m^{1/2} |g|^{1/2} |g^{-1}|^{1/2} and the H^p bound with C_Lambda.
inline LambdaBoundReport lambda_bound_check(const EffectiveData& data, const CoefficientG& g, const Symbol& b,
                                            double tol = 1e-10) {
  LambdaBoundReport rep;
  const Lattice& lat = g.lattice();
  const double vol_sqrt = std::sqrt(lat.cell_volume());
  const double c1 = std::sqrt(static_cast<double>(b.rows()) * g.g_inf() * g.ginv_inf());
  const Ellipticity e = b.ellipticity() ? *b.ellipticity() : symbol_ellipticity(b, default_sphere_samples(b.dim()));
  double s = 0.0;
  for (const auto& beta : multi_indices_up_to(b.dim(), b.order()))
    s += std::pow(2.0 * lat.r0(), -2.0 * (b.order() - beta.order()));
  const double c_lambda = c1 / std::sqrt(e.alpha0) * std::sqrt(s);
  rep.bD_measured = norms(apply_bD(b, data.Lambda), 0);
  rep.bD_bound = vol_sqrt * c1;
  rep.Hp_measured = norm_multi(data.Lambda, b.order());
  rep.Hp_bound = vol_sqrt * c_lambda;
  rep.bD_ratio = rep.bD_measured / rep.bD_bound;
  rep.Hp_ratio = rep.Hp_measured / rep.Hp_bound;
  rep.ok = rep.bD_ratio <= 1.0 + tol && rep.Hp_ratio <= 1.0 + tol;
  return rep;
}

/// Convenience: solve, form effective data and classify.
inline EffectiveData homogenize(const CoefficientG& g, const Symbol& b, const CellOptions& opt = {}) {
  EffectiveData d = effective_matrix(solve_cell_problem(g, b, opt), g, b);
  d.case_tag = detect_special_case(d, b, g);
  return d;
}

}  // namespace homog
