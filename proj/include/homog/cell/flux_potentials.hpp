#pragma once

#include <map>
#include <utility>
#include <vector>

#include "homog/cell/cell_problem.hpp"

namespace homog {

struct FluxPotentials {
  std::vector<MultiIndex> alphas;                                  // all |alpha| = p
  std::vector<PeriodicField> f;                                    // f_alpha = b_alpha^* (g_tilde - g0), n x m
  std::map<std::pair<MultiIndex, MultiIndex>, PeriodicField> M;    // M_{alpha beta}
  // Residuals are relative to max(sum_alpha |d^alpha f_alpha|, |g_tilde|) and max(max_alpha |f_alpha|, |g_tilde|).
  double residual_div = 0.0;   // |sum_alpha d^alpha f_alpha|
  double residual_repr = 0.0;  // max_alpha |f_alpha - sum_beta d^beta M_{alpha beta}|

  const PeriodicField& at(const MultiIndex& a, const MultiIndex& b) const { return M.at({a, b}); }
};

/// Potentials M_{alpha beta} = d^beta Phi_alpha - d^alpha Phi_beta with tilde-Delta_p Phi_alpha = f_alpha,
/// tilde-Delta_p = sum_{|beta| = p} d^{2 beta}.
inline FluxPotentials flux_potentials(const EffectiveData& data, const Symbol& b, double div_tol = 1e-6) {
  if (!data.has_effective) throw DomainError("flux_potentials: g_tilde not populated");
  FluxPotentials out;
  const int d = b.dim(), p = b.order();
  out.alphas = multi_indices_of_order(d, p);
  PeriodicField dev = data.g_tilde;
  for (int r = 0; r < dev.rows(); ++r)
    for (int c = 0; c < dev.cols(); ++c) dev.coeffs(r, c)(0) -= data.g0(r, c);

  for (const auto& a : out.alphas) {
    const CMatrix ba = b.coefficient(a).adjoint();  // n x m
    out.f.push_back(apply_matrix_multiplier(dev, b.cols(), [&](long, const RVector&) { return ba; }));
  }

  PeriodicField div = out.f[0] * cplx(0.0);
  double scale = 0.0, fmax = 0.0;
  for (std::size_t i = 0; i < out.alphas.size(); ++i) {
    PeriodicField t = derivative(out.f[i], out.alphas[i]);
    scale += norms(t, 0);
    div += t;
    fmax = std::max(fmax, norms(out.f[i], 0));
  }
  const double gt = norms(data.g_tilde, 0);
  scale = std::max(scale, gt);
  fmax = std::max(fmax, gt);
  out.residual_div = scale > 0.0 ? norms(div, 0) / scale : 0.0;
  if (out.residual_div > div_tol) {
    throw SolverError("flux_potentials: divergence residual " + std::to_string(out.residual_div) + " exceeds tolerance");
  }

  std::vector<PeriodicField> phi;
  for (const auto& fa : out.f) {
    phi.push_back(apply_scalar_multiplier(fa, [&](long k, const RVector&) -> cplx {
      const RVector x = fa.xi_derivative(k);
      cplx s = 0.0;
      for (const auto& beta : out.alphas) {
        cplx v = 1.0;
        for (int j = 0; j < d; ++j)
          for (int r = 0; r < 2 * beta[j]; ++r) v *= cplx(0.0, x(j));
        s += v;
      }
      return std::abs(s) > 0.0 ? 1.0 / s : 0.0;
    }));
  }

  const std::size_t na = out.alphas.size();
  for (std::size_t i = 0; i < na; ++i) {
    out.M.emplace(std::make_pair(out.alphas[i], out.alphas[i]), out.f[i] * cplx(0.0));
    for (std::size_t j = i + 1; j < na; ++j) {
      PeriodicField mij = derivative(phi[i], out.alphas[j]) - derivative(phi[j], out.alphas[i]);
      out.M.emplace(std::make_pair(out.alphas[j], out.alphas[i]), mij * cplx(-1.0));
      out.M.emplace(std::make_pair(out.alphas[i], out.alphas[j]), std::move(mij));
    }
  }

  for (std::size_t i = 0; i < na; ++i) {
    PeriodicField rep = out.f[i];
    for (std::size_t j = 0; j < na; ++j) rep -= derivative(out.at(out.alphas[i], out.alphas[j]), out.alphas[j]);
    out.residual_repr = std::max(out.residual_repr, fmax > 0.0 ? norms(rep, 0) / fmax : 0.0);
  }
  return out;
}

}  // namespace homog
