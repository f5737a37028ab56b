#pragma once

#include <cmath>

#include "homog/cell/cell_problem.hpp"
#include "homog/neumann/extension.hpp"
#include "homog/neumann/lambda_profile.hpp"
#include "homog/torus/operators.hpp"

namespace homog {

/// Derivatives of the spline with coefficients c (component 0).
inline DerivFn spline_function(const GalerkinSpace& sp, CVector c) {
  return [sp, c = std::move(c)](double x, int k) { return sp.eval_1d(c, x, k)[k]; };
}

namespace detail {

inline cplx symbol_constant(const Symbol& b) {
  require_dims(b.dim() == 1 && b.rows() == 1 && b.cols() == 1 && b.terms().size() == 1,
               "1-D Neumann correctors need a scalar symbol c xi^p");
  return b.terms()[0].coeff(0, 0) * std::pow(cplx(0.0, -1.0), b.order());
}

/// eps^p Lambda(x / eps) w(x) and its derivatives through the Leibniz rule, with w given by its derivatives.
inline DerivFn lambda_times(const LambdaProfile& lam, double eps, DerivFn w) {
  return [lam, eps, w = std::move(w)](double x, int k) {
    const int p = lam.order();
    if (k > p) throw DomainError("corrector: derivative order above p is not available");
    cplx v = 0.0;
    for (int i = 0; i <= k; ++i) v += binomial(k, i) * std::pow(eps, p - i) * lam.derivative(x / eps, i) * w(x, k - i);
    return v;
  };
}

}  // namespace detail

/// S_eps b(D) P u0 and its derivatives: the local average over [x - eps l / 2, x + eps l / 2] of c (-i)^p (P u0)^{(p)},
/// evaluated exactly through (P u0)^{(p-1)}.
inline DerivFn smoothed_flux(const Symbol& b, double eps, double cell_length, const ExtensionOperator& P, const DerivFn& u0) {
  const cplx c = detail::symbol_constant(b);
  const int p = b.order();
  const double h = 0.5 * eps * cell_length;
  return [c, p, h, Pu = P.apply(u0)](double x, int k) {
    return c * (Pu(x + h, p - 1 + k) - Pu(x - h, p - 1 + k)) / (2.0 * h);
  };
}

/// Corrector addend eps^p Lambda^eps S_eps b(D) P u0 restricted to the domain.
inline DerivFn corrector_KN(const LambdaProfile& lam, const Symbol& b, double eps, const DerivFn& u0, const ExtensionOperator& P) {
  reciprocal_integer(eps);
  return detail::lambda_times(lam, eps, smoothed_flux(b, eps, lam.period(), P, u0));
}

/// Standard corrector eps^p Lambda(x / eps) b(D) u0(x), refused unless the multiplier condition holds.
inline DerivFn corrector_KN0(const LambdaProfile& lam, const Symbol& b, double eps, const DerivFn& u0, CaseTag tag) {
  if (!multiplier_condition(b.order(), b.dim(), tag)) {
    throw DomainError("corrector_KN0: the standard corrector needs 2p > d or the under case");
  }
  reciprocal_integer(eps);
  const cplx c = detail::symbol_constant(b);
  const int p = b.order();
  return detail::lambda_times(lam, eps, [c, p, u0](double x, int k) { return c * u0(x, p + k); });
}

/// Torus route for K_N: P u0 sampled on the enclosing torus, b(D) and S_eps as Fourier multipliers, Lambda^eps
/// from the cell field repeated on the torus grid; returned on the torus (x = a - collar + torus coordinate).
inline PeriodicField corrector_KN_torus(const EffectiveData& data, const Symbol& b, double eps, const DerivFn& u0,
                                        const ExtensionOperator& P) {
  reciprocal_integer(eps);
  const Lattice& cell = data.Lambda.lattice();
  const double ell = cell.length(0), L = P.domain().length() + 2.0 * P.collar();
  const double periods = L / (eps * ell), offset = (P.domain().a - P.collar()) / (eps * ell);
  if (std::abs(periods - std::round(periods)) > 1e-9 || std::abs(offset - std::round(offset)) > 1e-9) {
    throw DomainError("corrector_KN_torus: the enclosing torus must hold whole eps-cells");
  }
  const int Nc = data.Lambda.grid().size(0), cells = static_cast<int>(std::lround(periods));
  const int N = cells * Nc;
  const auto vals = data.Lambda.grid_values();
  const Lattice lat({L});
  std::vector<CMatrix> rep(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) rep[i] = vals[static_cast<std::size_t>(i % Nc)];
  const PeriodicField lam = PeriodicField::from_grid(lat, GridShape({N}), 1, 1, rep);
  const PeriodicField Pu = P.to_torus(u0, N);
  const PeriodicField flux = apply_steklov(apply_bD(b, Pu), eps, cell);
  return multiply_dealiased(lam, flux) * cplx(std::pow(eps, b.order()));
}

}  // namespace homog
