#pragma once

#include <cmath>

#include "homog/cell/cell_problem.hpp"
#include "homog/torus/operators.hpp"
#include "homog/wholespace/resolvent.hpp"

namespace homog {

/// How Lambda^eps (or g_tilde^eps) is multiplied with the smoothed flux on the data grid.
enum class ProductRule { collocation, dealiased };

struct CorrectorOptions {
  ProductRule rule = ProductRule::dealiased;
  bool smoothing = true;  // false: standard corrector without S_eps
};

namespace detail {

inline PeriodicField to_grid(const PeriodicField& f, const std::vector<int>& cutoff, const char* what) {
  for (int j = 0; j < f.dim(); ++j) {
    if (f.cutoff()[j] > cutoff[j]) throw DimensionError(std::string(what) + ": field is finer than the data grid");
  }
  return f.cutoff() == cutoff ? f : resample(f, cutoff);
}

inline PeriodicField product(const PeriodicField& a, const PeriodicField& b, ProductRule rule) {
  return rule == ProductRule::collocation ? multiply_collocation(a, b) : multiply_dealiased(a, b);
}

}  // namespace detail

/// eps^p Lambda(x / eps) (S_eps b(D) u0)(x) on the data torus (k = 1/eps times the cell grid).
inline PeriodicField corrector_K(const EffectiveData& data, const Symbol& b, double eps, const PeriodicField& u0,
                                 const CorrectorOptions& opt = {}) {
  const PeriodicField lam = rescale_to_eps(data.Lambda, eps);
  PeriodicField flux = apply_bD(b, detail::to_grid(u0, lam.cutoff(), "corrector_K"));
  if (opt.smoothing) flux = apply_steklov(flux, eps);
  return detail::product(lam, flux, opt.rule) * cplx(std::pow(eps, b.order()));
}

/// g_tilde(x / eps) (S_eps b(D) u0)(x) on the data torus.
inline PeriodicField flux_approximation(const EffectiveData& data, const Symbol& b, double eps, const PeriodicField& u0,
                                        const CorrectorOptions& opt = {}) {
  const PeriodicField gt = rescale_to_eps(data.g_tilde, eps);
  PeriodicField flux = apply_bD(b, detail::to_grid(u0, gt.cutoff(), "flux_approximation"));
  if (opt.smoothing) flux = apply_steklov(flux, eps);
  return detail::product(gt, flux, opt.rule);
}

/// g(x / eps) b(D) u on the data torus.
inline PeriodicField oscillating_flux(const CoefficientG& g, const Symbol& b, double eps, const PeriodicField& u) {
  const PeriodicField ge = oscillating_coefficient(g, eps);
  return NodalMultiplier(ge).apply(apply_bD(b, detail::to_grid(u, ge.cutoff(), "oscillating_flux")));
}

}  // namespace homog
