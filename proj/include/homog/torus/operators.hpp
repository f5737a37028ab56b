#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "homog/core/error.hpp"
#include "homog/core/multi_index.hpp"
#include "homog/core/symbol.hpp"
#include "homog/torus/periodic_field.hpp"

namespace homog {

/// Left-multiply every coefficient matrix by mult(k, xi_k); mult returns an out_rows x u.rows() matrix.
inline PeriodicField apply_matrix_multiplier(const PeriodicField& u, int out_rows,
                                             const std::function<CMatrix(long, const RVector&)>& mult) {
  PeriodicField out(u.lattice(), u.grid(), out_rows, u.cols());
  for (long k = 0; k < u.modes(); ++k) {
    const CMatrix m = mult(k, u.xi(k));
    require_dims(m.rows() == out_rows && m.cols() == u.rows(), "multiplier has wrong shape");
    out.set_coeff_matrix(k, m * u.coeff_matrix(k));
  }
  return out;
}

/// Scalar Fourier multiplier applied to every component.
inline PeriodicField apply_scalar_multiplier(const PeriodicField& u, const std::function<cplx(long, const RVector&)>& mult) {
  PeriodicField out = u;
  for (long k = 0; k < u.modes(); ++k) {
    const cplx s = mult(k, u.xi(k));
    for (int r = 0; r < u.rows(); ++r)
      for (int c = 0; c < u.cols(); ++c) out.coeffs(r, c)(k) *= s;
  }
  return out;
}

/// b(D) u: coefficient-wise multiplication by b(xi). u has b.cols() rows.
inline PeriodicField apply_bD(const Symbol& b, const PeriodicField& u) {
  require_dims(u.rows() == b.cols(), "apply_bD: field rows must equal n");
  require_dims(u.dim() == b.dim(), "apply_bD: dimension mismatch");
  return apply_matrix_multiplier(u, b.rows(), [&](long k, const RVector&) { return symbol_eval(b, u.xi_derivative(k)); });
}

/// b(D)^* w: coefficient-wise multiplication by b(xi)^*. w has b.rows() rows.
inline PeriodicField apply_bD_adjoint(const Symbol& b, const PeriodicField& w) {
  require_dims(w.rows() == b.rows(), "apply_bD_adjoint: field rows must equal m");
  require_dims(w.dim() == b.dim(), "apply_bD_adjoint: dimension mismatch");
  return apply_matrix_multiplier(w, b.cols(),
                                 [&](long k, const RVector&) { return CMatrix(symbol_eval(b, w.xi_derivative(k)).adjoint()); });
}

/// Partial derivative d^alpha (not D^alpha): multiplier (i xi)^alpha.
inline PeriodicField derivative(const PeriodicField& u, const MultiIndex& alpha) {
  require_dims(alpha.dim() == u.dim(), "derivative: multi-index dimension mismatch");
  return apply_scalar_multiplier(u, [&](long k, const RVector&) {
    const RVector x = u.xi_derivative(k);
    cplx v = 1.0;
    for (int j = 0; j < alpha.dim(); ++j)
      for (int r = 0; r < alpha[j]; ++r) v *= cplx(0.0, x(j));
    return v;
  });
}

inline double sinc(double t) { return std::abs(t) < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t; }

/// Symbol of the Steklov smoothing S_eps on a rectangular cell.
inline cplx steklov_multiplier(const RVector& xi, double eps, const Lattice& lattice) {
  require_dims(xi.size() == lattice.dim(), "steklov_multiplier: xi has wrong length");
  if (!(eps > 0.0)) throw DomainError("steklov_multiplier: eps must be positive");
  double v = 1.0;
  for (int j = 0; j < lattice.dim(); ++j) v *= sinc(eps * xi(j) * lattice.length(j) / 2.0);
  return v;
}

/// Steklov smoothing over the cell of `cell` (used when u lives on a larger data torus).
inline PeriodicField apply_steklov(const PeriodicField& u, double eps, const Lattice& cell) {
  return apply_scalar_multiplier(u, [&](long, const RVector& xi) { return steklov_multiplier(xi, eps, cell); });
}

/// S_eps u = |Omega|^{-1} int_Omega u(x - eps z) dz, with Omega the periodicity cell of u's lattice.
inline PeriodicField apply_steklov(const PeriodicField& u, double eps) {
  return apply_steklov(u, eps, u.lattice());
}

/// Checks eps = 1/k and returns k.
inline int reciprocal_integer(double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const double k = 1.0 / eps;
  const double kr = std::round(k);
  if (kr < 1.0 || std::abs(k - kr) > 1e-9 * kr) throw DomainError("eps must be the reciprocal of a positive integer");
  return static_cast<int>(kr);
}

/// f(x / eps) for eps = 1/k: mode xi moves to k xi; the grid is refined k times.
inline PeriodicField rescale_to_eps(const PeriodicField& f, int k) {
  if (k < 1) throw DomainError("rescale_to_eps: k must be a positive integer");
  std::vector<int> dims = f.cutoff();
  for (int& n : dims) n *= k;
  PeriodicField out(f.lattice(), GridShape(dims), f.rows(), f.cols());
  for (long m = 0; m < f.modes(); ++m) {
    auto w = f.wavenumbers(m);
    std::vector<int> idx(w.size());
    for (int j = 0; j < f.dim(); ++j) idx[j] = out.grid().index_of(j, k * w[j]);
    const long target = out.grid().flatten(idx);
    for (int r = 0; r < f.rows(); ++r)
      for (int c = 0; c < f.cols(); ++c) out.coeffs(r, c)(target) = f.coeffs(r, c)(m);
  }
  return out;
}

inline PeriodicField rescale_to_eps(const PeriodicField& f, double eps) { return rescale_to_eps(f, reciprocal_integer(eps)); }

namespace detail {

// Change the mode count along one axis. Padding splits the Nyquist coefficient evenly
// between +N/2 and -N/2; truncation folds +-M/2 into the new Nyquist slot.
inline CVector resample_axis(const CVector& in, const GridShape& from, const GridShape& to, int ax) {
  CVector out = CVector::Zero(to.total());
  const int nf = from.size(ax), nt = to.size(ax);
  for (long i = 0; i < from.total(); ++i) {
    const cplx v = in(i);
    if (v == cplx(0.0)) continue;
    auto idx = from.unflatten(i);
    const int w = from.wavenumber(ax, idx[ax]);
    if (nt >= nf) {
      if (from.is_nyquist(ax, idx[ax]) && nt > nf) {
        idx[ax] = to.index_of(ax, w);
        out(to.flatten(idx)) += 0.5 * v;
        idx[ax] = to.index_of(ax, -w);
        out(to.flatten(idx)) += 0.5 * v;
      } else {
        idx[ax] = to.index_of(ax, w);
        out(to.flatten(idx)) += v;
      }
    } else {
      if (std::abs(w) > nt / 2) continue;
      idx[ax] = to.index_of(ax, w);
      out(to.flatten(idx)) += v;
    }
  }
  return out;
}

}  // namespace detail

/// Band-limited interpolation onto a different cutoff.
inline PeriodicField resample(const PeriodicField& u, const std::vector<int>& cutoff) {
  require_dims(static_cast<int>(cutoff.size()) == u.dim(), "resample: cutoff has wrong dimension");
  PeriodicField cur = u;
  for (int ax = 0; ax < u.dim(); ++ax) {
    if (cur.cutoff()[ax] == cutoff[ax]) continue;
    std::vector<int> dims = cur.cutoff();
    dims[ax] = cutoff[ax];
    PeriodicField next(u.lattice(), GridShape(dims), u.rows(), u.cols());
    for (int r = 0; r < u.rows(); ++r)
      for (int c = 0; c < u.cols(); ++c) next.coeffs(r, c) = detail::resample_axis(cur.coeffs(r, c), cur.grid(), next.grid(), ax);
    cur = std::move(next);
  }
  return cur;
}

/// Pointwise matrix product a(x) b(x) formed at the collocation nodes (no padding).
inline PeriodicField multiply_collocation(const PeriodicField& a, const PeriodicField& b) {
  require_dims(a.cols() == b.rows(), "multiply: inner shapes differ");
  require_dims(a.grid() == b.grid() && a.lattice() == b.lattice(), "multiply: grids differ");
  const auto av = a.grid_values();
  const auto bv = b.grid_values();
  std::vector<CMatrix> prod(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) prod[i] = av[i] * bv[i];
  return PeriodicField::from_grid(a.lattice(), a.grid(), a.rows(), b.cols(), prod);
}

inline int padded_size(int n) {
  const int m = (3 * n + 1) / 2;
  return m % 2 == 0 ? m : m + 1;
}

/// Pointwise product with 3/2 zero padding, truncated back to the input cutoff.
inline PeriodicField multiply_dealiased(const PeriodicField& a, const PeriodicField& b) {
  require_dims(a.grid() == b.grid(), "multiply_dealiased: grids differ");
  std::vector<int> big = a.cutoff();
  for (int& n : big) n = padded_size(n);
  const PeriodicField prod = multiply_collocation(resample(a, big), resample(b, big));
  return resample(prod, a.cutoff());
}

/// (sum_xi (1 + |xi|^2)^s |u_xi|^2 |Omega|)^{1/2}, summed over components.
inline double norms(const PeriodicField& u, int s) {
  if (s < 0) throw DomainError("norms: s must be nonnegative");
  double acc = 0.0;
  for (long k = 0; k < u.modes(); ++k) {
    const double w = std::pow(1.0 + u.xi(k).squaredNorm(), s);
    for (int r = 0; r < u.rows(); ++r)
      for (int c = 0; c < u.cols(); ++c) acc += w * std::norm(u.coeffs(r, c)(k));
  }
  return std::sqrt(acc * u.lattice().cell_volume());
}

/// Sobolev norm with the multi-index weight sum_{|beta| <= s} xi^{2 beta}.
inline double norm_multi(const PeriodicField& u, int s) {
  const auto betas = multi_indices_up_to(u.dim(), s);
  double acc = 0.0;
  for (long k = 0; k < u.modes(); ++k) {
    const RVector x = u.xi(k);
    double w = 0.0;
    for (const auto& beta : betas) w += std::norm(monomial(x, beta));
    for (int r = 0; r < u.rows(); ++r)
      for (int c = 0; c < u.cols(); ++c) acc += w * std::norm(u.coeffs(r, c)(k));
  }
  return std::sqrt(acc * u.lattice().cell_volume());
}

/// L2 inner product over the cell: int <u, v> = |Omega| sum conj(u_k) v_k.
inline cplx inner(const PeriodicField& u, const PeriodicField& v) {
  u.check_compatible(v);
  cplx s = 0.0;
  for (int r = 0; r < u.rows(); ++r)
    for (int c = 0; c < u.cols(); ++c) s += u.coeffs(r, c).dot(v.coeffs(r, c));
  return s * u.lattice().cell_volume();
}

}  // namespace homog
