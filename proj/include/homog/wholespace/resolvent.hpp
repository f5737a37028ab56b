#pragma once

#include <cmath>
#include <string>

#include "homog/core/error.hpp"
#include "homog/core/shift.hpp"
#include "homog/core/symbol.hpp"
#include "homog/linalg/krylov.hpp"
#include "homog/torus/coefficient.hpp"
#include "homog/torus/nodal.hpp"
#include "homog/torus/operators.hpp"

namespace homog {

struct ResolventSolution {
  Shift shift;
  double eps = 0.0;  // 0 for the effective problem
  PeriodicField u;
  PeriodicField rhs;
  double solver_residual = 0.0;
  int iterations = 0;
  double norm_L2 = 0.0, norm_Hp = 0.0;
};

struct ResolventOptions {
  double tol = 1e-12;
  int max_iter = 2000;
  int restart = 60;
};

namespace detail {

inline void finish_norms(ResolventSolution& s, int p) {
  s.norm_L2 = norms(s.u, 0);
  s.norm_Hp = norms(s.u, p);
}

inline CMatrix effective_symbol(const Symbol& b, const CMatrix& g0, const RVector& xi) {
  const CMatrix bx = symbol_eval(b, xi);
  return bx.adjoint() * g0 * bx;
}

}  // namespace detail

/// (A0 - zeta) u = F with A0 = b(D)^* g0 b(D), solved mode by mode.
inline ResolventSolution solve_effective(const CMatrix& g0, const Symbol& b, cplx zeta, const PeriodicField& F) {
  require_dims(F.rows() == b.cols(), "solve_effective: F must have n rows");
  require_dims(g0.rows() == b.rows() && g0.cols() == b.rows(), "solve_effective: g0 must be m x m");
  ResolventSolution s;
  s.shift = Shift::make(zeta);
  s.rhs = F;
  s.u = PeriodicField(F.lattice(), F.grid(), F.rows(), F.cols());
  const int n = b.cols();
  double res = 0.0;
  for (long k = 0; k < F.modes(); ++k) {
    const CMatrix L = detail::effective_symbol(b, g0, F.xi_derivative(k)) - zeta * CMatrix::Identity(n, n);
    Eigen::FullPivLU<CMatrix> lu(L);
    if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-14 * std::pow(std::max(1.0, L.norm()), n)) {
      throw SolverError("solve_effective: L(xi) - zeta is singular at a mode (zeta hits the spectrum)");
    }
    const CMatrix fk = F.coeff_matrix(k);
    const CMatrix uk = lu.solve(fk);
    res = std::max(res, (L * uk - fk).norm());
    s.u.set_coeff_matrix(k, uk);
  }
  s.solver_residual = res;
  detail::finish_norms(s, b.order());
  return s;
}

/// Operator u -> b(D)^* g^eps b(D) u - zeta u on a data torus; g^eps is given by its nodal values
/// on the data grid.
class OscillatoryOperator {
 public:
  OscillatoryOperator(const PeriodicField& g_eps, const CMatrix& g0, const Symbol& b, cplx zeta)
      : mult_(g_eps), g0_(g0), b_(b), zeta_(zeta), lattice_(g_eps.lattice()), shape_(g_eps.grid()) {
    precond_.resize(static_cast<std::size_t>(shape_.total()));
    PeriodicField probe(lattice_, shape_, 1, 1);
    for (long k = 0; k < shape_.total(); ++k) {
      const CMatrix L = detail::effective_symbol(b, g0, probe.xi_derivative(k)) - zeta * CMatrix::Identity(b.cols(), b.cols());
      precond_[k] = L.inverse();
    }
  }

  PeriodicField apply(const PeriodicField& u) const {
    PeriodicField out = apply_bD_adjoint(b_, mult_.apply(apply_bD(b_, u)));
    out -= u * zeta_;
    return out;
  }
  PeriodicField precondition(const PeriodicField& r) const {
    PeriodicField z(lattice_, shape_, r.rows(), r.cols());
    for (long k = 0; k < r.modes(); ++k) z.set_coeff_matrix(k, precond_[k] * r.coeff_matrix(k));
    return z;
  }
  const Lattice& lattice() const { return lattice_; }
  const GridShape& grid() const { return shape_; }
  cplx zeta() const { return zeta_; }

 private:
  NodalMultiplier mult_;
  CMatrix g0_;
  Symbol b_;
  cplx zeta_;
  Lattice lattice_;
  GridShape shape_;
  std::vector<CMatrix> precond_;
};

/// Nodal values of g(x / eps) on the data torus: the cell samples repeated k = 1/eps times.
inline PeriodicField oscillating_coefficient(const CoefficientG& g, double eps) { return rescale_to_eps(g.field(), eps); }

/// (A_eps - zeta) u = F on the torus of F's lattice, with eps = 1/k and the data grid k times the cell grid.
/// Hermitian positive definite shifts (zeta real negative) use PCG, all others right-preconditioned GMRES;
/// the preconditioner is the effective resolvent.
inline ResolventSolution solve_oscillatory(const CoefficientG& g, const CMatrix& g0, const Symbol& b, double eps, cplx zeta,
                                           const PeriodicField& F, const ResolventOptions& opt = {}) {
  require_dims(F.rows() == b.cols(), "solve_oscillatory: F must have n rows");
  const PeriodicField g_eps = oscillating_coefficient(g, eps);
  for (int j = 0; j < F.dim(); ++j) {
    if (F.cutoff()[j] > g_eps.cutoff()[j]) throw DimensionError("solve_oscillatory: F is finer than the data grid");
  }
  const PeriodicField Fd = F.cutoff() == g_eps.cutoff() ? F : resample(F, g_eps.cutoff());
  const OscillatoryOperator op(g_eps, g0, b, zeta);
  ResolventSolution s;
  s.shift = Shift::make(zeta);
  s.eps = eps;
  s.rhs = Fd;
  const int n = Fd.rows(), c = Fd.cols();
  auto A = [&](const CVector& x) { return pack(op.apply(unpack(x, op.lattice(), op.grid(), n, c))); };
  auto M = [&](const CVector& x) { return pack(op.precondition(unpack(x, op.lattice(), op.grid(), n, c))); };
  const CVector rhs = pack(Fd);
  const bool hpd = zeta.imag() == 0.0 && zeta.real() < 0.0;
  KrylovResult res = hpd ? pcg(A, rhs, M, opt.tol, opt.max_iter) : gmres(A, rhs, M, opt.tol, opt.max_iter, opt.restart);
  if (!res.converged) {
    throw SolverError("solve_oscillatory: no convergence at eps = " + std::to_string(eps) + " (relative residual " +
                      std::to_string(res.relative_residual) + ")");
  }
  s.u = unpack(res.x, op.lattice(), op.grid(), n, c);
  s.iterations = res.iterations;
  const double bn = rhs.norm();
  s.solver_residual = bn > 0.0 ? (rhs - A(res.x)).norm() / bn : 0.0;
  detail::finish_norms(s, b.order());
  return s;
}

}  // namespace homog
