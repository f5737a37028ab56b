#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "homog/neumann/assembly.hpp"

namespace homog {

struct NeumannSolution {
  CVector u;
  double residual = 0.0;  // normwise backward error of (S - zeta M) u = rhs
};

namespace detail {

inline double norm1(const SpMat& A) {
  Eigen::VectorXd col = Eigen::VectorXd::Zero(A.cols());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it) col(it.col()) += std::abs(it.value());
  return col.size() ? col.maxCoeff() : 0.0;
}

}  // namespace detail

namespace detail {

inline void check_off_spectrum(const SpMat& M, cplx zeta, const CVector& u, const CVector& rhs) {
  // |u|_M <= |M^{-1} rhs|_M / dist(zeta, spectrum)
  SpMat Mc = M;
  Mc.makeCompressed();
  Eigen::SparseLU<SpMat> mlu(Mc);
  const CVector w = mlu.solve(rhs);
  const double um = std::sqrt(std::abs(u.dot(M * u))), wm = std::sqrt(std::abs(w.dot(rhs)));
  if (wm < 1e-10 * std::max(1.0, std::abs(zeta)) * um) throw SolverError("solve_neumann: zeta within 1e-10 of the discrete spectrum");
}

inline Eigen::SparseLU<SpMat>& factor(Eigen::SparseLU<SpMat>& lu, const SpMat& S, const SpMat& M, cplx zeta) {
  SpMat A = S - zeta * M;
  A.makeCompressed();
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SolverError("solve_neumann: singular pencil shift (factorization failed)");
  return lu;
}

}  // namespace detail

/// (S - zeta M) u = rhs by sparse LU; refuses shifts within 1e-10 (relative) of the discrete spectrum.
inline NeumannSolution solve_neumann_load(const SpMat& S, const SpMat& M, cplx zeta, const CVector& rhs) {
  NeumannSolution out;
  if (rhs.norm() == 0.0) {
    out.u = CVector::Zero(rhs.size());
    return out;
  }
  Eigen::SparseLU<SpMat> lu;
  detail::factor(lu, S, M, zeta);
  out.u = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !out.u.allFinite()) throw SolverError("solve_neumann: singular pencil shift");
  const SpMat A = S - zeta * M;
  out.residual = (A * out.u - rhs).norm() / (detail::norm1(A) * out.u.norm() + rhs.norm());
  if (out.residual > 1e-10) throw SolverError("solve_neumann: inaccurate solve (backward error above 1e-10)");
  detail::check_off_spectrum(M, zeta, out.u, rhs);
  return out;
}

/// Factorization of S - zeta M with iterative refinement against the matrix-free form action.
class ShiftedSolver {
 public:
  ShiftedSolver(const Assembled& A, cplx zeta, int max_refine = 8) : A_(A), zeta_(zeta), max_refine_(max_refine) {
    detail::factor(lu_, A.stiffness, A.mass, zeta);
  }

  /// Solution of (A - zeta) u = rhs; `residual` is |rhs - (A - zeta) u| / |rhs| with the matrix-free action.
  NeumannSolution solve(const CVector& rhs, bool check_spectrum = true) const {
    NeumannSolution out;
    if (rhs.norm() == 0.0) {
      out.u = CVector::Zero(rhs.size());
      return out;
    }
    out.u = lu_.solve(rhs);
    if (!out.u.allFinite()) throw SolverError("solve_neumann: singular pencil shift");
    if (A_.form) {
      double last = std::numeric_limits<double>::infinity();
      for (int it = 0; it < max_refine_; ++it) {
        const CVector d = lu_.solve(CVector(rhs - A_.form->shifted(zeta_, out.u)));
        const double dn = d.norm();
        if (!(dn < last)) break;
        out.u += d;
        last = dn;
        if (dn <= 1e-15 * out.u.norm()) break;
      }
      if (!(last < 1e-6 * out.u.norm())) throw SolverError("solve_neumann: iterative refinement did not converge");
      out.residual = (rhs - A_.form->shifted(zeta_, out.u)).norm() / rhs.norm();
    } else {
      const SpMat B = A_.stiffness - zeta_ * A_.mass;
      out.residual = (B * out.u - rhs).norm() / (detail::norm1(B) * out.u.norm() + rhs.norm());
      if (out.residual > 1e-10) throw SolverError("solve_neumann: inaccurate solve (backward error above 1e-10)");
    }
    if (check_spectrum) detail::check_off_spectrum(A_.mass, zeta_, out.u, rhs);
    return out;
  }

  CMatrix solve_block(const CMatrix& R) const {
    CMatrix X(R.rows(), R.cols());
    for (int c = 0; c < R.cols(); ++c) X.col(c) = solve(R.col(c), false).u;
    return X;
  }

 private:
  const Assembled& A_;
  cplx zeta_;
  int max_refine_;
  mutable Eigen::SparseLU<SpMat> lu_;
};

inline NeumannSolution solve_assembled(const Assembled& A, cplx zeta, const CVector& rhs) {
  if (rhs.norm() == 0.0) return {CVector::Zero(rhs.size()), 0.0};
  return ShiftedSolver(A, zeta).solve(rhs);
}

/// (A - zeta) u = F for F given by its coefficients in the space, with refinement.
inline NeumannSolution solve_neumann(const Assembled& A, cplx zeta, const CVector& F) {
  return solve_assembled(A, zeta, A.form ? A.form->mass(F) : CVector(A.mass * F));
}

inline NeumannSolution solve_neumann(const SpMat& S, const SpMat& M, cplx zeta, const CVector& F) {
  return solve_neumann_load(S, M, zeta, M * F);
}

struct Eigenpairs {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // M-orthonormal columns
};

namespace detail {

inline CMatrix apply_cols(const std::function<CVector(const CVector&)>& f, const CMatrix& X) {
  CMatrix Y(X.rows(), X.cols());
  for (int c = 0; c < X.cols(); ++c) Y.col(c) = f(X.col(c));
  return Y;
}

}  // namespace detail

/// The `count` smallest eigenpairs of S x = lambda M x (S Hermitian PSD, M HPD): a dense start for small
/// problems, then shifted subspace iteration with refined solves and matrix-free Rayleigh-Ritz.
inline Eigenpairs lowest_eigenpairs(const Assembled& A, int count, double shift = 1.0, double tol = 1e-13,
                                    int dense_limit = 300) {
  const int N = static_cast<int>(A.stiffness.rows());
  count = std::min(count, N);
  const int block = std::min(N, count + 4);
  auto Sx = [&](const CVector& x) { return A.form ? A.form->stiffness(x) : CVector(A.stiffness * x); };
  auto Mx = [&](const CVector& x) { return A.form ? A.form->mass(x) : CVector(A.mass * x); };
  CMatrix X(N, block);
  if (N <= dense_limit) {
    const CMatrix Sd = CMatrix(A.stiffness), Md = CMatrix(A.mass);
    Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> es(0.5 * (Sd + Sd.adjoint()), 0.5 * (Md + Md.adjoint()));
    if (es.info() != Eigen::Success) throw SolverError("lowest_eigenpairs: dense eigensolver failed");
    X = es.eigenvectors().leftCols(block);
  } else {
    for (int j = 0; j < block; ++j)
      for (int i = 0; i < N; ++i) X(i, j) = std::cos(0.37 * (i + 1) * (j + 1)) + 0.1 * j;
  }
  const ShiftedSolver solver(A, -shift);
  Eigenpairs out;
  Eigen::VectorXd prev = Eigen::VectorXd::Constant(count, std::numeric_limits<double>::infinity());
  for (int it = 0; it < 2000; ++it) {
    const CMatrix Y = solver.solve_block(detail::apply_cols(Mx, X));
    const CMatrix SY = detail::apply_cols(Sx, Y), MY = detail::apply_cols(Mx, Y);
    const CMatrix Sr = Y.adjoint() * SY, Mr = Y.adjoint() * MY;
    Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> es(0.5 * (Sr + Sr.adjoint()), 0.5 * (Mr + Mr.adjoint()));
    X = Y * es.eigenvectors();
    const Eigen::VectorXd vals = es.eigenvalues().head(count);
    const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
    if ((vals - prev).cwiseAbs().maxCoeff() < tol * scale) {
      out.values = vals;
      out.vectors = X.leftCols(count);
      return out;
    }
    prev = vals;
  }
  throw SolverError("lowest_eigenpairs: subspace iteration did not converge");
}

struct KernelZ {
  CMatrix basis;              // M-orthonormal coefficient vectors
  int q = 0;
  Eigen::VectorXd eigenvalues; // the q + 1 smallest of the identity-coefficient pencil
  double lambda_next = 0.0;    // (q+1)-th eigenvalue

  /// L2-orthogonal projection onto Z in coefficient space.
  CVector project(const SpMat& M, const CVector& u) const { return basis * (basis.adjoint() * (M * u)); }
  /// Load vector of P_Z F from the load vector of F.
  CVector project_load(const SpMat& M, const CVector& load) const { return M * (basis * (basis.adjoint() * load)); }
};

/// Kernel of b(D) in the space: eigenvectors of (stiffness with g = 1, mass) below tol x the largest tabulated
/// eigenvalue's scale; requires a gap ratio of at least 10 to the next eigenvalue.
inline KernelZ kernel_Z(const GalerkinSpace& sp, const Symbol& b, double tol = 1e-10, int max_q = 8) {
  const Assembled A = assemble_constant(sp, CMatrix::Identity(b.rows(), b.rows()), b);
  const Eigenpairs ep = lowest_eigenpairs(A, std::min(max_q + 1, sp.dof_count()));
  const double scale = std::max(1.0, std::abs(ep.values(ep.values.size() - 1)));
  KernelZ z;
  while (z.q < ep.values.size() && ep.values(z.q) < tol * scale) ++z.q;
  if (z.q >= ep.values.size()) throw SolverError("kernel_Z: kernel dimension exceeds the tabulated eigenvalues");
  z.lambda_next = ep.values(z.q);
  if (z.q > 0 && z.lambda_next < 10.0 * std::max(std::abs(ep.values(z.q - 1)), tol * scale)) {
    throw SolverError("kernel_Z: ill-separated spectrum (gap ratio < 10)");
  }
  z.basis = ep.vectors.leftCols(z.q);
  z.eigenvalues = ep.values.head(z.q + 1);
  return z;
}

struct GardingResult {
  double k1 = 0.0, k2 = 0.0;
  std::vector<std::pair<double, double>> scan;  // (k2, minimal k1); k1 = inf when infeasible
};

namespace detail {

inline bool psd(const CMatrix& A, double tol) {
  Eigen::LDLT<CMatrix> ldlt(0.5 * (A + A.adjoint()));
  if (ldlt.info() != Eigen::Success) return false;
  return ldlt.vectorD().real().minCoeff() >= -tol;
}

}  // namespace detail

/// Discrete Garding constants such that H^p-Gram <= k1 (b-stiffness with g = 1) + k2 mass: the Pareto point with
/// the smallest feasible k2 on the grid and the smallest k1 for it. (Minimizing k1 k2 degenerates on a
/// finite-dimensional space, where k1 -> 0 once k2 exceeds the discrete spectral radius.)
inline GardingResult estimate_garding(const GalerkinSpace& sp, const Symbol& b, std::vector<double> k2_grid = {}) {
  if (k2_grid.empty())
    for (int j = -8; j <= 40; ++j) k2_grid.push_back(std::pow(2.0, j / 4.0));
  std::sort(k2_grid.begin(), k2_grid.end());
  const Assembled A = assemble_constant(sp, CMatrix::Identity(b.rows(), b.rows()), b);
  const CMatrix G = CMatrix(hs_gram(sp, b.order())), S = CMatrix(A.stiffness), M = CMatrix(A.mass);
  const double tol = 1e-11 * G.diagonal().cwiseAbs().maxCoeff();
  GardingResult r;
  double best = std::numeric_limits<double>::infinity();
  for (double k2 : k2_grid) {
    double hi = 1.0;
    int grow = 0;
    while (!detail::psd(hi * S + k2 * M - G, tol) && grow < 80) {
      hi *= 2.0;
      ++grow;
    }
    if (grow == 80) {
      r.scan.emplace_back(k2, std::numeric_limits<double>::infinity());
      continue;
    }
    double lo = 0.0;
    for (int it = 0; it < 60 && hi - lo > 1e-12 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (detail::psd(mid * S + k2 * M - G, tol) ? hi : lo) = mid;
    }
    r.scan.emplace_back(k2, hi);
    if (!std::isfinite(best)) {
      best = hi;
      r.k1 = hi;
      r.k2 = k2;
    }
  }
  if (!std::isfinite(best)) throw SolverError("estimate_garding: no finite k1 on the k2 grid (coercivity failure)");
  return r;
}

struct SpectralShiftData {
  Eigen::VectorXd lambda_eps, lambda_eff;  // q + 1 smallest eigenvalues of each pencil
  double c_flat = 0.0;
  double margin = 0.9;
  KernelZ Z;

  CVector apply_PZ(const SpMat& M, const CVector& u) const { return Z.project(M, u); }
  CVector apply_P(const SpMat& M, const CVector& u) const { return u - Z.project(M, u); }
};

/// (q+1)-th eigenvalues of the oscillating and effective pencils and c_flat = margin x their minimum.
inline SpectralShiftData spectral_shift(const Assembled& A_eps, const Assembled& A_eff, const KernelZ& Z, double margin = 0.9) {
  SpectralShiftData d;
  d.Z = Z;
  d.margin = margin;
  const int q = Z.q;
  d.lambda_eps = lowest_eigenpairs(A_eps, q + 1).values;
  d.lambda_eff = lowest_eigenpairs(A_eff, q + 1).values;
  const double l2 = std::min(d.lambda_eps(q), d.lambda_eff(q));
  for (int i = 0; i < q; ++i) {
    if (std::abs(d.lambda_eps(i)) > 1e-8 * l2 || std::abs(d.lambda_eff(i)) > 1e-8 * l2)
      throw SolverError("spectral_shift: kernel eigenvalues are not separated from the spectrum");
  }
  d.c_flat = margin * l2;
  return d;
}

}  // namespace homog
