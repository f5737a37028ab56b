#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "homog/core/symbol.hpp"

namespace homog {

using LinearMap = std::function<CVector(const CVector&)>;

struct KrylovResult {
  CVector x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  std::vector<double> history;
  // pcg only: quadratic functional 1/2 x*Ax - Re b*x after each step (monotone for exact arithmetic)
  std::vector<double> energy;
};

/// Preconditioned conjugate gradients for a Hermitian positive (semi)definite map.
inline KrylovResult pcg(const LinearMap& A, const CVector& b, const LinearMap& M, double tol, int max_iter,
                        const CVector* x0 = nullptr) {
  KrylovResult res;
  res.x = x0 ? *x0 : CVector::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.x.setZero();
    res.converged = true;
    return res;
  }
  CVector r = b - A(res.x);
  CVector z = M(r);
  CVector p = z;
  cplx rz = r.dot(z);
  res.relative_residual = r.norm() / bnorm;
  res.history.push_back(res.relative_residual);
  auto functional = [&] { return -0.5 * (b.dot(res.x)).real() - 0.5 * (res.x.dot(r)).real(); };
  res.energy.push_back(functional());
  while (res.relative_residual >= tol && res.iterations < max_iter) {
    const CVector Ap = A(p);
    const cplx pAp = p.dot(Ap);
    if (std::abs(pAp) == 0.0) break;
    const cplx alpha = rz / pAp;
    res.x += alpha * p;
    r -= alpha * Ap;
    z = M(r);
    const cplx rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
    ++res.iterations;
    res.relative_residual = r.norm() / bnorm;
    res.history.push_back(res.relative_residual);
    res.energy.push_back(functional());
  }
  res.converged = res.relative_residual < tol;
  return res;
}

/// Restarted GMRES with right preconditioning: solves A M y = b, x = M y.
inline KrylovResult gmres(const LinearMap& A, const CVector& b, const LinearMap& M, double tol, int max_iter,
                          int restart = 50) {
  KrylovResult res;
  const long n = b.size();
  res.x = CVector::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  CVector r = b;
  double beta = r.norm();
  res.relative_residual = beta / bnorm;
  res.history.push_back(res.relative_residual);
  while (res.relative_residual >= tol && res.iterations < max_iter) {
    std::vector<CVector> V;
    CMatrix H = CMatrix::Zero(restart + 1, restart);
    V.push_back(r / beta);
    CVector g = CVector::Zero(restart + 1);
    g(0) = beta;
    std::vector<Eigen::JacobiRotation<cplx>> rots;
    int j = 0;
    for (; j < restart && res.iterations < max_iter; ++j) {
      CVector w = A(M(V[j]));
      for (int i = 0; i <= j; ++i) {
        H(i, j) = V[i].dot(w);
        w -= H(i, j) * V[i];
      }
      H(j + 1, j) = w.norm();
      for (int i = 0; i < j; ++i) {
        Eigen::Matrix<cplx, 2, 1> hv(H(i, j), H(i + 1, j));
        hv.applyOnTheLeft(0, 1, rots[i].adjoint());
        H(i, j) = hv(0);
        H(i + 1, j) = hv(1);
      }
      Eigen::JacobiRotation<cplx> rot;
      cplx rr;
      rot.makeGivens(H(j, j), H(j + 1, j), &rr);
      rots.push_back(rot);
      H(j, j) = rr;
      H(j + 1, j) = 0.0;
      Eigen::Matrix<cplx, 2, 1> gv(g(j), g(j + 1));
      gv.applyOnTheLeft(0, 1, rot.adjoint());
      g(j) = gv(0);
      g(j + 1) = gv(1);
      ++res.iterations;
      res.relative_residual = std::abs(g(j + 1)) / bnorm;
      res.history.push_back(res.relative_residual);
      if (res.relative_residual < tol || std::abs(H(j, j)) == 0.0) {
        ++j;
        break;
      }
      const double wn = w.norm();
      if (wn == 0.0) {
        ++j;
        break;
      }
      V.push_back(w / wn);
    }
    const int kdim = j;
    CVector y = H.topLeftCorner(kdim, kdim).triangularView<Eigen::Upper>().solve(g.head(kdim));
    CVector update = CVector::Zero(n);
    for (int i = 0; i < kdim; ++i) update += y(i) * V[i];
    res.x += M(update);
    r = b - A(res.x);
    beta = r.norm();
    res.relative_residual = beta / bnorm;
    if (beta == 0.0) break;
  }
  res.converged = res.relative_residual < tol;
  return res;
}

}  // namespace homog
