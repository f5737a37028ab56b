#pragma once

#include <Eigen/Sparse>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "homog/neumann/space.hpp"

namespace homog {

using SpMat = Eigen::SparseMatrix<cplx>;
using CoefFn = std::function<CMatrix(const RVector&)>;
using VecFn = std::function<CVector(const RVector&)>;

struct AssemblyOptions {
  QuadratureSpec quad;
  std::optional<double> period;  // length of one oscillation period of the coefficient, if any
  int panels_per_period = 8;
  int max_subdivisions = 512;
};

/// Matrix-free action of the stiffness and mass forms, point by point with the flux b(D)u formed first and
/// accumulated in extended precision. Used for residuals: the assembled matrices lose ~h^{-2p} u_mach to
/// cancellation, this action loses ~h^{-p} u_mach.
class FormOperator {
 public:
  struct Point {
    std::vector<int> dofs;  // global, component-major
    CMatrix B;              // b(D) of each local dof, m x dofs.size()
    CMatrix G;              // weight x g at the point
    std::vector<double> phi;
    double w = 0.0;
    int nl = 0;             // scalar dofs per component
  };

  FormOperator(int N, std::vector<Point> pts) : N_(N), pts_(std::move(pts)) {}
  int size() const { return N_; }

  CVector stiffness(const CVector& x) const {
    std::vector<lcplx> out(static_cast<std::size_t>(N_));
    for (const auto& pt : pts_) {
      const int m = static_cast<int>(pt.B.rows()), L = static_cast<int>(pt.dofs.size());
      std::vector<lcplx> v(m), t(m);
      for (int r = 0; r < m; ++r)
        for (int j = 0; j < L; ++j) v[r] += lcplx(pt.B(r, j)) * lcplx(x(pt.dofs[j]));
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) t[r] += lcplx(pt.G(r, c)) * v[c];
      for (int j = 0; j < L; ++j)
        for (int r = 0; r < m; ++r) out[pt.dofs[j]] += std::conj(lcplx(pt.B(r, j))) * t[r];
    }
    return to_vector(out);
  }

  CVector mass(const CVector& x) const {
    std::vector<lcplx> out(static_cast<std::size_t>(N_));
    for (const auto& pt : pts_) {
      const int L = static_cast<int>(pt.dofs.size()), n = L / pt.nl;
      for (int c = 0; c < n; ++c) {
        lcplx s = 0.0L;
        for (int j = 0; j < pt.nl; ++j) s += static_cast<long double>(pt.phi[j]) * lcplx(x(pt.dofs[c * pt.nl + j]));
        s *= static_cast<long double>(pt.w);
        for (int j = 0; j < pt.nl; ++j) out[pt.dofs[c * pt.nl + j]] += static_cast<long double>(pt.phi[j]) * s;
      }
    }
    return to_vector(out);
  }

  /// (S - zeta M) x
  CVector shifted(cplx zeta, const CVector& x) const { return stiffness(x) - zeta * mass(x); }

 private:
  using lcplx = std::complex<long double>;
  static CVector to_vector(const std::vector<lcplx>& v) {
    CVector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = cplx(static_cast<double>(v[i].real()), static_cast<double>(v[i].imag()));
    return out;
  }

  int N_;
  std::vector<Point> pts_;
};

struct Assembled {
  SpMat stiffness, mass;
  QuadratureSpec quad;  // rule actually used
  std::shared_ptr<const FormOperator> form;
};

namespace detail {

/// Quadrature refined so that each oscillation period holds at least `panels_per_period` panels.
inline QuadratureSpec resolve_quadrature(const GalerkinSpace& sp, const AssemblyOptions& opt) {
  QuadratureSpec q = opt.quad;
  q.subdivisions = std::max(1, q.subdivisions);
  if (!opt.period) return q;
  const double target = *opt.period / opt.panels_per_period;
  while (sp.finest_panel(q) > target * (1.0 + 1e-12) && q.subdivisions < opt.max_subdivisions) ++q.subdivisions;
  if (*opt.period < 4.0 * sp.finest_panel(q)) {
    throw DomainError("assemble: quadrature under-resolves the oscillation (period < 4 x panel width)");
  }
  return q;
}

inline int alpha_index(const std::vector<MultiIndex>& alphas, const MultiIndex& a) {
  for (std::size_t i = 0; i < alphas.size(); ++i)
    if (alphas[i] == a) return static_cast<int>(i);
  throw DimensionError("alpha_index: multi-index not tabulated");
}

/// b(D)(phi_j e_c) at the point: sum_alpha b_alpha(:, c) (-i)^{|alpha|} d^alpha phi_j.
inline CVector apply_symbol_at(const Symbol& b, const std::vector<MultiIndex>& alphas, const PointData& pd, int j, int c) {
  CVector v = CVector::Zero(b.rows());
  for (const auto& t : b.terms()) {
    const cplx f = std::pow(cplx(0.0, -1.0), t.alpha.order());
    v += t.coeff.col(c) * (f * pd.D[alpha_index(alphas, t.alpha)][j]);
  }
  return v;
}

}  // namespace detail

/// Stiffness of a[u, v] = int <g b(D)u, b(D)v> and the L2 mass matrix.
inline Assembled assemble(const GalerkinSpace& sp, const CoefFn& g, const Symbol& b, const AssemblyOptions& opt = {}) {
  require_dims(b.dim() == sp.dim(), "assemble: symbol dimension differs from the domain dimension");
  require_dims(b.cols() == sp.components(), "assemble: symbol n differs from the number of components");
  if (!sp.conforming(b.order())) throw DomainError("assemble: space is not H^p conforming for this symbol");
  Assembled out;
  out.quad = detail::resolve_quadrature(sp, opt);
  const int p = b.order(), n = b.cols(), nb = sp.scalar_size();
  const auto alphas = multi_indices_up_to(sp.dim(), p);
  std::vector<Eigen::Triplet<cplx>> ts, tm;
  std::vector<CVector> v;
  std::vector<FormOperator::Point> pts;
  sp.for_each_point(p, out.quad, [&](const PointData& pd) {
    const CMatrix G = g(pd.x);
    const int nl = static_cast<int>(pd.dofs.size());
    FormOperator::Point pt;
    pt.nl = nl;
    pt.w = pd.w;
    pt.G = pd.w * G;
    pt.B.resize(b.rows(), nl * n);
    for (int c = 0; c < n; ++c)
      for (int j = 0; j < nl; ++j) {
        pt.dofs.push_back(c * nb + pd.dofs[j]);
        pt.B.col(c * nl + j) = detail::apply_symbol_at(b, alphas, pd, j, c);
      }
    pt.phi = pd.D[0];
    v.assign(static_cast<std::size_t>(nl * n), CVector());
    for (int c = 0; c < n; ++c)
      for (int j = 0; j < nl; ++j) v[c * nl + j] = G * pt.B.col(c * nl + j);
    pts.push_back(std::move(pt));
    for (int ci = 0; ci < n; ++ci)
      for (int i = 0; i < nl; ++i) {
        const CVector bi = detail::apply_symbol_at(b, alphas, pd, i, ci);
        for (int cj = 0; cj < n; ++cj)
          for (int j = 0; j < nl; ++j) ts.emplace_back(ci * nb + pd.dofs[i], cj * nb + pd.dofs[j], pd.w * bi.dot(v[cj * nl + j]));
        for (int j = 0; j < nl; ++j) tm.emplace_back(ci * nb + pd.dofs[i], ci * nb + pd.dofs[j], pd.w * pd.D[0][i] * pd.D[0][j]);
      }
  });
  const int N = sp.dof_count();
  out.stiffness.resize(N, N);
  out.mass.resize(N, N);
  out.stiffness.setFromTriplets(ts.begin(), ts.end());
  out.mass.setFromTriplets(tm.begin(), tm.end());
  out.form = std::make_shared<const FormOperator>(N, std::move(pts));
  return out;
}

inline Assembled assemble_constant(const GalerkinSpace& sp, const CMatrix& g0, const Symbol& b, const AssemblyOptions& opt = {}) {
  return assemble(sp, [g0](const RVector&) { return g0; }, b, opt);
}

/// Gram matrix of the H^s inner product sum_{|beta| <= s} (d^beta u, d^beta v).
inline SpMat hs_gram(const GalerkinSpace& sp, int s, const QuadratureSpec& quad = {}) {
  const int nb = sp.scalar_size(), n = sp.components();
  const auto alphas = multi_indices_up_to(sp.dim(), s);
  std::vector<Eigen::Triplet<cplx>> t;
  sp.for_each_point(s, quad, [&](const PointData& pd) {
    const int nl = static_cast<int>(pd.dofs.size());
    for (std::size_t a = 0; a < alphas.size(); ++a)
      for (int c = 0; c < n; ++c)
        for (int i = 0; i < nl; ++i)
          for (int j = 0; j < nl; ++j) t.emplace_back(c * nb + pd.dofs[i], c * nb + pd.dofs[j], pd.w * pd.D[a][i] * pd.D[a][j]);
  });
  SpMat G(sp.dof_count(), sp.dof_count());
  G.setFromTriplets(t.begin(), t.end());
  return G;
}

/// Load vector (F, phi_i) for F with n components.
inline CVector load_vector(const GalerkinSpace& sp, const VecFn& F, const QuadratureSpec& quad = {}) {
  const int nb = sp.scalar_size(), n = sp.components();
  CVector out = CVector::Zero(sp.dof_count());
  sp.for_each_point(0, quad, [&](const PointData& pd) {
    const CVector f = F(pd.x);
    require_dims(f.size() == n, "load_vector: F must have n components");
    for (int c = 0; c < n; ++c)
      for (std::size_t i = 0; i < pd.dofs.size(); ++i) out(c * nb + pd.dofs[i]) += pd.w * pd.D[0][i] * f(c);
  });
  return out;
}

/// Quadratic-form norm sqrt(u^* A u).
inline double form_norm(const SpMat& A, const CVector& u) { return std::sqrt(std::max(0.0, u.dot(A * u).real())); }

}  // namespace homog
