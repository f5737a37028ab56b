#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "homog/core/multi_index.hpp"
#include "homog/core/symbol.hpp"
#include "homog/neumann/bspline.hpp"

namespace homog {

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule {
  std::vector<double> x, w;
};

inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = 0.5 * (1.0 - z);
    r.x[n - 1 - i] = 0.5 * (1.0 + z);
    r.w[i] = r.w[n - 1 - i] = 0.5 * w;
  }
  return r;
}

struct Interval {
  double a = 0.0, b = 1.0;
  double length() const { return b - a; }
};

struct Rectangle {
  double a1 = 0.0, b1 = 1.0, a2 = 0.0, b2 = 1.0;
};

enum class SpaceFamily { bspline_1d, q1_2d };

/// Values of the derivatives of the nonzero scalar basis functions at one quadrature point.
/// D[a][j] = d^{alphas[a]} phi_{dofs[j]}(x) with alphas = multi_indices_up_to(d, order).
struct PointData {
  RVector x;
  double w = 0.0;
  std::vector<int> dofs;
  std::vector<std::vector<double>> D;
};

struct QuadratureSpec {
  int points = 0;       // Gauss points per panel per axis; 0: degree + 2
  int subdivisions = 1; // panels per element per axis
};

/// Conforming Galerkin space on an interval (B-splines) or rectangle (bilinear) with natural boundary conditions.
/// Functions with n components use component-major coefficient vectors of length n * scalar_size().
class GalerkinSpace {
 public:
  /// B-splines of `degree` on `elements` uniform elements of [a, b] plus the extra break points in `reduced`,
  /// where smoothness drops to C^{smooth_reduced}; elsewhere C^{degree - 1}.
  static GalerkinSpace bspline(const Interval& I, int degree, int elements, const std::vector<double>& reduced = {},
                               int smooth_reduced = -1, int components = 1) {
    if (elements < 1) throw DomainError("GalerkinSpace::bspline: need at least one element");
    if (!(I.b > I.a)) throw DomainError("GalerkinSpace::bspline: empty interval");
    std::vector<double> br;
    for (int e = 0; e <= elements; ++e) br.push_back(I.a + I.length() * e / elements);
    const double tol = 1e-12 * I.length();
    std::vector<int> mult(br.size(), 1);
    for (double r : reduced) {
      if (r <= I.a + tol || r >= I.b - tol) continue;
      auto it = std::lower_bound(br.begin(), br.end(), r - tol);
      if (it != br.end() && std::abs(*it - r) <= tol) continue;
      const auto pos = it - br.begin();
      br.insert(it, r);
      mult.insert(mult.begin() + pos, 1);
    }
    const int s = smooth_reduced < 0 ? degree - 1 : smooth_reduced;
    if (s > degree - 1) throw DomainError("GalerkinSpace::bspline: smoothness exceeds degree - 1");
    for (double r : reduced) {
      for (std::size_t i = 1; i + 1 < br.size(); ++i)
        if (std::abs(br[i] - r) <= tol) mult[i] = degree - s;
    }
    GalerkinSpace sp;
    sp.family_ = SpaceFamily::bspline_1d;
    sp.interval_ = I;
    sp.degree_ = degree;
    sp.components_ = components;
    sp.basis_ = BSplineBasis::open(br, degree, mult);
    sp.min_smooth_ = std::min(degree - 1, s);
    if (reduced.empty()) sp.min_smooth_ = degree - 1;
    return sp;
  }

  /// Bilinear elements on an nx x ny grid of the rectangle.
  static GalerkinSpace q1(const Rectangle& R, int nx, int ny, int components = 1) {
    if (nx < 1 || ny < 1) throw DomainError("GalerkinSpace::q1: need at least one element per axis");
    GalerkinSpace sp;
    sp.family_ = SpaceFamily::q1_2d;
    sp.rect_ = R;
    sp.nx_ = nx;
    sp.ny_ = ny;
    sp.degree_ = 1;
    sp.components_ = components;
    sp.min_smooth_ = 0;
    return sp;
  }

  SpaceFamily family() const { return family_; }
  int dim() const { return family_ == SpaceFamily::bspline_1d ? 1 : 2; }
  int degree() const { return degree_; }
  int components() const { return components_; }
  int scalar_size() const { return family_ == SpaceFamily::bspline_1d ? basis_.size() : (nx_ + 1) * (ny_ + 1); }
  int dof_count() const { return components_ * scalar_size(); }
  const BSplineBasis& basis() const { return basis_; }
  const Interval& interval() const { return interval_; }
  const Rectangle& rectangle() const { return rect_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  /// Global continuity order of the space (C^k); conforming in H^{k+1}.
  int smoothness() const { return min_smooth_; }
  bool conforming(int p) const { return smoothness() >= p - 1 && degree_ >= p; }

  /// Widest quadrature panel for the given spec.
  double finest_panel(const QuadratureSpec& q) const {
    const int sub = std::max(1, q.subdivisions);
    if (family_ == SpaceFamily::q1_2d) {
      return std::max((rect_.b1 - rect_.a1) / nx_, (rect_.b2 - rect_.a2) / ny_) / sub;
    }
    double h = 0.0;
    const auto& br = basis_.breaks();
    for (std::size_t i = 0; i + 1 < br.size(); ++i) h = std::max(h, br[i + 1] - br[i]);
    return h / sub;
  }

  /// Visits every quadrature point with derivatives of order <= `order` of the nonzero scalar basis functions.
  void for_each_point(int order, const QuadratureSpec& q, const std::function<void(const PointData&)>& fn) const {
    const int ng = q.points > 0 ? q.points : degree_ + 2;
    const int sub = std::max(1, q.subdivisions);
    const GaussRule g = gauss_legendre(ng);
    PointData pd;
    if (family_ == SpaceFamily::bspline_1d) {
      const auto& br = basis_.breaks();
      const int nd = order;
      pd.x = RVector(1);
      for (std::size_t e = 0; e + 1 < br.size(); ++e) {
        const double x0 = br[e], h = (br[e + 1] - br[e]) / sub;
        const int s = basis_.span(0.5 * (br[e] + br[e + 1]));
        pd.dofs.resize(degree_ + 1);
        for (int j = 0; j <= degree_; ++j) pd.dofs[j] = s - degree_ + j;
        for (int c = 0; c < sub; ++c) {
          for (int i = 0; i < ng; ++i) {
            const double x = x0 + h * (c + g.x[i]);
            pd.x(0) = x;
            pd.w = h * g.w[i];
            pd.D = basis_.ders(s, x, nd);
            fn(pd);
          }
        }
      }
      return;
    }
    const auto alphas = multi_indices_up_to(2, order);
    const double hx = (rect_.b1 - rect_.a1) / nx_, hy = (rect_.b2 - rect_.a2) / ny_;
    pd.x = RVector(2);
    pd.dofs.resize(4);
    pd.D.assign(alphas.size(), std::vector<double>(4, 0.0));
    for (int ey = 0; ey < ny_; ++ey) {
      for (int ex = 0; ex < nx_; ++ex) {
        pd.dofs = {ey * (nx_ + 1) + ex, ey * (nx_ + 1) + ex + 1, (ey + 1) * (nx_ + 1) + ex, (ey + 1) * (nx_ + 1) + ex + 1};
        for (int cy = 0; cy < sub; ++cy)
          for (int cx = 0; cx < sub; ++cx)
            for (int iy = 0; iy < ng; ++iy)
              for (int ix = 0; ix < ng; ++ix) {
                const double s = (cx + g.x[ix]) / sub, t = (cy + g.x[iy]) / sub;
                pd.x(0) = rect_.a1 + hx * (ex + s);
                pd.x(1) = rect_.a2 + hy * (ey + t);
                pd.w = hx * hy * g.w[ix] * g.w[iy] / (sub * sub);
                const double vx[2] = {1.0 - s, s}, vy[2] = {1.0 - t, t};
                const double dx[2] = {-1.0 / hx, 1.0 / hx}, dy[2] = {-1.0 / hy, 1.0 / hy};
                for (std::size_t a = 0; a < alphas.size(); ++a) {
                  for (int j = 0; j < 4; ++j) {
                    const int jx = j % 2, jy = j / 2;
                    const double fx = alphas[a][0] == 0 ? vx[jx] : (alphas[a][0] == 1 ? dx[jx] : 0.0);
                    const double fy = alphas[a][1] == 0 ? vy[jy] : (alphas[a][1] == 1 ? dy[jy] : 0.0);
                    pd.D[a][j] = fx * fy;
                  }
                }
                fn(pd);
              }
      }
    }
  }

  /// Derivatives 0..nd of the scalar function with coefficients c (component `comp`) at x (1-D only).
  std::vector<cplx> eval_1d(const CVector& c, double x, int nd, int comp = 0) const {
    require_dims(family_ == SpaceFamily::bspline_1d, "GalerkinSpace::eval_1d: interval spaces only");
    require_dims(c.size() == dof_count(), "GalerkinSpace::eval_1d: coefficient length mismatch");
    const int s = basis_.span(x);
    const auto D = basis_.ders(s, x, nd);
    std::vector<cplx> out(nd + 1, 0.0);
    const int off = comp * scalar_size();
    for (int k = 0; k <= nd; ++k)
      for (int j = 0; j <= degree_; ++j) out[k] += D[k][j] * c(off + s - degree_ + j);
    return out;
  }

  /// Spline interpolant of f at the Greville points (1-D); reproduces polynomials of degree <= degree().
  CVector interpolate_1d(const std::function<cplx(double)>& f) const {
    require_dims(family_ == SpaceFamily::bspline_1d, "GalerkinSpace::interpolate_1d: interval spaces only");
    const auto gr = basis_.greville();
    const int n = basis_.size();
    CMatrix A = CMatrix::Zero(n, n);
    CVector rhs(n);
    for (int i = 0; i < n; ++i) {
      const double x = std::min(std::max(gr[i], basis_.a()), basis_.b());
      const int s = basis_.span(x);
      const auto D = basis_.ders(s, x, 0);
      for (int j = 0; j <= degree_; ++j) A(i, s - degree_ + j) = D[0][j];
      rhs(i) = f(x);
    }
    return A.fullPivLu().solve(rhs);
  }

 private:
  SpaceFamily family_ = SpaceFamily::bspline_1d;
  Interval interval_;
  Rectangle rect_;
  BSplineBasis basis_;
  int nx_ = 0, ny_ = 0;
  int degree_ = 1;
  int components_ = 1;
  int min_smooth_ = 0;
};

}  // namespace homog
