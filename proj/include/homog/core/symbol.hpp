#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "homog/core/error.hpp"
#include "homog/core/multi_index.hpp"

namespace homog {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// One term b_alpha * xi^alpha of a homogeneous matrix symbol.
struct SymbolTerm {
  MultiIndex alpha;
  CMatrix coeff;  // m x n
};

/// Ellipticity constants of b(theta)^* b(theta) over the unit sphere.
struct Ellipticity {
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  bool rank_ok = false;
};

/// Homogeneous differential symbol b(xi) = sum_{|alpha|=p} b_alpha xi^alpha with
/// constant m x n coefficients. The operator is b(D) with D = -i grad.
class Symbol {
 public:
  Symbol(int d, int p, int m, int n, std::vector<SymbolTerm> terms)
      : d_(d), p_(p), m_(m), n_(n), terms_(std::move(terms)) {
    if (d < 1 || p < 1 || m < 1 || n < 1) throw DomainError("Symbol: d, p, m, n must be positive");
    if (m < n) throw DomainError("Symbol: requires m >= n");
    for (const auto& t : terms_) {
      require_dims(t.alpha.dim() == d, "Symbol: term multi-index has wrong dimension");
      if (t.alpha.order() != p) throw DomainError("Symbol: every term must have order exactly p");
      require_dims(t.coeff.rows() == m && t.coeff.cols() == n, "Symbol: term coefficient must be m x n");
    }
  }

  int dim() const { return d_; }
  int order() const { return p_; }
  int rows() const { return m_; }
  int cols() const { return n_; }
  const std::vector<SymbolTerm>& terms() const { return terms_; }

  const std::optional<Ellipticity>& ellipticity() const { return ellipticity_; }
  void set_ellipticity(const Ellipticity& e) {
    if (e.alpha0 > e.alpha1 + 1e-14 * std::max(1.0, e.alpha1)) {
      throw DomainError("Symbol: alpha0 must not exceed alpha1");
    }
    ellipticity_ = e;
  }

  /// Sum of b_alpha over the terms whose multi-index equals alpha (zero if absent).
  CMatrix coefficient(const MultiIndex& alpha) const {
    CMatrix c = CMatrix::Zero(m_, n_);
    for (const auto& t : terms_) {
      if (t.alpha == alpha) c += t.coeff;
    }
    return c;
  }

  Symbol scaled(cplx s) const {
    auto terms = terms_;
    for (auto& t : terms) t.coeff *= s;
    return Symbol(d_, p_, m_, n_, std::move(terms));
  }

  // Presets used throughout tests and configs.

  /// b(D) = D_1^p in d = 1 (scalar).
  static Symbol power_1d(int p) {
    return Symbol(1, p, 1, 1, {{MultiIndex{p}, CMatrix::Ones(1, 1)}});
  }
  /// b(D) = D (gradient column), m = d, n = 1, p = 1.
  static Symbol gradient(int d) {
    std::vector<SymbolTerm> terms;
    for (int j = 0; j < d; ++j) {
      CMatrix c = CMatrix::Zero(d, 1);
      c(j, 0) = 1.0;
      terms.push_back({MultiIndex::unit(d, j), c});
    }
    return Symbol(d, 1, d, 1, std::move(terms));
  }
  /// Rows (D_1^2, sqrt(2) D_1 D_2, D_2^2) in d = 2, m = 3, n = 1.
  static Symbol hessian_2d() {
    std::vector<SymbolTerm> terms;
    CMatrix c0 = CMatrix::Zero(3, 1), c1 = CMatrix::Zero(3, 1), c2 = CMatrix::Zero(3, 1);
    c0(0, 0) = 1.0;
    c1(1, 0) = std::sqrt(2.0);
    c2(2, 0) = 1.0;
    terms.push_back({MultiIndex{2, 0}, c0});
    terms.push_back({MultiIndex{1, 1}, c1});
    terms.push_back({MultiIndex{0, 2}, c2});
    return Symbol(2, 2, 3, 1, std::move(terms));
  }

 private:
  int d_, p_, m_, n_;
  std::vector<SymbolTerm> terms_;
  std::optional<Ellipticity> ellipticity_;
};

/// xi^alpha for a complex vector xi.
template <class Vec>
cplx monomial(const Vec& xi, const MultiIndex& alpha) {
  cplx v = 1.0;
  for (int j = 0; j < alpha.dim(); ++j) {
    for (int r = 0; r < alpha[j]; ++r) v *= cplx(xi[j]);
  }
  return v;
}

/// b(xi) = sum b_alpha xi^alpha.
inline CMatrix symbol_eval(const Symbol& b, const CVector& xi) {
  require_dims(xi.size() == b.dim(), "symbol_eval: xi has wrong length");
  CMatrix out = CMatrix::Zero(b.rows(), b.cols());
  for (const auto& t : b.terms()) out += monomial(xi, t.alpha) * t.coeff;
  return out;
}

inline CMatrix symbol_eval(const Symbol& b, const RVector& xi) {
  return symbol_eval(b, CVector(xi.cast<cplx>()));
}

/// Deterministic quasi-uniform points on the unit sphere S^{d-1}.
/// d = 1: {+1, -1}; d = 2: equally spaced angles; d = 3: Fibonacci lattice.
inline std::vector<RVector> sphere_points(int d, int samples) {
  if (samples < 1) throw DomainError("sphere_points: samples must be >= 1");
  std::vector<RVector> pts;
  if (d == 1) {
    pts.push_back(RVector::Constant(1, 1.0));
    pts.push_back(RVector::Constant(1, -1.0));
  } else if (d == 2) {
    for (int k = 0; k < samples; ++k) {
      const double t = 2.0 * std::numbers::pi * (k + 0.5) / samples;
      RVector v(2);
      v << std::cos(t), std::sin(t);
      pts.push_back(v);
    }
  } else if (d == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < samples; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / samples;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      RVector v(3);
      v << r * std::cos(golden * k), r * std::sin(golden * k), z;
      pts.push_back(v);
    }
  } else {
    throw DomainError("sphere_points: only d <= 3 is supported");
  }
  return pts;
}

/// Default sphere density: 4096 points for d=2, 16384 for d=3.
inline int default_sphere_samples(int d) { return d == 3 ? 16384 : 4096; }

/// Relative threshold on singular values used for rank decisions.
inline constexpr double kRankTolerance = 1e-8;

/// alpha0/alpha1: extreme eigenvalues of b(theta)^* b(theta) over sampled unit theta.
inline Ellipticity symbol_ellipticity(const Symbol& b, int sphere_samples) {
  Ellipticity e{std::numeric_limits<double>::infinity(), 0.0, false};
  for (const auto& theta : sphere_points(b.dim(), sphere_samples)) {
    const CMatrix bt = symbol_eval(b, theta);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(bt.adjoint() * bt, Eigen::EigenvaluesOnly);
    e.alpha0 = std::min(e.alpha0, es.eigenvalues().minCoeff());
    e.alpha1 = std::max(e.alpha1, es.eigenvalues().maxCoeff());
  }
  // sigma_min > tol * sigma_max  <=>  alpha0 > tol^2 * alpha1
  e.rank_ok = e.alpha0 > kRankTolerance * kRankTolerance * e.alpha1 && e.alpha1 > 0.0;
  return e;
}

namespace detail {

inline double smallest_singular(const Symbol& b, const CVector& xi) {
  Eigen::JacobiSVD<CMatrix> svd(symbol_eval(b, xi));
  return svd.singularValues()(svd.singularValues().size() - 1);
}

inline CVector unpack_sphere(const RVector& x, int d) {
  CVector xi(d);
  for (int j = 0; j < d; ++j) xi(j) = cplx(x(2 * j), x(2 * j + 1));
  return xi / xi.norm();
}

}  // namespace detail

/// Randomized check of maximal rank of b(xi) for nonzero complex xi.
///
/// Each trial draws a random point of the complex unit sphere and then runs a short
/// projected descent on the smallest singular value of b(xi), so isolated complex zeros
/// such as xi = (1, i) for xi_1 + i xi_2 are found from nearby starts. A `true` result
/// is evidence, not a certificate.
inline bool complex_rank_check(const Symbol& b, int trials = 64, unsigned seed = 0) {
  if (trials < 1) throw DomainError("complex_rank_check: trials must be >= 1");
  const int d = b.dim();
  double scale = 0.0;
  for (const auto& t : b.terms()) scale = std::max(scale, t.coeff.norm());
  if (scale == 0.0) return false;
  const double tol = 1e-5 * scale;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto objective = [&](const RVector& x) { return detail::smallest_singular(b, detail::unpack_sphere(x, d)); };

  for (int t = 0; t < trials; ++t) {
    RVector x(2 * d);
    for (int i = 0; i < 2 * d; ++i) x(i) = normal(rng);
    x /= x.norm();
    double f = objective(x);
    double step = 0.25;
    for (int it = 0; it < 300 && f > tol && step > 1e-12; ++it) {
      RVector grad(2 * d);
      const double h = 1e-7;
      for (int i = 0; i < 2 * d; ++i) {
        RVector xp = x;
        xp(i) += h;
        xp /= xp.norm();
        grad(i) = (objective(xp) - f) / h;
      }
      if (grad.norm() == 0.0) break;
      RVector trial = x - step * grad / grad.norm();
      trial /= trial.norm();
      const double ft = objective(trial);
      if (ft < f) {
        x = trial;
        f = ft;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    if (f <= tol) return false;
  }
  return true;
}

}  // namespace homog
