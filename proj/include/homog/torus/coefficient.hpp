#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "homog/core/error.hpp"
#include "homog/torus/periodic_field.hpp"

namespace homog {

/// Pointwise evaluator of g on the reference cell (coordinates in [0, L)^d, extended periodically).
using PointwiseG = std::function<CMatrix(const RVector&)>;

/// Hermitian, pointwise positive definite coefficient g(x) on the cell.
///
/// `field` holds the nodal samples; `pointwise`, when present, evaluates g exactly at
/// arbitrary points (used by the bounded-domain solvers), and `breakpoints` lists the cell
/// coordinates where g jumps along each axis.
class CoefficientG {
 public:
  CoefficientG(PeriodicField field, std::optional<PointwiseG> pointwise = std::nullopt,
               std::vector<std::vector<double>> breakpoints = {})
      : field_(std::move(field)), pointwise_(std::move(pointwise)), breakpoints_(std::move(breakpoints)) {
    require_dims(field_.rows() == field_.cols(), "CoefficientG: g must be square");
    if (breakpoints_.empty()) breakpoints_.assign(static_cast<std::size_t>(field_.dim()), {});
    g_inf_ = 0.0;
    ginv_inf_ = 0.0;
    min_eig_ = std::numeric_limits<double>::infinity();
    for (const auto& v : field_.grid_values()) {
      if ((v - v.adjoint()).norm() > 1e-10 * std::max(1.0, v.norm())) throw DomainError("CoefficientG: g is not Hermitian at a node");
      Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (v + v.adjoint()), Eigen::EigenvaluesOnly);
      const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
      if (!(lo > 0.0)) throw DomainError("CoefficientG: g is not positive definite at a node");
      min_eig_ = std::min(min_eig_, lo);
      g_inf_ = std::max(g_inf_, hi);
      ginv_inf_ = std::max(ginv_inf_, 1.0 / lo);
    }
  }

  /// Samples `fn` at the nodes of the cutoff grid.
  static CoefficientG from_function(const Lattice& lattice, const std::vector<int>& cutoff, int m, const PointwiseG& fn,
                                    std::vector<std::vector<double>> breakpoints = {}) {
    auto f = PeriodicField::sample(lattice, cutoff, m, m, fn);
    return CoefficientG(std::move(f), fn, std::move(breakpoints));
  }

  static CoefficientG constant(const Lattice& lattice, const std::vector<int>& cutoff, const CMatrix& value) {
    return from_function(lattice, cutoff, static_cast<int>(value.rows()), [value](const RVector&) { return value; });
  }

  const PeriodicField& field() const { return field_; }
  int size() const { return field_.rows(); }
  const Lattice& lattice() const { return field_.lattice(); }
  double g_inf() const { return g_inf_; }
  double ginv_inf() const { return ginv_inf_; }
  double min_eigenvalue() const { return min_eig_; }
  bool has_pointwise() const { return pointwise_.has_value(); }
  const std::vector<std::vector<double>>& breakpoints() const { return breakpoints_; }

  /// g at an arbitrary point of R^d (periodic extension).
  CMatrix at(const RVector& x) const {
    if (!pointwise_) return field_.eval(x);
    RVector y = x;
    for (int j = 0; j < y.size(); ++j) {
      const double l = lattice().length(j);
      y(j) = x(j) - l * std::floor(x(j) / l);
    }
    return (*pointwise_)(y);
  }

  CoefficientG scaled(double s) const {
    if (!(s > 0.0)) throw DomainError("CoefficientG::scaled: s must be positive");
    std::optional<PointwiseG> pw;
    if (pointwise_) {
      auto f = *pointwise_;
      pw = [f, s](const RVector& x) { CMatrix v = f(x) * s; return v; };
    }
    return CoefficientG(field_ * cplx(s), pw, breakpoints_);
  }

  /// Same coefficient sampled on another cutoff; requires the pointwise form.
  CoefficientG resampled(const std::vector<int>& cutoff) const {
    if (!pointwise_) throw DomainError("CoefficientG::resampled: no pointwise evaluator");
    return from_function(lattice(), cutoff, size(), *pointwise_, breakpoints_);
  }

 private:
  PeriodicField field_;
  std::optional<PointwiseG> pointwise_;
  std::vector<std::vector<double>> breakpoints_;
  double g_inf_ = 0.0, ginv_inf_ = 0.0, min_eig_ = 0.0;
};

}  // namespace homog
