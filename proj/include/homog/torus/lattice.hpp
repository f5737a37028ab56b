#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "homog/core/error.hpp"

namespace homog {

/// Rectangular lattice Gamma = L_1 Z x ... x L_d Z with periodicity cell
/// Omega = (-L/2, L/2)^d (up to translation).
class Lattice {
 public:
  explicit Lattice(std::vector<double> lengths) : lengths_(std::move(lengths)) {
    if (lengths_.empty()) throw DomainError("Lattice: need at least one direction");
    for (double l : lengths_) {
      if (!(l > 0.0)) throw DomainError("Lattice: side lengths must be positive");
    }
  }

  static Lattice cube(int d, double length) { return Lattice(std::vector<double>(static_cast<std::size_t>(d), length)); }

  int dim() const { return static_cast<int>(lengths_.size()); }
  double length(int j) const { return lengths_[static_cast<std::size_t>(j)]; }
  const std::vector<double>& lengths() const { return lengths_; }

  /// Columns are the basis vectors n_i.
  Eigen::MatrixXd basis() const {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim(), dim());
    for (int j = 0; j < dim(); ++j) b(j, j) = length(j);
    return b;
  }
  /// Columns are the dual vectors s_i with <s_i, n_j> = 2 pi delta_ij.
  Eigen::MatrixXd dual_basis() const {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim(), dim());
    for (int j = 0; j < dim(); ++j) b(j, j) = 2.0 * std::numbers::pi / length(j);
    return b;
  }

  double cell_volume() const {
    double v = 1.0;
    for (double l : lengths_) v *= l;
    return v;
  }
  /// Half the shortest nonzero dual-lattice vector.
  double r0() const {
    double m = std::numeric_limits<double>::infinity();
    for (double l : lengths_) m = std::min(m, 2.0 * std::numbers::pi / l);
    return 0.5 * m;
  }
  /// Half the diameter of the cell.
  double r1() const {
    double s = 0.0;
    for (double l : lengths_) s += l * l;
    return 0.5 * std::sqrt(s);
  }

  bool operator==(const Lattice& o) const {
    if (o.dim() != dim()) return false;
    for (int j = 0; j < dim(); ++j) {
      if (std::abs(o.length(j) - length(j)) > 1e-12 * length(j)) return false;
    }
    return true;
  }

 private:
  std::vector<double> lengths_;
};

}  // namespace homog
