#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "homog/core/error.hpp"
#include "homog/core/symbol.hpp"
#include "homog/torus/fft.hpp"
#include "homog/torus/lattice.hpp"

namespace homog {

/// Gamma-periodic rows x cols matrix field held as trigonometric coefficients
///   F(x) = sum_k F_k e^{i <xi_k, x>},  xi_k = 2 pi k / L,
/// on an even tensor grid. Component (r, c) is stored at slot r * cols + c.
class PeriodicField {
 public:
  PeriodicField() = default;
  PeriodicField(Lattice lattice, GridShape shape, int rows, int cols)
      : lattice_(std::move(lattice)), shape_(std::move(shape)), rows_(rows), cols_(cols) {
    require_dims(lattice_.dim() == shape_.dim(), "PeriodicField: lattice and grid dimensions differ");
    require_dims(rows > 0 && cols > 0, "PeriodicField: empty shape");
    coeffs_.assign(static_cast<std::size_t>(rows * cols), CVector::Zero(shape_.total()));
  }

  static PeriodicField zeros(const Lattice& lattice, const std::vector<int>& cutoff, int rows, int cols) {
    return PeriodicField(lattice, GridShape(cutoff), rows, cols);
  }
  static PeriodicField constant(const Lattice& lattice, const std::vector<int>& cutoff, const CMatrix& value) {
    PeriodicField f(lattice, GridShape(cutoff), static_cast<int>(value.rows()), static_cast<int>(value.cols()));
    for (int r = 0; r < f.rows(); ++r)
      for (int c = 0; c < f.cols(); ++c) f.coeffs(r, c)(0) = value(r, c);
    return f;
  }

  /// Build from collocation values: values(node) is a rows x cols matrix.
  static PeriodicField from_grid(const Lattice& lattice, const GridShape& shape, int rows, int cols,
                                 const std::vector<CMatrix>& values) {
    require_dims(static_cast<long>(values.size()) == shape.total(), "from_grid: wrong node count");
    PeriodicField f(lattice, shape, rows, cols);
    CVector comp(shape.total());
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        for (long i = 0; i < shape.total(); ++i) comp(i) = values[i](r, c);
        f.coeffs(r, c) = fft_nd(comp, shape, true) / static_cast<double>(shape.total());
      }
    }
    return f;
  }

  /// Sample a function of the node coordinates.
  static PeriodicField sample(const Lattice& lattice, const std::vector<int>& cutoff, int rows, int cols,
                              const std::function<CMatrix(const RVector&)>& fn) {
    GridShape shape(cutoff);
    std::vector<CMatrix> vals(static_cast<std::size_t>(shape.total()));
    PeriodicField tmp(lattice, shape, rows, cols);
    for (long i = 0; i < shape.total(); ++i) vals[i] = fn(tmp.node(i));
    return from_grid(lattice, shape, rows, cols, vals);
  }

  const Lattice& lattice() const { return lattice_; }
  const GridShape& grid() const { return shape_; }
  std::vector<int> cutoff() const { return shape_.sizes(); }
  int dim() const { return shape_.dim(); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  long modes() const { return shape_.total(); }

  CVector& coeffs(int r, int c) { return coeffs_[static_cast<std::size_t>(r * cols_ + c)]; }
  const CVector& coeffs(int r, int c) const { return coeffs_[static_cast<std::size_t>(r * cols_ + c)]; }

  /// Coefficient matrix at flat mode index k.
  CMatrix coeff_matrix(long k) const {
    CMatrix m(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) m(r, c) = coeffs(r, c)(k);
    return m;
  }
  void set_coeff_matrix(long k, const CMatrix& m) {
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) coeffs(r, c)(k) = m(r, c);
  }

  CMatrix mean() const { return coeff_matrix(0); }

  /// Integer wavevector of mode k.
  std::vector<int> wavenumbers(long k) const {
    auto idx = shape_.unflatten(k);
    for (int j = 0; j < dim(); ++j) idx[j] = shape_.wavenumber(j, idx[j]);
    return idx;
  }
  /// Dual-lattice vector xi of mode k.
  RVector xi(long k) const {
    const auto idx = shape_.unflatten(k);
    RVector x(dim());
    for (int j = 0; j < dim(); ++j) {
      x(j) = 2.0 * std::numbers::pi * shape_.wavenumber(j, idx[j]) / lattice_.length(j);
    }
    return x;
  }
  /// Wavevector used for differentiation: the Nyquist component is set to zero.
  RVector xi_derivative(long k) const {
    const auto idx = shape_.unflatten(k);
    RVector x = xi(k);
    for (int j = 0; j < dim(); ++j) {
      if (shape_.is_nyquist(j, idx[j])) x(j) = 0.0;
    }
    return x;
  }
  bool has_nyquist(long k) const {
    const auto idx = shape_.unflatten(k);
    for (int j = 0; j < dim(); ++j) {
      if (shape_.is_nyquist(j, idx[j])) return true;
    }
    return false;
  }

  /// Coordinates of collocation node i on [0, L_1) x ... x [0, L_d).
  RVector node(long i) const {
    const auto idx = shape_.unflatten(i);
    RVector x(dim());
    for (int j = 0; j < dim(); ++j) x(j) = lattice_.length(j) * idx[j] / shape_.size(j);
    return x;
  }

  /// Collocation values of component (r, c).
  CVector grid_component(int r, int c) const { return fft_nd(coeffs(r, c), shape_, false); }

  std::vector<CMatrix> grid_values() const {
    std::vector<CMatrix> vals(static_cast<std::size_t>(modes()), CMatrix(rows_, cols_));
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) {
        const CVector g = grid_component(r, c);
        for (long i = 0; i < modes(); ++i) vals[i](r, c) = g(i);
      }
    }
    return vals;
  }

  /// Value at an arbitrary point by direct Fourier summation. The Nyquist mode is
  /// evaluated as a cosine so that real band-limited fields stay real.
  CMatrix eval(const RVector& x) const {
    require_dims(x.size() == dim(), "PeriodicField::eval: point has wrong dimension");
    CMatrix out = CMatrix::Zero(rows_, cols_);
    for (long k = 0; k < modes(); ++k) {
      const auto idx = shape_.unflatten(k);
      cplx phase = 1.0;
      for (int j = 0; j < dim(); ++j) {
        const double t = 2.0 * std::numbers::pi * shape_.wavenumber(j, idx[j]) / lattice_.length(j) * x(j);
        phase *= shape_.is_nyquist(j, idx[j]) ? cplx(std::cos(t), 0.0) : std::exp(cplx(0.0, t));
      }
      for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) out(r, c) += coeffs(r, c)(k) * phase;
    }
    return out;
  }

  PeriodicField& operator+=(const PeriodicField& o) {
    check_compatible(o);
    for (std::size_t s = 0; s < coeffs_.size(); ++s) coeffs_[s] += o.coeffs_[s];
    return *this;
  }
  PeriodicField& operator-=(const PeriodicField& o) {
    check_compatible(o);
    for (std::size_t s = 0; s < coeffs_.size(); ++s) coeffs_[s] -= o.coeffs_[s];
    return *this;
  }
  PeriodicField& operator*=(cplx s) {
    for (auto& v : coeffs_) v *= s;
    return *this;
  }
  friend PeriodicField operator+(PeriodicField a, const PeriodicField& b) { return a += b; }
  friend PeriodicField operator-(PeriodicField a, const PeriodicField& b) { return a -= b; }
  friend PeriodicField operator*(PeriodicField a, cplx s) { return a *= s; }
  friend PeriodicField operator*(cplx s, PeriodicField a) { return a *= s; }

  /// Columns c0 .. c0+count-1 as a new field.
  PeriodicField col_block(int c0, int count) const {
    require_dims(c0 >= 0 && c0 + count <= cols_, "col_block: out of range");
    PeriodicField out(lattice_, shape_, rows_, count);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < count; ++c) out.coeffs(r, c) = coeffs(r, c0 + c);
    return out;
  }
  void set_col_block(int c0, const PeriodicField& block) {
    require_dims(block.rows() == rows_ && c0 + block.cols() <= cols_, "set_col_block: out of range");
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < block.cols(); ++c) coeffs(r, c0 + c) = block.coeffs(r, c);
  }

  PeriodicField adjoint() const {
    // F*(x) = sum conj(F_k) e^{-i xi_k x}: mode k goes to -k.
    PeriodicField out(lattice_, shape_, cols_, rows_);
    for (long k = 0; k < modes(); ++k) {
      const long kk = negated_mode(k);
      for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) out.coeffs(c, r)(kk) = std::conj(coeffs(r, c)(k));
    }
    return out;
  }

  long negated_mode(long k) const {
    auto idx = shape_.unflatten(k);
    for (int j = 0; j < dim(); ++j) idx[j] = shape_.index_of(j, -shape_.wavenumber(j, idx[j]));
    return shape_.flatten(idx);
  }

  void zero_mean() {
    for (auto& v : coeffs_) v(0) = 0.0;
  }

  /// Sum of |coefficient|^2 over all components.
  double coeff_energy() const {
    double s = 0.0;
    for (const auto& v : coeffs_) s += v.squaredNorm();
    return s;
  }

  bool is_hermitian(double tol) const {
    if (rows_ != cols_) return false;
    const auto vals = grid_values();
    for (const auto& v : vals) {
      if ((v - v.adjoint()).norm() > tol * std::max(1.0, v.norm())) return false;
    }
    return true;
  }

  void check_compatible(const PeriodicField& o) const {
    require_dims(o.rows_ == rows_ && o.cols_ == cols_, "PeriodicField: shape mismatch");
    require_dims(o.shape_ == shape_, "PeriodicField: cutoff mismatch");
    require_dims(o.lattice_ == lattice_, "PeriodicField: lattice mismatch");
  }

 private:
  Lattice lattice_{std::vector<double>{1.0}};
  GridShape shape_;
  int rows_ = 0, cols_ = 0;
  std::vector<CVector> coeffs_;
};

}  // namespace homog
