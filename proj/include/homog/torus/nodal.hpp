#pragma once

#include <vector>

#include "homog/core/error.hpp"
#include "homog/torus/periodic_field.hpp"

namespace homog {

/// Multiplication by a matrix function known at the collocation nodes: w -> g w.
class NodalMultiplier {
 public:
  NodalMultiplier(const PeriodicField& g)
      : lattice_(g.lattice()), shape_(g.grid()), rows_(g.rows()), cols_(g.cols()) {
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) comps_.push_back(g.grid_component(r, c));
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const GridShape& grid() const { return shape_; }

  PeriodicField apply(const PeriodicField& w) const {
    require_dims(w.rows() == cols_ && w.grid() == shape_, "NodalMultiplier: incompatible field");
    PeriodicField out(lattice_, shape_, rows_, w.cols());
    std::vector<CVector> wg(static_cast<std::size_t>(cols_));
    const double inv = 1.0 / static_cast<double>(shape_.total());
    for (int c = 0; c < w.cols(); ++c) {
      for (int s = 0; s < cols_; ++s) wg[s] = fft_nd(w.coeffs(s, c), shape_, false);
      for (int r = 0; r < rows_; ++r) {
        CVector acc = CVector::Zero(shape_.total());
        for (int s = 0; s < cols_; ++s) acc.array() += comps_[r * cols_ + s].array() * wg[s].array();
        out.coeffs(r, c) = fft_nd(acc, shape_, true) * inv;
      }
    }
    return out;
  }

 private:
  Lattice lattice_;
  GridShape shape_;
  int rows_, cols_;
  std::vector<CVector> comps_;
};

/// Flatten the coefficients of a field (component-major) into one vector.
inline CVector pack(const PeriodicField& f) {
  CVector v(f.rows() * f.cols() * f.modes());
  long off = 0;
  for (int r = 0; r < f.rows(); ++r)
    for (int c = 0; c < f.cols(); ++c) {
      v.segment(off, f.modes()) = f.coeffs(r, c);
      off += f.modes();
    }
  return v;
}

inline PeriodicField unpack(const CVector& v, const Lattice& lattice, const GridShape& shape, int rows, int cols) {
  PeriodicField f(lattice, shape, rows, cols);
  require_dims(v.size() == rows * cols * f.modes(), "unpack: length mismatch");
  long off = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      f.coeffs(r, c) = v.segment(off, f.modes());
      off += f.modes();
    }
  return f;
}

}  // namespace homog
