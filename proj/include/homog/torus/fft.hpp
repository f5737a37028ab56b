#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <complex>
#include <vector>

#include "homog/core/error.hpp"

namespace homog {

/// Row-major layout of a d-dimensional tensor grid (last axis fastest).
class GridShape {
 public:
  GridShape() = default;
  explicit GridShape(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw DimensionError("GridShape: empty");
    for (int n : dims_) {
      if (n < 2 || n % 2 != 0) throw DimensionError("GridShape: sizes must be even and >= 2");
    }
    strides_.assign(dims_.size(), 1);
    for (int j = static_cast<int>(dims_.size()) - 2; j >= 0; --j) strides_[j] = strides_[j + 1] * dims_[j + 1];
  }

  int dim() const { return static_cast<int>(dims_.size()); }
  int size(int j) const { return dims_[static_cast<std::size_t>(j)]; }
  const std::vector<int>& sizes() const { return dims_; }
  long stride(int j) const { return strides_[static_cast<std::size_t>(j)]; }
  long total() const {
    long t = 1;
    for (int n : dims_) t *= n;
    return t;
  }

  /// Integer wavenumber of index i along axis j: i for i < N/2, i - N otherwise.
  int wavenumber(int j, int i) const { return i < size(j) / 2 ? i : i - size(j); }
  /// Index of wavenumber k along axis j (k taken modulo N).
  int index_of(int j, int k) const {
    const int n = size(j);
    return ((k % n) + n) % n;
  }
  bool is_nyquist(int j, int i) const { return i == size(j) / 2; }

  std::vector<int> unflatten(long flat) const {
    std::vector<int> idx(dims_.size());
    for (int j = 0; j < dim(); ++j) {
      idx[j] = static_cast<int>(flat / stride(j));
      flat %= stride(j);
    }
    return idx;
  }
  long flatten(const std::vector<int>& idx) const {
    long f = 0;
    for (int j = 0; j < dim(); ++j) f += idx[j] * stride(j);
    return f;
  }

  bool operator==(const GridShape& o) const { return dims_ == o.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<long> strides_;
};

/// Multidimensional FFT applied axis by axis.
/// forward: X_k = sum_x x e^{-2 pi i k x / N} (unscaled); inverse: the unscaled adjoint sum.
inline Eigen::VectorXcd fft_nd(const Eigen::VectorXcd& in, const GridShape& shape, bool forward) {
  require_dims(in.size() == shape.total(), "fft_nd: data length does not match grid");
  Eigen::VectorXcd data = in;
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  for (int ax = 0; ax < shape.dim(); ++ax) {
    const int n = shape.size(ax);
    const long st = shape.stride(ax);
    const long total = shape.total();
    std::vector<std::complex<double>> line(n), out(n);
    for (long base = 0; base < total; ++base) {
      // base must have a zero index along ax
      if ((base / st) % n != 0) continue;
      for (int i = 0; i < n; ++i) line[i] = data(base + i * st);
      if (forward) {
        fft.fwd(out, line);
      } else {
        fft.inv(out, line);
      }
      for (int i = 0; i < n; ++i) data(base + i * st) = out[i];
    }
  }
  return data;
}

}  // namespace homog
