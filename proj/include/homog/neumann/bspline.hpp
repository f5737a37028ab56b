#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "homog/core/error.hpp"

namespace homog {

/// Clamped B-spline basis of a given degree on a nondecreasing knot vector.
class BSplineBasis {
 public:
  BSplineBasis() = default;
  BSplineBasis(std::vector<double> knots, int degree) : knots_(std::move(knots)), degree_(degree) {
    if (degree_ < 0) throw DomainError("BSplineBasis: negative degree");
    if (knots_.size() < static_cast<std::size_t>(2 * degree_ + 2)) throw DomainError("BSplineBasis: too few knots");
    for (std::size_t i = 1; i < knots_.size(); ++i)
      if (knots_[i] < knots_[i - 1]) throw DomainError("BSplineBasis: knots must be nondecreasing");
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
      if (knots_[i + 1] > knots_[i]) breaks_.push_back(knots_[i]);
    breaks_.push_back(knots_.back());
  }

  /// Open knot vector on the break points with interior multiplicities `mult` (boundary: degree + 1).
  static BSplineBasis open(const std::vector<double>& breaks, int degree, const std::vector<int>& mult) {
    if (breaks.size() < 2) throw DomainError("BSplineBasis::open: need at least two break points");
    std::vector<double> kv;
    for (int r = 0; r <= degree; ++r) kv.push_back(breaks.front());
    for (std::size_t i = 1; i + 1 < breaks.size(); ++i) {
      const int m = mult.empty() ? 1 : mult[i];
      if (m < 1 || m > degree) throw DomainError("BSplineBasis::open: interior multiplicity out of range");
      for (int r = 0; r < m; ++r) kv.push_back(breaks[i]);
    }
    for (int r = 0; r <= degree; ++r) kv.push_back(breaks.back());
    return BSplineBasis(std::move(kv), degree);
  }

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& breaks() const { return breaks_; }  // distinct knots
  double a() const { return knots_.front(); }
  double b() const { return knots_.back(); }

  /// Knot span index s with knots[s] <= x < knots[s+1] (last nonempty span at the right end).
  int span(double x) const {
    const int n = size();
    if (x >= knots_[n]) {
      int s = n - 1;
      while (s > degree_ && knots_[s] == knots_[s + 1]) --s;
      return s;
    }
    if (x <= knots_[degree_]) return degree_;
    const auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n + 1, x);
    return static_cast<int>(it - knots_.begin()) - 1;
  }

  /// Derivatives 0..nd of the degree + 1 nonzero basis functions at x on span s; out[k][j] is the k-th
  /// derivative of basis s - degree + j.
  std::vector<std::vector<double>> ders(int s, double x, int nd) const {
    const int q = degree_;
    std::vector<std::vector<double>> ndu(q + 1, std::vector<double>(q + 1, 0.0));
    std::vector<double> left(q + 1), right(q + 1);
    ndu[0][0] = 1.0;
    for (int j = 1; j <= q; ++j) {
      left[j] = x - knots_[s + 1 - j];
      right[j] = knots_[s + j] - x;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        ndu[j][r] = right[r + 1] + left[j - r];
        const double t = ndu[r][j - 1] / ndu[j][r];
        ndu[r][j] = saved + right[r + 1] * t;
        saved = left[j - r] * t;
      }
      ndu[j][j] = saved;
    }
    std::vector<std::vector<double>> out(nd + 1, std::vector<double>(q + 1, 0.0));
    for (int j = 0; j <= q; ++j) out[0][j] = ndu[j][q];
    std::vector<std::vector<double>> a(2, std::vector<double>(q + 1, 0.0));
    for (int r = 0; r <= q; ++r) {
      int s1 = 0, s2 = 1;
      a[0][0] = 1.0;
      for (int k = 1; k <= std::min(nd, q); ++k) {
        double d = 0.0;
        const int rk = r - k, pk = q - k;
        if (r >= k) {
          a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
          d = a[s2][0] * ndu[rk][pk];
        }
        const int j1 = rk >= -1 ? 1 : -rk;
        const int j2 = (r - 1 <= pk) ? k - 1 : q - r;
        for (int j = j1; j <= j2; ++j) {
          a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
          d += a[s2][j] * ndu[rk + j][pk];
        }
        if (r <= pk) {
          a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
          d += a[s2][k] * ndu[r][pk];
        }
        out[k][r] = d;
        std::swap(s1, s2);
      }
    }
    double f = q;
    for (int k = 1; k <= std::min(nd, q); ++k) {
      for (int j = 0; j <= q; ++j) out[k][j] *= f;
      f *= (q - k);
    }
    return out;
  }

  /// Greville abscissae; the coefficients of x are these values.
  std::vector<double> greville() const {
    std::vector<double> g(static_cast<std::size_t>(size()));
    for (int i = 0; i < size(); ++i) {
      double s = 0.0;
      for (int r = 1; r <= degree_; ++r) s += knots_[i + r];
      g[i] = degree_ > 0 ? s / degree_ : knots_[i];
    }
    return g;
  }

  /// Continuity order at an interior break point: degree - multiplicity.
  int continuity_at(double x) const {
    const int m = static_cast<int>(std::count(knots_.begin(), knots_.end(), x));
    return degree_ - m;
  }

 private:
  std::vector<double> knots_;
  std::vector<double> breaks_;
  int degree_ = 0;
};

}  // namespace homog
