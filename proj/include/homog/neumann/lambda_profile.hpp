#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "homog/torus/coefficient.hpp"

namespace homog {

/// Pointwise corrector Lambda and its derivatives for scalar 1-D problems with b(xi) = c xi^p.
/// There g_tilde = g0 is constant, so b(D) Lambda = g0 / g - 1 and Lambda^{(p)} = (g0 / g - 1) / (c (-i)^p);
/// lower derivatives are periodic zero-mean antiderivatives, held as piecewise polynomials.
class LambdaProfile {
 public:
  struct Options {
    int degree = 12;          // polynomial fit degree per panel
    int panels_per_piece = 0; // 0: 1 between breakpoints, 16 when g has none
  };

  LambdaProfile(const CoefficientG& g, const Symbol& b) : LambdaProfile(g, b, Options{}) {}
  LambdaProfile(const CoefficientG& g, const Symbol& b, Options opt) : p_(b.order()) {
    require_dims(b.dim() == 1 && b.rows() == 1 && b.cols() == 1 && b.terms().size() == 1,
                 "LambdaProfile: scalar 1-D symbol c xi^p required");
    require_dims(g.size() == 1 && g.lattice().dim() == 1, "LambdaProfile: scalar 1-D coefficient required");
    c_ = b.terms()[0].coeff(0, 0);
    ell_ = g.lattice().length(0);
    std::vector<double> cuts{0.0};
    for (double v : g.breakpoints()[0]) {
      const double w = v - ell_ * std::floor(v / ell_);
      if (w > 1e-14 * ell_ && w < ell_ * (1 - 1e-14)) cuts.push_back(w);
    }
    cuts.push_back(ell_);
    std::sort(cuts.begin(), cuts.end());
    const int per = opt.panels_per_piece > 0 ? opt.panels_per_piece : (cuts.size() > 2 ? 1 : 16);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      for (int s = 0; s < per; ++s) edges_.push_back(cuts[i] + (cuts[i + 1] - cuts[i]) * s / per);
    edges_.push_back(ell_);

    // fit 1/g on each panel at Chebyshev points
    const int D = opt.degree;
    std::vector<std::vector<double>> inv(panels());
    for (int k = 0; k < panels(); ++k) {
      const double y0 = edges_[k], w = edges_[k + 1] - y0;
      Eigen::MatrixXd V(D + 1, D + 1);
      Eigen::VectorXd f(D + 1);
      for (int i = 0; i <= D; ++i) {
        const double t = 0.5 * (1.0 - std::cos(std::numbers::pi * (i + 0.5) / (D + 1)));
        RVector y(1);
        y(0) = y0 + w * t;
        f(i) = 1.0 / g.at(y)(0, 0).real();
        for (int r = 0; r <= D; ++r) V(i, r) = std::pow(t, r);
      }
      const Eigen::VectorXd a = V.fullPivLu().solve(f);
      inv[k].assign(a.data(), a.data() + a.size());
    }
    double mean_inv = 0.0;
    for (int k = 0; k < panels(); ++k) mean_inv += integral(inv[k], edges_[k + 1] - edges_[k]);
    mean_inv /= ell_;
    g0_ = 1.0 / mean_inv;

    // Lambda^{(p)} then successive antiderivatives
    const cplx scale = 1.0 / (c_ * std::pow(cplx(0.0, -1.0), p_));
    levels_.assign(p_ + 1, std::vector<std::vector<cplx>>(panels()));
    for (int k = 0; k < panels(); ++k) {
      auto& q = levels_[p_][k];
      q.resize(inv[k].size());
      for (std::size_t r = 0; r < q.size(); ++r) q[r] = scale * g0_ * inv[k][r];
      q[0] -= scale;
    }
    for (int j = p_ - 1; j >= 0; --j) {
      cplx acc = 0.0, mean = 0.0;
      for (int k = 0; k < panels(); ++k) {
        const double w = edges_[k + 1] - edges_[k];
        const auto& f = levels_[j + 1][k];
        std::vector<cplx> F(f.size() + 1, 0.0);
        for (std::size_t r = 0; r < f.size(); ++r) F[r + 1] = f[r] * w / static_cast<double>(r + 1);
        F[0] = acc;
        for (std::size_t r = 1; r < F.size(); ++r) acc += F[r];
        levels_[j][k] = F;
        mean += integral(F, w);
      }
      mean /= ell_;
      for (int k = 0; k < panels(); ++k) levels_[j][k][0] -= mean;
    }
  }

  int order() const { return p_; }
  double g0() const { return g0_; }  // harmonic mean of g
  double period() const { return ell_; }
  int panels() const { return static_cast<int>(edges_.size()) - 1; }

  /// j-th derivative of Lambda at y (0 <= j <= p), periodic in y.
  cplx derivative(double y, int j) const {
    if (j < 0 || j > p_) throw DomainError("LambdaProfile::derivative: order out of range");
    double w = y - ell_ * std::floor(y / ell_);
    if (w >= ell_) w -= ell_;
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), w);
    int k = static_cast<int>(it - edges_.begin()) - 1;
    k = std::clamp(k, 0, panels() - 1);
    const double h = edges_[k + 1] - edges_[k], t = (w - edges_[k]) / h;
    const auto& q = levels_[j][k];
    cplx v = 0.0;
    for (std::size_t r = q.size(); r-- > 0;) v = v * t + q[r];
    return v;
  }

 private:
  template <class T>
  static T integral(const std::vector<T>& a, double w) {
    T s = T(0);
    for (std::size_t r = 0; r < a.size(); ++r) s += a[r] / static_cast<double>(r + 1);
    return s * w;
  }

  int p_;
  cplx c_;
  double ell_ = 1.0, g0_ = 1.0;
  std::vector<double> edges_;
  std::vector<std::vector<std::vector<cplx>>> levels_;  // [j][panel] -> coefficients in t on the panel
};

}  // namespace homog
