#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "homog/neumann/space.hpp"
#include "homog/torus/periodic_field.hpp"

namespace homog {

/// k-th derivative of a function of one variable at x.
using DerivFn = std::function<cplx(double, int)>;

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Weighted-reflection extension of functions on [a, b] into a collar of width `collar`, matching derivatives
/// 0..2p-1 at both ends, times a cutoff that equals 1 within collar / 2 of the interval and vanishes at the
/// collar's outer edge.
class ExtensionOperator {
 public:
  ExtensionOperator(const Interval& I, int p, double collar_fraction = 0.25) : I_(I), p_(p) {
    if (p < 1) throw DomainError("ExtensionOperator: p must be positive");
    if (collar_fraction < 0.25) throw DomainError("ExtensionOperator: collar thinner than a quarter of the diameter");
    collar_ = collar_fraction * I.length();
    if (collar_ > I.length()) throw DomainError("ExtensionOperator: collar wider than the interval");
    const int r = 2 * p;
    lambdas_.resize(r);
    for (int i = 0; i < r; ++i) lambdas_[i] = 1.0 / (i + 1);
    Eigen::MatrixXd V(r, r);
    Eigen::VectorXd one = Eigen::VectorXd::Ones(r);
    for (int k = 0; k < r; ++k)
      for (int i = 0; i < r; ++i) V(k, i) = std::pow(-lambdas_[i], k);
    const Eigen::VectorXd w = V.fullPivLu().solve(one);
    weights_.assign(w.data(), w.data() + r);
    // smoothstep S(t) = t^{s+1} sum_k C(s+k, k) C(2s+1, s-k) (-t)^k, C^s with s = 2p
    const int s = 2 * p;
    step_.assign(2 * s + 2, 0.0);
    for (int k = 0; k <= s; ++k) step_[s + 1 + k] = binomial(s + k, k) * binomial(2 * s + 1, s - k) * ((k % 2) ? -1.0 : 1.0);
  }

  const Interval& domain() const { return I_; }
  int order() const { return 2 * p_; }
  double collar() const { return collar_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  const std::vector<double>& weights() const { return weights_; }
  int cutoff_smoothness() const { return 2 * p_; }

  /// k-th derivative of the cutoff at x.
  double cutoff(double x, int k) const {
    double t, sgn;
    const double h = 0.5 * collar_;
    if (x >= I_.a - h && x <= I_.b + h) return k == 0 ? 1.0 : 0.0;
    if (x <= I_.a - collar_ || x >= I_.b + collar_) return 0.0;
    if (x < I_.a) {
      t = (x - (I_.a - collar_)) / h;
      sgn = 1.0;
    } else {
      t = ((I_.b + collar_) - x) / h;
      sgn = -1.0;
    }
    // d^k/dx^k S(t) = S^{(k)}(t) (sgn / h)^k
    double v = 0.0;
    for (std::size_t r = k; r < step_.size(); ++r) {
      double c = step_[r];
      for (int i = 0; i < k; ++i) c *= static_cast<double>(r - i);
      v += c * std::pow(t, static_cast<double>(r - k));
    }
    return v * std::pow(sgn / h, k);
  }

  /// k-th derivative of the reflected function (before the cutoff).
  cplx reflected(const DerivFn& u, double x, int k) const {
    if (x >= I_.a && x <= I_.b) return u(x, k);
    cplx v = 0.0;
    for (std::size_t i = 0; i < lambdas_.size(); ++i) {
      const double l = lambdas_[i];
      const double y = x < I_.a ? I_.a + l * (I_.a - x) : I_.b - l * (x - I_.b);
      v += weights_[i] * std::pow(-l, k) * u(y, k);
    }
    return v;
  }

  /// k-th derivative of P u at x (Leibniz rule with the cutoff).
  cplx eval(const DerivFn& u, double x, int k) const {
    if (x >= I_.a - 0.5 * collar_ && x <= I_.b + 0.5 * collar_) return reflected(u, x, k);
    cplx v = 0.0;
    for (int j = 0; j <= k; ++j) {
      const double c = cutoff(x, j);
      if (c != 0.0) v += binomial(k, j) * c * reflected(u, x, k - j);
    }
    return v;
  }

  DerivFn apply(DerivFn u) const {
    return [self = *this, u = std::move(u)](double x, int k) { return self.eval(u, x, k); };
  }

  /// Samples P u on the torus [a - collar, b + collar) with N nodes; x = a - collar + torus coordinate.
  PeriodicField to_torus(const DerivFn& u, int N) const {
    const Lattice lat({I_.length() + 2 * collar_});
    const double x0 = I_.a - collar_;
    return PeriodicField::sample(lat, {N}, 1, 1, [&](const RVector& y) { return CMatrix::Constant(1, 1, eval(u, x0 + y(0), 0)); });
  }

  /// Ratio |P u|_{H^s(R)} / |u|_{H^s(domain)} for each s = 0..2p, maximized over the probes.
  std::vector<double> measure_norms(const std::vector<DerivFn>& probes, int panels = 64) const {
    std::vector<double> out(2 * p_ + 1, 0.0);
    const GaussRule g = gauss_legendre(12);
    auto hs = [&](const DerivFn& f, double a, double b, int s) {
      double acc = 0.0;
      const double h = (b - a) / panels;
      for (int c = 0; c < panels; ++c)
        for (std::size_t i = 0; i < g.x.size(); ++i) {
          const double x = a + h * (c + g.x[i]);
          for (int j = 0; j <= s; ++j) acc += h * g.w[i] * std::norm(f(x, j));
        }
      return std::sqrt(acc);
    };
    for (const auto& u : probes) {
      const DerivFn Pu = apply(u);
      for (int s = 0; s <= 2 * p_; ++s) {
        const double in = hs(u, I_.a, I_.b, s);
        // the cutoff seams split the outer integrals into smooth pieces
        const double h = 0.5 * collar_;
        const double out2 = std::pow(hs(Pu, I_.a - collar_, I_.a - h, s), 2) + std::pow(hs(Pu, I_.a - h, I_.a, s), 2) +
                            in * in + std::pow(hs(Pu, I_.b, I_.b + h, s), 2) + std::pow(hs(Pu, I_.b + h, I_.b + collar_, s), 2);
        if (in > 0.0) out[s] = std::max(out[s], std::sqrt(out2) / in);
      }
    }
    measured_ = out;
    return out;
  }
  const std::vector<double>& measured_norms() const { return measured_; }

 private:
  Interval I_;
  int p_;
  double collar_ = 0.0;
  std::vector<double> lambdas_, weights_;
  std::vector<double> step_;  // polynomial coefficients of the smoothstep in t
  mutable std::vector<double> measured_;
};

}  // namespace homog
