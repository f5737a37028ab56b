#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "homog/torus/coefficient.hpp"

namespace homog {

/// g = a on [0, t L), b on [t L, L) along `axis`, times `shape` (an m x m Hermitian PD matrix).
inline CoefficientG two_phase(const Lattice& lat, const std::vector<int>& cutoff, double a, double b, int axis = 0,
                              double fraction = 0.5, const CMatrix& shape = CMatrix::Ones(1, 1)) {
  const double cut = fraction * lat.length(axis);
  std::vector<std::vector<double>> bps(static_cast<std::size_t>(lat.dim()));
  bps[static_cast<std::size_t>(axis)] = {0.0, cut};
  return CoefficientG::from_function(
      lat, cutoff, static_cast<int>(shape.rows()),
      [=](const RVector& x) { CMatrix v = shape * (x(axis) < cut ? a : b); return v; }, bps);
}

/// Trigonometric polynomial g(x) = Q(x)^* Q(x) + delta 1 with Q of band `band` and
/// seeded Gaussian coefficients; Hermitian and positive definite everywhere.
inline PointwiseG random_trig_function(const Lattice& lat, int m, int band, unsigned seed, double delta = 0.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  const int d = lat.dim();
  std::vector<std::vector<int>> ks;
  std::vector<int> cur(static_cast<std::size_t>(d), -band);
  while (true) {
    ks.push_back(cur);
    int j = d - 1;
    while (j >= 0 && cur[j] == band) cur[j--] = -band;
    if (j < 0) break;
    ++cur[j];
  }
  std::vector<CMatrix> qs;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    int order = 0;
    for (int v : ks[i]) order += std::abs(v);
    const double decay = 0.5 / (1.0 + order);
    CMatrix q(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) q(r, c) = decay * cplx(n(rng), n(rng)) / std::sqrt(2.0 * m);
    if (order == 0) q += CMatrix::Identity(m, m);
    qs.push_back(q);
  }
  return [=](const RVector& x) {
    CMatrix q = CMatrix::Zero(m, m);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      double t = 0.0;
      for (int j = 0; j < d; ++j) t += 2.0 * std::numbers::pi * ks[i][j] * x(j) / lat.length(j);
      q += qs[i] * std::exp(cplx(0.0, t));
    }
    CMatrix g = q.adjoint() * q + delta * CMatrix::Identity(m, m);
    return CMatrix(0.5 * (g + g.adjoint()));
  };
}

inline CoefficientG random_trig(const Lattice& lat, const std::vector<int>& cutoff, int m, int band, unsigned seed,
                                double delta = 0.5) {
  return CoefficientG::from_function(lat, cutoff, m, random_trig_function(lat, m, band, seed, delta));
}

}  // namespace homog
