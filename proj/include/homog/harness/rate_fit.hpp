#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "homog/core/error.hpp"

namespace homog {

struct RateFit {
  double slope = 0.0;
  double r2 = 0.0;
  double C = 0.0;  // max value / x^slope
};

/// Ordinary least squares of log(value) against log(x).
inline RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw DomainError("fit_rate: need at least 3 pairs");
  const double n = static_cast<double>(pairs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, v] : pairs) {
    if (!(x > 0.0)) throw DomainError("fit_rate: abscissae must be positive");
    if (!(v > 0.0)) throw DomainError("fit_rate: values must be positive");
    const double lx = std::log(x), ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den <= 0.0) throw DomainError("fit_rate: abscissae must not all coincide");
  RateFit f;
  f.slope = (n * sxy - sx * sy) / den;
  const double icpt = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (const auto& [x, v] : pairs) {
    const double ly = std::log(v), pred = icpt + f.slope * std::log(x);
    ss_res += (ly - pred) * (ly - pred);
    ss_tot += (ly - mean) * (ly - mean);
  }
  f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  for (const auto& [x, v] : pairs) f.C = std::max(f.C, v / std::pow(x, f.slope));
  return f;
}

/// (x, value) series for one error quantity with its fitted rate.
struct ConvergenceRecord {
  std::string quantity;
  std::string abscissa = "eps";
  std::vector<std::pair<double, double>> pairs;
  std::optional<double> expected_slope;
  double noise_floor = 0.0;
  bool fitted = false;      // false when some value is within 10x the noise floor
  double slope = 0.0, r2 = 0.0;
  double C = 0.0;           // max value / x^expected_slope (fitted slope when none is expected)
  bool flagged = false;     // R^2 < 0.9 or not fitted

  void fit() {
    fitted = pairs.size() >= 3;
    for (const auto& pv : pairs) fitted = fitted && pv.second > 10.0 * noise_floor && pv.second > 0.0;
    if (fitted) {
      const RateFit f = fit_rate(pairs);
      slope = f.slope;
      r2 = f.r2;
    }
    const double e = expected_slope ? *expected_slope : slope;
    C = 0.0;
    for (const auto& [x, v] : pairs) C = std::max(C, v / std::pow(x, e));
    flagged = !fitted || r2 < 0.9;
  }
};

inline ConvergenceRecord make_record(std::string name, std::vector<std::pair<double, double>> pairs, double noise_floor,
                                     std::optional<double> expected = std::nullopt, std::string abscissa = "eps") {
  ConvergenceRecord r;
  r.quantity = std::move(name);
  r.abscissa = std::move(abscissa);
  r.pairs = std::move(pairs);
  r.noise_floor = noise_floor;
  r.expected_slope = expected;
  r.fit();
  return r;
}

}  // namespace homog
