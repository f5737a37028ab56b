#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

#include "homog/core/error.hpp"

namespace homog {

/// Sector factor c(phi): 1/|sin phi| near the positive real axis, 1 on [pi/2, 3pi/2].
inline double c_of_phi(double phi) {
  constexpr double pi = std::numbers::pi;
  if (!(phi > 0.0 && phi < 2.0 * pi)) throw DomainError("c_of_phi: phi must lie in (0, 2pi)");
  if (phi >= pi / 2 && phi <= 3 * pi / 2) return 1.0;
  return 1.0 / std::abs(std::sin(phi));
}

/// Argument of z in [0, 2pi).
inline double arg_0_2pi(std::complex<double> z) {
  double a = std::arg(z);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a;
}

/// A spectral parameter zeta together with its polar angle and sector factor.
/// phi and c_phi are set only when zeta lies off [0, inf).
struct Shift {
  std::complex<double> zeta;
  std::optional<double> phi;
  std::optional<double> c_phi;

  static Shift make(std::complex<double> zeta) {
    Shift s{zeta, std::nullopt, std::nullopt};
    const bool on_half_line = zeta.imag() == 0.0 && zeta.real() >= 0.0;
    if (!on_half_line) {
      s.phi = arg_0_2pi(zeta);
      s.c_phi = c_of_phi(*s.phi);
    }
    return s;
  }
};

/// Weight rho_flat(zeta) for shifts below the cut [c_flat, inf).
inline double rho_flat(std::complex<double> zeta, double c_flat) {
  if (!(c_flat > 0.0)) throw DomainError("rho_flat: c_flat must be positive");
  const std::complex<double> w = zeta - c_flat;
  if (w.imag() == 0.0 && w.real() >= 0.0) throw DomainError("rho_flat: zeta lies on the cut [c_flat, inf)");
  const double c = c_of_phi(arg_0_2pi(w));
  const double r = std::abs(w);
  return r < 1.0 ? c * c / (r * r) : c * c;
}

}  // namespace homog
