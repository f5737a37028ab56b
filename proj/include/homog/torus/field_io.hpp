#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "homog/core/error.hpp"
#include "homog/torus/periodic_field.hpp"

namespace homog {

// Text dump layout (see docs/field_format.md):
//   homog-field 1
//   dim <d>
//   lengths <L_1> ... <L_d>
//   cutoff <N_1> ... <N_d>
//   shape <rows> <cols>
//   then one line per component (row-major over (r, c)) holding N_1*...*N_d pairs
//   "re im" in FFT order (last axis fastest).

inline void write_field(std::ostream& os, const PeriodicField& f) {
  os << "homog-field 1\n";
  os << "dim " << f.dim() << "\n";
  os << std::setprecision(17);
  os << "lengths";
  for (double l : f.lattice().lengths()) os << ' ' << l;
  os << "\ncutoff";
  for (int n : f.cutoff()) os << ' ' << n;
  os << "\nshape " << f.rows() << ' ' << f.cols() << "\n";
  for (int r = 0; r < f.rows(); ++r) {
    for (int c = 0; c < f.cols(); ++c) {
      const CVector& v = f.coeffs(r, c);
      for (long k = 0; k < v.size(); ++k) os << (k ? " " : "") << v(k).real() << ' ' << v(k).imag();
      os << "\n";
    }
  }
}

inline PeriodicField read_field(std::istream& is) {
  std::string tag;
  int version = 0, d = 0;
  if (!(is >> tag >> version) || tag != "homog-field" || version != 1) throw ConfigError("field dump: bad header");
  if (!(is >> tag >> d) || tag != "dim" || d < 1) throw ConfigError("field dump: bad dim line");
  std::vector<double> lengths(static_cast<std::size_t>(d));
  std::vector<int> cutoff(static_cast<std::size_t>(d));
  if (!(is >> tag) || tag != "lengths") throw ConfigError("field dump: missing lengths");
  for (auto& l : lengths)
    if (!(is >> l)) throw ConfigError("field dump: bad lengths");
  if (!(is >> tag) || tag != "cutoff") throw ConfigError("field dump: missing cutoff");
  for (auto& n : cutoff)
    if (!(is >> n)) throw ConfigError("field dump: bad cutoff");
  int rows = 0, cols = 0;
  if (!(is >> tag >> rows >> cols) || tag != "shape") throw ConfigError("field dump: bad shape line");
  PeriodicField f(Lattice(lengths), GridShape(cutoff), rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      CVector& v = f.coeffs(r, c);
      for (long k = 0; k < v.size(); ++k) {
        double re = 0.0, im = 0.0;
        if (!(is >> re >> im)) throw ConfigError("field dump: truncated coefficient data");
        v(k) = cplx(re, im);
      }
    }
  }
  return f;
}

inline void save_field(const std::string& path, const PeriodicField& f) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  write_field(os, f);
}

inline PeriodicField load_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path);
  return read_field(is);
}

}  // namespace homog
