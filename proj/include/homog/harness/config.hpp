#pragma once

#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "homog/core/error.hpp"
#include "homog/core/symbol.hpp"
#include "homog/torus/coefficient_library.hpp"
#include "homog/torus/field_io.hpp"

namespace homog {

using Json = nlohmann::ordered_json;

// Config layout and field meanings: docs/config_schema.md.

struct CoefficientSpec {
  std::string type = "constant";  // constant | two_phase | inverse_sine | random_trig | dump
  Json params = Json::object();
  bool operator==(const CoefficientSpec&) const = default;
};

struct SymbolSpec {
  std::string type = "power";  // power | gradient | hessian
  double scale = 1.0;
  bool operator==(const SymbolSpec&) const = default;
};

/// One addend coef * cos(k x_axis), coef * sin(k x_axis) or coef * x_axis^k.
struct LoadTerm {
  std::string type = "cos";
  double k = 0.0;
  double coef = 1.0;
  int axis = 0;
  bool operator==(const LoadTerm&) const = default;
};

struct LoadSpec {
  std::vector<LoadTerm> terms{{"cos", 0.0, 1.0, 0}};
  bool normalize = false;  // torus problems: scale F to unit L2 norm
  bool operator==(const LoadSpec&) const = default;
};

struct Resolutions {
  int load_cutoff = 16;           // torus grid of F
  int study_elements = 128;       // Neumann effective mesh
  int ref_factor = 8;
  int ref_cells_per_period = 16;
  int probe_count = 8;
  int power_steps = 20;
  bool operator==(const Resolutions&) const = default;
};

struct Seeds {
  unsigned base = 0;
  int count = 20;  // seeded samples per randomized property
  bool operator==(const Seeds&) const = default;
};

struct Tolerances {
  double cell = 1e-10;
  double noise_floor = 1e-10;
  bool operator==(const Tolerances&) const = default;
};

/// Shipped acceptance thresholds; a config may override any of them.
inline std::map<std::string, double> default_thresholds() {
  return {
      {"slope_e_L2", 0.9},
      {"slope_e_Hp", 0.9},
      {"r2", 0.95},
      {"zeta_exponent_margin", 0.15},
      {"corr_plain_ratio", 0.2},
      {"rho_factor", 3.0},
      {"kernel_eigen_ratio", 1e-8},
      {"kernel_identity", 1e-10},
      {"voigt_reuss", 1e-10},
      {"flux_residual", 1e-9},
      {"trivial_lambda", 1e-12},
  };
}

struct StudyConfig {
  int schema_version = 1;
  std::string problem = "wholespace";  // wholespace | neumann
  int d = 1, p = 1, m = 1, n = 1;
  CoefficientSpec coefficient;
  SymbolSpec symbol;
  std::vector<double> lattice{2.0 * std::numbers::pi};
  std::vector<int> cutoff{64};
  std::vector<double> domain{0.0, 1.0};
  LoadSpec F;
  std::vector<double> eps_list{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  std::vector<std::complex<double>> zeta_list{{-1.0, 0.0}};
  double sweep_eps = 1.0 / 32;                      // zeta-sweep on the torus
  std::vector<double> cflat_fractions{0.5, 0.8, 0.9};  // zeta-sweep for Neumann problems: zeta = f c_flat
  Resolutions resolutions;
  Seeds seeds;
  Tolerances tolerances;
  std::map<std::string, double> thresholds = default_thresholds();
  std::string output = "out";

  bool operator==(const StudyConfig&) const = default;
};

namespace detail {

template <class T>
void read_opt(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline std::complex<double> read_complex(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw ConfigError("config: a complex number is [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

/// Builds a config from JSON; missing keys keep their defaults, thresholds merge over the shipped defaults.
inline StudyConfig config_from_json(const Json& j) {
  StudyConfig c;
  try {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    detail::read_opt(j, "schema_version", c.schema_version);
    detail::read_opt(j, "problem", c.problem);
    detail::read_opt(j, "d", c.d);
    detail::read_opt(j, "p", c.p);
    detail::read_opt(j, "m", c.m);
    detail::read_opt(j, "n", c.n);
    if (j.contains("coefficient")) {
      const Json& cj = j.at("coefficient");
      detail::read_opt(cj, "type", c.coefficient.type);
      if (cj.contains("params")) c.coefficient.params = cj.at("params");
    }
    if (j.contains("symbol")) {
      detail::read_opt(j.at("symbol"), "type", c.symbol.type);
      detail::read_opt(j.at("symbol"), "scale", c.symbol.scale);
    }
    detail::read_opt(j, "lattice", c.lattice);
    detail::read_opt(j, "cutoff", c.cutoff);
    detail::read_opt(j, "domain", c.domain);
    if (j.contains("F")) {
      const Json& fj = j.at("F");
      detail::read_opt(fj, "normalize", c.F.normalize);
      if (fj.contains("terms")) {
        c.F.terms.clear();
        for (const auto& t : fj.at("terms")) {
          LoadTerm lt;
          detail::read_opt(t, "type", lt.type);
          detail::read_opt(t, "k", lt.k);
          detail::read_opt(t, "coef", lt.coef);
          detail::read_opt(t, "axis", lt.axis);
          c.F.terms.push_back(lt);
        }
      }
    }
    detail::read_opt(j, "eps_list", c.eps_list);
    if (j.contains("zeta_list")) {
      c.zeta_list.clear();
      for (const auto& z : j.at("zeta_list")) c.zeta_list.push_back(detail::read_complex(z));
    }
    detail::read_opt(j, "sweep_eps", c.sweep_eps);
    detail::read_opt(j, "cflat_fractions", c.cflat_fractions);
    if (j.contains("resolutions")) {
      const Json& r = j.at("resolutions");
      detail::read_opt(r, "load_cutoff", c.resolutions.load_cutoff);
      detail::read_opt(r, "study_elements", c.resolutions.study_elements);
      detail::read_opt(r, "ref_factor", c.resolutions.ref_factor);
      detail::read_opt(r, "ref_cells_per_period", c.resolutions.ref_cells_per_period);
      detail::read_opt(r, "probe_count", c.resolutions.probe_count);
      detail::read_opt(r, "power_steps", c.resolutions.power_steps);
    }
    if (j.contains("seeds")) {
      detail::read_opt(j.at("seeds"), "base", c.seeds.base);
      detail::read_opt(j.at("seeds"), "count", c.seeds.count);
    }
    if (j.contains("tolerances")) {
      detail::read_opt(j.at("tolerances"), "cell", c.tolerances.cell);
      detail::read_opt(j.at("tolerances"), "noise_floor", c.tolerances.noise_floor);
    }
    c.thresholds = default_thresholds();
    if (j.contains("thresholds"))
      for (const auto& [k, v] : j.at("thresholds").items()) c.thresholds[k] = v.get<double>();
    detail::read_opt(j, "output", c.output);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

inline Json config_to_json(const StudyConfig& c) {
  Json j;
  j["schema_version"] = c.schema_version;
  j["problem"] = c.problem;
  j["d"] = c.d;
  j["p"] = c.p;
  j["m"] = c.m;
  j["n"] = c.n;
  j["coefficient"] = {{"type", c.coefficient.type}, {"params", c.coefficient.params}};
  j["symbol"] = {{"type", c.symbol.type}, {"scale", c.symbol.scale}};
  j["lattice"] = c.lattice;
  j["cutoff"] = c.cutoff;
  j["domain"] = c.domain;
  Json terms = Json::array();
  for (const auto& t : c.F.terms) terms.push_back({{"type", t.type}, {"k", t.k}, {"coef", t.coef}, {"axis", t.axis}});
  j["F"] = {{"terms", terms}, {"normalize", c.F.normalize}};
  j["eps_list"] = c.eps_list;
  Json zs = Json::array();
  for (const auto& z : c.zeta_list) zs.push_back({z.real(), z.imag()});
  j["zeta_list"] = zs;
  j["sweep_eps"] = c.sweep_eps;
  j["cflat_fractions"] = c.cflat_fractions;
  const Resolutions& r = c.resolutions;
  j["resolutions"] = {{"load_cutoff", r.load_cutoff},       {"study_elements", r.study_elements},
                      {"ref_factor", r.ref_factor},         {"ref_cells_per_period", r.ref_cells_per_period},
                      {"probe_count", r.probe_count},       {"power_steps", r.power_steps}};
  j["seeds"] = {{"base", c.seeds.base}, {"count", c.seeds.count}};
  j["tolerances"] = {{"cell", c.tolerances.cell}, {"noise_floor", c.tolerances.noise_floor}};
  j["thresholds"] = c.thresholds;
  j["output"] = c.output;
  return j;
}

inline StudyConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

inline std::string serialize_config(const StudyConfig& c) { return config_to_json(c).dump(2) + "\n"; }

/// Reads `path`, or `path.json` when `path` itself does not exist.
inline StudyConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) is.open(path + ".json");
  if (!is) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

/// Whether a run of this kind fits rates over eps_list.
inline bool fits_eps_rates(const std::string& kind) {
  return kind == "wholespace-rates" || kind == "neumann-rates" || kind == "zeta-sweep";
}

/// All violations found, one per entry; empty when the config is usable for `kind` (empty kind: generic checks).
inline std::vector<std::string> config_violations(const StudyConfig& c, const std::string& kind = "") {
  std::vector<std::string> v;
  if (c.schema_version != 1) v.push_back("schema_version must be 1");
  if (c.problem != "wholespace" && c.problem != "neumann") v.push_back("problem must be wholespace or neumann");
  if (c.d < 1 || c.d > 3) v.push_back("d must be 1, 2 or 3");
  if (c.p < 1) v.push_back("p must be >= 1");
  if (c.n < 1 || c.m < c.n) v.push_back("sizes must satisfy m >= n >= 1");
  if (static_cast<int>(c.lattice.size()) != c.d) v.push_back("lattice must list d lengths");
  for (double l : c.lattice)
    if (!(l > 0.0)) v.push_back("lattice lengths must be positive");
  if (static_cast<int>(c.cutoff.size()) != c.d) v.push_back("cutoff must list d grid sizes");
  for (int k : c.cutoff)
    if (k < 2) v.push_back("cutoff sizes must be >= 2");

  const std::string& s = c.symbol.type;
  if (s == "power") {
    if (c.d != 1 || c.m != 1 || c.n != 1) v.push_back("symbol power needs d = m = n = 1");
  } else if (s == "gradient") {
    if (c.p != 1 || c.m != c.d || c.n != 1) v.push_back("symbol gradient needs p = 1, m = d, n = 1");
  } else if (s == "hessian") {
    if (c.d != 2 || c.p != 2 || c.m != 3 || c.n != 1) v.push_back("symbol hessian needs d = 2, p = 2, m = 3, n = 1");
  } else {
    v.push_back("symbol.type must be power, gradient or hessian");
  }
  if (!(c.symbol.scale != 0.0)) v.push_back("symbol.scale must be nonzero");

  const std::string& t = c.coefficient.type;
  const Json& pr = c.coefficient.params;
  if (!pr.is_object()) v.push_back("coefficient.params must be an object");
  if (t == "two_phase") {
    if (pr.is_object() && (!pr.contains("a") || !pr.contains("b"))) v.push_back("two_phase needs params a and b");
  } else if (t == "dump") {
    if (pr.is_object() && !pr.contains("path")) v.push_back("dump needs params.path");
  } else if (t != "constant" && t != "inverse_sine" && t != "random_trig") {
    v.push_back("coefficient.type must be constant, two_phase, inverse_sine, random_trig or dump");
  }

  for (const auto& lt : c.F.terms) {
    if (lt.type != "cos" && lt.type != "sin" && lt.type != "pow") v.push_back("F term type must be cos, sin or pow");
    if (lt.axis < 0 || lt.axis >= c.d) v.push_back("F term axis out of range");
  }

  if (c.eps_list.empty()) {
    v.push_back("eps_list is empty");
  } else {
    for (double e : c.eps_list) {
      const double k = 1.0 / e;
      if (!(e > 0.0) || std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k) || std::round(k) < 1.0)
        v.push_back("eps_list entry " + std::to_string(e) + " is not 1/k for an integer k >= 1");
    }
    for (std::size_t i = 1; i < c.eps_list.size(); ++i)
      if (!(c.eps_list[i] < c.eps_list[i - 1])) {
        v.push_back("eps_list must be strictly decreasing");
        break;
      }
    if (fits_eps_rates(kind) && c.eps_list.size() < 3) v.push_back("eps_list needs at least 3 entries for rate fits");
  }
  if (c.zeta_list.empty() && (kind == "wholespace-rates" || kind == "neumann-rates" || (kind == "zeta-sweep" && c.problem == "wholespace")))
    v.push_back("zeta_list is empty");
  if (kind == "zeta-sweep" && c.problem == "wholespace" && c.zeta_list.size() < 3) v.push_back("zeta-sweep needs at least 3 shifts");
  if (kind == "zeta-sweep" && c.problem == "neumann") {
    if (c.cflat_fractions.empty()) v.push_back("cflat_fractions is empty");
    for (double f : c.cflat_fractions)
      if (!(f > 0.0 && f < 1.0)) v.push_back("cflat_fractions must lie in (0, 1)");
  }
  if (kind == "zeta-sweep" && c.problem == "wholespace") {
    const double k = 1.0 / c.sweep_eps;
    if (!(c.sweep_eps > 0.0) || std::abs(k - std::round(k)) > 1e-9 * k) v.push_back("sweep_eps is not 1/k");
  }
  if (c.problem == "neumann") {
    if (c.d != 1 || c.m != 1 || c.n != 1 || s != "power") v.push_back("neumann problems are 1-D scalar with a power symbol");
    if (c.domain.size() != 2 || !(c.domain[1] > c.domain[0])) v.push_back("domain must be [a, b] with a < b");
  }
  if ((kind == "neumann-rates" || kind == "spectrum") && c.problem != "neumann") v.push_back(kind + " needs problem neumann");
  if (kind == "wholespace-rates" && c.problem != "wholespace") v.push_back("wholespace-rates needs problem wholespace");
  const Resolutions& r = c.resolutions;
  if (r.load_cutoff < 2) v.push_back("resolutions.load_cutoff must be >= 2");
  if (r.study_elements < 4) v.push_back("resolutions.study_elements must be >= 4");
  if (r.ref_factor < 8) v.push_back("resolutions.ref_factor must be >= 8");
  if (r.ref_cells_per_period < 16) v.push_back("resolutions.ref_cells_per_period must be >= 16");
  if (r.probe_count < 1 || r.power_steps < 0) v.push_back("resolutions: probe_count >= 1 and power_steps >= 0");
  if (c.seeds.count < 1) v.push_back("seeds.count must be >= 1");
  if (!(c.tolerances.cell > 0.0) || !(c.tolerances.noise_floor >= 0.0)) v.push_back("tolerances must be positive");
  return v;
}

/// Throws ConfigError listing every violation.
inline void validate_config(const StudyConfig& c, const std::string& kind = "") {
  const auto v = config_violations(c, kind);
  if (v.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& s : v) msg += "\n  - " + s;
  throw ConfigError(msg);
}

inline Symbol build_symbol(const StudyConfig& c) {
  Symbol b = c.symbol.type == "power"      ? Symbol::power_1d(c.p)
             : c.symbol.type == "gradient" ? Symbol::gradient(c.d)
                                           : Symbol::hessian_2d();
  return c.symbol.scale == 1.0 ? b : b.scaled(c.symbol.scale);
}

namespace detail {

inline CMatrix shape_of(const Json& pr, int m) {
  if (!pr.contains("shape")) return CMatrix::Identity(m, m);
  const Json& s = pr.at("shape");
  if (!s.is_array() || static_cast<int>(s.size()) != m) throw ConfigError("coefficient shape must be m x m");
  CMatrix out(m, m);
  for (int r = 0; r < m; ++r) {
    if (!s[r].is_array() || static_cast<int>(s[r].size()) != m) throw ConfigError("coefficient shape must be m x m");
    for (int k = 0; k < m; ++k) out(r, k) = s[r][k].get<double>();
  }
  return out;
}

}  // namespace detail

inline CoefficientG build_coefficient(const StudyConfig& c) {
  const Json& pr = c.coefficient.params;
  const Lattice lat(c.lattice);
  auto num = [&](const char* k, double def) { return pr.contains(k) ? pr.at(k).get<double>() : def; };
  const std::string& t = c.coefficient.type;
  try {
    if (t == "constant") return CoefficientG::constant(lat, c.cutoff, num("value", 1.0) * detail::shape_of(pr, c.m));
    if (t == "two_phase") {
      const int axis = static_cast<int>(num("axis", 0));
      if (axis < 0 || axis >= c.d) throw ConfigError("two_phase axis out of range");
      return two_phase(lat, c.cutoff, num("a", 1.0), num("b", 4.0), axis, num("fraction", 0.5), detail::shape_of(pr, c.m));
    }
    if (t == "inverse_sine") {
      const double shift = num("shift", 2.0);
      const int axis = static_cast<int>(num("axis", 0));
      const CMatrix shape = detail::shape_of(pr, c.m);
      const double L = c.lattice[static_cast<std::size_t>(axis)];
      return CoefficientG::from_function(lat, c.cutoff, c.m, [=](const RVector& x) {
        return CMatrix(shape / (shift + std::sin(2.0 * std::numbers::pi * x(axis) / L)));
      });
    }
    if (t == "random_trig") {
      const unsigned seed = pr.contains("seed") ? pr.at("seed").get<unsigned>() : c.seeds.base;
      return random_trig(lat, c.cutoff, c.m, static_cast<int>(num("band", 2)), seed, num("delta", 0.5));
    }
    if (t == "dump") {
      CoefficientG g(load_field(pr.at("path").get<std::string>()));
      if (g.lattice().dim() != c.d || g.size() != c.m) throw ConfigError("dumped coefficient does not match d and m");
      return g;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("coefficient params: ") + e.what());
  }
  throw ConfigError("unknown coefficient type " + t);
}

/// F at a point of R^d.
inline double eval_load(const LoadSpec& F, const RVector& x) {
  double s = 0.0;
  for (const auto& t : F.terms) {
    const double y = x(t.axis);
    if (t.type == "cos") s += t.coef * std::cos(t.k * y);
    else if (t.type == "sin") s += t.coef * std::sin(t.k * y);
    else s += t.coef * std::pow(y, t.k);
  }
  return s;
}

}  // namespace homog
