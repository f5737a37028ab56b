#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "homog/cell/flux_potentials.hpp"
#include "homog/harness/config.hpp"
#include "homog/neumann/studies.hpp"
#include "homog/wholespace/studies.hpp"

namespace homog {

inline constexpr int csv_schema_version = 1;

enum class CheckStatus { pass, fail, skip };

inline const char* to_string(CheckStatus s) { return s == CheckStatus::pass ? "PASS" : s == CheckStatus::fail ? "FAIL" : "SKIP"; }

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::skip;
  std::string detail;
};

/// One long-format CSV row: quantity, abscissa name, abscissa value, shift, value.
struct CsvRow {
  std::string quantity;
  std::string abscissa;
  double x = 0.0;
  cplx zeta;
  double value = 0.0;
};

struct ResultBundle {
  std::string kind;
  StudyConfig config;
  std::vector<CsvRow> rows;
  Json summary = Json::object();
  std::vector<CheckResult> checks;
  std::vector<ConvergenceRecord> records;
  std::vector<std::pair<std::string, PeriodicField>> fields;  // file stem, field
  std::vector<std::string> report;                           // human-readable lines for the terminal

  bool passed() const {
    return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == CheckStatus::fail; });
  }

  std::string csv() const {
    std::string out = "# schema_version=" + std::to_string(csv_schema_version) + "\n";
    out += "quantity,abscissa,x,zeta_re,zeta_im,value\n";
    char buf[256];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%.17g\n", r.x, r.zeta.real(), r.zeta.imag(), r.value);
      out += r.quantity + "," + r.abscissa + buf;
    }
    return out;
  }
};

namespace detail {

inline Json record_json(const ConvergenceRecord& r) {
  Json j;
  j["quantity"] = r.quantity;
  j["abscissa"] = r.abscissa;
  j["fitted"] = r.fitted;
  j["slope"] = r.fitted ? Json(r.slope) : Json(nullptr);
  j["r2"] = r.fitted ? Json(r.r2) : Json(nullptr);
  j["expected_slope"] = r.expected_slope ? Json(*r.expected_slope) : Json(nullptr);
  j["C"] = r.C;
  j["flagged"] = r.flagged;
  return j;
}

inline Json matrix_json(const CMatrix& a) {
  Json j = Json::array();
  for (int r = 0; r < a.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < a.cols(); ++c) row.push_back({a(r, c).real(), a(r, c).imag()});
    j.push_back(row);
  }
  return j;
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string zeta_label(cplx z) { return "zeta=" + fmt(z.real()) + (z.imag() < 0 ? "" : "+") + fmt(z.imag()) + "i"; }

inline void add_record(ResultBundle& b, const ConvergenceRecord& r, cplx zeta, Json& into) {
  b.records.push_back(r);
  for (const auto& [x, v] : r.pairs) b.rows.push_back({r.quantity, r.abscissa, x, zeta, v});
  into[r.quantity] = record_json(r);
  b.report.push_back("  " + r.quantity + ": slope " + (r.fitted ? fmt(r.slope) : std::string("n/a (noise floor)")) +
                     (r.fitted ? ", R2 " + fmt(r.r2) : std::string()) + (r.flagged ? "  [flagged]" : ""));
}

inline void check(ResultBundle& b, std::string name, bool ok, std::string detail) {
  b.checks.push_back({std::move(name), ok ? CheckStatus::pass : CheckStatus::fail, std::move(detail)});
}

inline void skip(ResultBundle& b, std::string name, std::string why) {
  b.checks.push_back({std::move(name), CheckStatus::skip, std::move(why)});
}

/// Slope at least `min` with R^2 at least `r2`; records at the noise floor are skipped, not passed.
inline void slope_check(ResultBundle& b, const std::string& name, const ConvergenceRecord& r, double min, std::optional<double> r2) {
  if (!r.fitted) {
    skip(b, name, "values within 10x the noise floor; no rate to fit");
    return;
  }
  bool ok = r.slope >= min;
  std::string d = "slope " + fmt(r.slope) + " >= " + fmt(min);
  if (r2) {
    ok = ok && r.r2 >= *r2;
    d += ", R2 " + fmt(r.r2) + " >= " + fmt(*r2);
  }
  check(b, name, ok, d);
}

inline PeriodicField torus_load(const StudyConfig& c) {
  const Lattice lat(c.lattice);
  const std::vector<int> cut(static_cast<std::size_t>(c.d), c.resolutions.load_cutoff);
  PeriodicField F = PeriodicField::sample(lat, cut, c.n, 1, [&](const RVector& x) {
    return CMatrix::Constant(c.n, 1, eval_load(c.F, x));
  });
  if (c.F.normalize) {
    const double nf = norms(F, 0);
    if (!(nf > 0.0)) throw ConfigError("F vanishes and cannot be normalized");
    F = F * cplx(1.0 / nf);
  }
  return F;
}

inline NeumannProblem neumann_problem(const StudyConfig& c) {
  NeumannProblem pb;
  pb.g = build_coefficient(c);
  pb.b = build_symbol(c);
  pb.domain = {c.domain[0], c.domain[1]};
  const LoadSpec F = c.F;
  pb.F = [F](double x) { return cplx(eval_load(F, RVector::Constant(1, x))); };
  pb.study_elements = c.resolutions.study_elements;
  pb.ref_factor = c.resolutions.ref_factor;
  pb.ref_cells_per_period = c.resolutions.ref_cells_per_period;
  pb.noise_floor = c.tolerances.noise_floor;
  return pb;
}

inline double threshold(const StudyConfig& c, const std::string& key) {
  const auto it = c.thresholds.find(key);
  if (it == c.thresholds.end()) throw ConfigError("missing threshold " + key);
  return it->second;
}

/// Seeded fields with Gaussian coefficients in |k_j| <= band on every axis, Nyquist modes zero.
inline PeriodicField random_bandlimited(const Lattice& lat, const std::vector<int>& cutoff, int rows, int band, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  PeriodicField f(lat, GridShape(cutoff), rows, 1);
  for (long k = 0; k < f.modes(); ++k) {
    bool inside = !f.has_nyquist(k);
    for (int w : f.wavenumbers(k)) inside = inside && std::abs(w) <= band;
    if (!inside) continue;
    for (int r = 0; r < rows; ++r) f.coeffs(r, 0)(k) = cplx(nd(rng), nd(rng));
  }
  return f;
}

inline EffectiveData effective_of(const StudyConfig& c, const CoefficientG& g, const Symbol& b) {
  CellOptions opt;
  opt.tol = c.tolerances.cell;
  return homogenize(g, b, opt);
}

inline void summarize_effective(ResultBundle& out, const EffectiveData& data) {
  out.summary["g0"] = matrix_json(data.g0);
  out.summary["g_bar"] = matrix_json(data.g_bar);
  out.summary["g_under"] = matrix_json(data.g_under);
  out.summary["cell_residual"] = data.residual;
  out.summary["case_tag"] = to_string(data.case_tag);
}

inline void run_cell(ResultBundle& out) {
  const StudyConfig& c = out.config;
  const CoefficientG g = build_coefficient(c);
  const Symbol b = build_symbol(c);
  const EffectiveData data = effective_of(c, g, b);
  summarize_effective(out, data);
  out.summary["g0_skew"] = data.g0_skew;
  out.summary["iterations"] = data.iterations;
  out.summary["tail_energy"] = data.tail_energy;
  for (int r = 0; r < data.g0.rows(); ++r)
    for (int k = 0; k < data.g0.cols(); ++k) {
      const double idx = r * data.g0.cols() + k;
      out.rows.push_back({"g0_re", "entry", idx, 0.0, data.g0(r, k).real()});
      out.rows.push_back({"g0_im", "entry", idx, 0.0, data.g0(r, k).imag()});
      char buf[128];
      std::snprintf(buf, sizeof buf, "g0[%d,%d] = %.12g%+.3gi", r, k, data.g0(r, k).real(), data.g0(r, k).imag());
      out.report.push_back(buf);
    }
  out.report.push_back("case: " + to_string(data.case_tag) + ", cell residual " + fmt(data.residual));
  out.fields.emplace_back("Lambda", data.Lambda);
  out.fields.emplace_back("g_tilde", data.g_tilde);
  check(out, "cell_residual", data.residual <= 100.0 * c.tolerances.cell, "residual " + fmt(data.residual));
  check(out, "voigt_reuss", voigt_reuss_check(data), "g_under <= g0 <= g_bar");
  if (c.thresholds.count("g0_expected")) {
    const double e = threshold(c, "g0_expected");
    const double tol = c.thresholds.count("g0_tol") ? threshold(c, "g0_tol") : 1e-8;
    const double err = std::abs(data.g0(0, 0) - e);
    check(out, "g0_expected", err < tol, "|g0 - " + fmt(e) + "| = " + fmt(err) + " < " + fmt(tol));
  }
}

inline void run_check(ResultBundle& out) {
  const StudyConfig& c = out.config;
  const CoefficientG g = build_coefficient(c);
  const Symbol b = build_symbol(c);
  const EffectiveData data = effective_of(c, g, b);
  summarize_effective(out, data);
  const double scale = std::max(1.0, data.g_bar.norm());

  check(out, "symbol_rank", complex_rank_check(b, 64, c.seeds.base), "complex maximal-rank condition on seeded points");
  check(out, "cell_residual", data.residual <= 100.0 * c.tolerances.cell, "residual " + fmt(data.residual));
  check(out, "voigt_reuss", voigt_reuss_check(data), "g_under <= g0 <= g_bar for the configured g");

  {
    int bad = 0;
    const Lattice lat(c.lattice);
    std::vector<int> cut = c.cutoff;
    for (int& k : cut) k = std::min(k, 16);
    std::vector<int> fails(static_cast<std::size_t>(c.seeds.count), 0);
    parallel_for(c.seeds.count, [&](int i) {
      const CoefficientG gr = random_trig(lat, cut, c.m, 2, c.seeds.base + static_cast<unsigned>(i));
      CellOptions opt;
      opt.tol = c.tolerances.cell;
      const EffectiveData dr = homogenize(gr, b, opt);
      const double tol = threshold(c, "voigt_reuss") * std::max(1.0, dr.g_bar.norm());
      fails[static_cast<std::size_t>(i)] = min_eigenvalue(dr.g_bar - dr.g0) < -tol || min_eigenvalue(dr.g0 - dr.g_under) < -tol;
    });
    for (int f : fails) bad += f;
    check(out, "voigt_reuss_random", bad == 0, std::to_string(bad) + " violations over " + std::to_string(c.seeds.count) + " seeded g");
  }

  if (data.case_tag == CaseTag::bar_case) {
    const double lam = norms(data.Lambda, 0);
    const double dg = (data.g0 - data.g_bar).norm();
    check(out, "trivial_corrector", lam < threshold(c, "trivial_lambda") && dg <= 1e-12 * scale,
          "|Lambda| = " + fmt(lam) + ", |g0 - g_bar| = " + fmt(dg));
  } else {
    skip(out, "trivial_corrector", "case " + to_string(data.case_tag) + " (Lambda is not expected to vanish)");
  }
  if (data.case_tag == CaseTag::under_case) {
    const double dg = (data.g0 - data.g_under).norm();
    check(out, "under_case_g0", dg <= 1e-10 * scale, "|g0 - g_under| = " + fmt(dg));
  } else {
    skip(out, "under_case_g0", "case " + to_string(data.case_tag) + (data.case_tag == CaseTag::bar_case ? " takes precedence" : ""));
  }

  const LambdaBoundReport lb = lambda_bound_check(data, g, b);
  check(out, "lambda_bounds", lb.ok, "ratios " + fmt(lb.bD_ratio) + " (b(D)Lambda), " + fmt(lb.Hp_ratio) + " (H^p)");

  try {
    const FluxPotentials fp = flux_potentials(data, b);
    double anti = 0.0;
    for (const auto& a : fp.alphas)
      for (const auto& be : fp.alphas) anti = std::max(anti, norms(fp.at(a, be) + fp.at(be, a), 0));
    const double thr = threshold(c, "flux_residual");
    check(out, "flux_potentials", fp.residual_div < thr && fp.residual_repr < thr && anti == 0.0,
          "div " + fmt(fp.residual_div) + ", repr " + fmt(fp.residual_repr) + ", antisymmetry defect " + fmt(anti));
    out.summary["flux_residual_div"] = fp.residual_div;
    out.summary["flux_residual_repr"] = fp.residual_repr;
  } catch (const SolverError& e) {
    check(out, "flux_potentials", false, e.what());
  }

  {
    const Lattice lat(c.lattice);
    const Symbol grad = Symbol::gradient(c.d);
    std::vector<int> cut = c.cutoff;
    for (int& k : cut) k = std::min(k, 32);
    int contraction = 0, smoothing = 0;
    for (int i = 0; i < c.seeds.count; ++i) {
      const PeriodicField u = random_bandlimited(lat, cut, c.n, 6, c.seeds.base + static_cast<unsigned>(i));
      const double nu = norms(u, 0), du = norms(apply_bD(grad, u), 0);
      for (double e : c.eps_list) {
        const PeriodicField su = apply_steklov(u, e);
        contraction += norms(su, 0) > nu * (1.0 + 1e-14);
        smoothing += norms(su - u, 0) > e * lat.r1() * du * (1.0 + 1e-12);
      }
    }
    const std::string n = " violations over " + std::to_string(c.seeds.count) + " fields x " + std::to_string(c.eps_list.size()) + " eps";
    check(out, "steklov_contraction", contraction == 0, std::to_string(contraction) + n);
    check(out, "steklov_smoothing_bound", smoothing == 0, std::to_string(smoothing) + n);
  }
  out.summary["multiplier_condition"] = multiplier_condition(c.p, c.d, data.case_tag);
}

inline void run_wholespace_rates(ResultBundle& out) {
  const StudyConfig& c = out.config;
  const CoefficientG g = build_coefficient(c);
  const Symbol b = build_symbol(c);
  const EffectiveData data = effective_of(c, g, b);
  summarize_effective(out, data);
  const PeriodicField F = torus_load(c);
  StudyOptions opt;
  opt.noise_floor = c.tolerances.noise_floor;
  Json studies = Json::array();
  for (cplx z : c.zeta_list) {
    const WholespaceStudy s = wholespace_error_study(g, b, data, z, F, c.eps_list, opt);
    Json js;
    js["zeta"] = {z.real(), z.imag()};
    out.report.push_back(zeta_label(z));
    for (const auto* r : {&s.e_L2, &s.e_Hp, &s.e_Hp_plain, &s.e_flux}) add_record(out, *r, z, js);
    studies.push_back(js);
    const std::string tag = " [" + zeta_label(z) + "]";
    slope_check(out, "slope_e_L2" + tag, s.e_L2, threshold(c, "slope_e_L2"), threshold(c, "r2"));
    slope_check(out, "slope_e_Hp" + tag, s.e_Hp, threshold(c, "slope_e_Hp"), threshold(c, "r2"));
  }
  out.summary["studies"] = studies;
}

inline void run_neumann_rates(ResultBundle& out) {
  const StudyConfig& c = out.config;
  const NeumannProblem pb = neumann_problem(c);
  Json studies = Json::array();
  for (cplx z : c.zeta_list) {
    const NeumannStudy s = neumann_error_study(pb, c.eps_list, z);
    out.summary["g0"] = s.g0;
    Json js;
    js["zeta"] = {z.real(), z.imag()};
    out.report.push_back(zeta_label(z));
    for (const auto* r : {&s.e_L2, &s.e_Hp_corr, &s.e_Hp_plain, &s.e_flux}) add_record(out, *r, z, js);
    if (s.e_Hp_corr0) add_record(out, *s.e_Hp_corr0, z, js);
    for (const auto& r : s.rows) out.rows.push_back({"ref_elements", "eps", r.eps, z, static_cast<double>(r.ref_elements)});
    double lo = 1e300, hi = 0.0;
    for (const auto& r : s.rows) {
      lo = std::min(lo, r.e_Hp_corr / std::sqrt(r.eps));
      hi = std::max(hi, r.e_Hp_corr / std::sqrt(r.eps));
    }
    js["hp_corr_variation"] = hi > 0.0 ? (hi - lo) / hi : 0.0;
    studies.push_back(js);
    const std::string tag = " [" + zeta_label(z) + "]";
    slope_check(out, "slope_e_L2" + tag, s.e_L2, threshold(c, "slope_e_L2"), std::nullopt);
    const auto& last = s.rows.back();
    if (last.e_Hp_plain > 10.0 * c.tolerances.noise_floor) {
      const double ratio = last.e_Hp_corr / last.e_Hp_plain;
      check(out, "corrected_vs_plain" + tag, ratio < threshold(c, "corr_plain_ratio"),
            "e_Hp_corr / e_Hp_plain = " + fmt(ratio) + " at the smallest eps");
    } else {
      skip(out, "corrected_vs_plain" + tag, "plain error at the noise floor");
    }
    if (c.thresholds.count("hp_corr_variation")) {
      const double v = js["hp_corr_variation"].get<double>();
      check(out, "hp_corr_variation" + tag, v < threshold(c, "hp_corr_variation"), "variation of e_Hp_corr / eps^{1/2} = " + fmt(v));
    }
  }
  out.summary["studies"] = studies;
}

inline void run_zeta_sweep(ResultBundle& out) {
  const StudyConfig& c = out.config;
  if (c.problem == "wholespace") {
    const CoefficientG g = build_coefficient(c);
    const Symbol b = build_symbol(c);
    const EffectiveData data = effective_of(c, g, b);
    summarize_effective(out, data);
    const PeriodicField F = torus_load(c);
    ProbeOptions po;
    po.count = c.resolutions.probe_count;
    po.power_steps = c.resolutions.power_steps;
    po.seed = c.seeds.base;
    StudyOptions opt;
    opt.noise_floor = c.tolerances.noise_floor;
    const ZetaScalingStudy s = zeta_scaling_study(g, b, data, c.sweep_eps, c.zeta_list, po, opt, &F);
    Json js;
    add_record(out, s.record, 0.0, js);
    if (s.fixed) add_record(out, *s.fixed, 0.0, js);
    out.summary["sweep_eps"] = c.sweep_eps;
    out.summary["records"] = js;
    const double limit = -(1.0 - 1.0 / (2.0 * c.p)) + threshold(c, "zeta_exponent_margin");
    if (s.degenerate) {
      skip(out, "zeta_exponent", "operator-norm estimate at the noise floor");
    } else {
      check(out, "zeta_exponent", s.record.slope <= limit, "exponent " + fmt(s.record.slope) + " <= " + fmt(limit));
    }
    return;
  }
  const NeumannProblem pb = neumann_problem(c);
  const double cf = problem_c_flat(pb, c.eps_list);
  out.summary["c_flat"] = cf;
  out.report.push_back("c_flat = " + fmt(cf));
  std::vector<double> fr = c.cflat_fractions;
  std::sort(fr.begin(), fr.end());
  std::vector<BResolventStudy> runs;
  Json studies = Json::array();
  for (double f : fr) {
    const cplx z = f * cf;
    runs.push_back(b_resolvent_study(pb, z, c.eps_list, cf));
    const BResolventStudy& s = runs.back();
    Json js;
    js["fraction"] = f;
    js["zeta"] = {z.real(), z.imag()};
    js["rho"] = s.rho.front();
    js["kernel_identity"] = s.kernel_identity;
    out.report.push_back(zeta_label(z) + " (" + fmt(f) + " c_flat)");
    add_record(out, s.errors.e_L2, z, js);
    out.rows.push_back({"rho_flat", "zeta", z.real(), z, s.rho.front()});
    studies.push_back(js);
    check(out, "kernel_identity [" + zeta_label(z) + "]", s.kernel_identity < threshold(c, "kernel_identity"),
          "|(A - zeta0)^{-1} z + z / zeta0| / |z| = " + fmt(s.kernel_identity));
  }
  out.summary["studies"] = studies;
  slope_check(out, "slope_e_L2 [" + fmt(fr.front()) + " c_flat]", runs.front().errors.e_L2, threshold(c, "slope_e_L2"), std::nullopt);
  if (runs.size() >= 2) {
    bool mono = true;
    for (std::size_t k = 1; k < runs.size(); ++k)
      for (std::size_t i = 0; i < c.eps_list.size(); ++i)
        mono = mono && runs[k].errors.rows[i].e_L2 > runs[k - 1].errors.rows[i].e_L2;
    check(out, "monotone_growth", mono, "e_L2 grows as zeta approaches c_flat at every eps");
  }
  // growth against rho_flat over pairs where 1 / (c_flat - zeta) doubles
  bool any = false;
  for (std::size_t a = 0; a < fr.size(); ++a)
    for (std::size_t k = a + 1; k < fr.size(); ++k) {
      if (std::abs((1.0 - fr[a]) / (1.0 - fr[k]) - 2.0) > 1e-9) continue;
      any = true;
      const double re = runs[k].errors.rows.back().e_L2 / runs[a].errors.rows.back().e_L2;
      const double rr = runs[k].rho.front() / runs[a].rho.front();
      const double factor = std::max(re / rr, rr / re);
      check(out, "rho_consistency [" + fmt(fr[a]) + " -> " + fmt(fr[k]) + "]", factor < threshold(c, "rho_factor"),
            "error ratio " + fmt(re) + " vs rho ratio " + fmt(rr) + ": factor " + fmt(factor));
    }
  if (!any) skip(out, "rho_consistency", "no pair of fractions doubles 1 / (c_flat - zeta)");
}

inline void run_spectrum(ResultBundle& out) {
  const StudyConfig& c = out.config;
  const NeumannProblem pb = neumann_problem(c);
  const double eps = c.eps_list.back();
  const SpectrumReport r = neumann_spectrum(pb, eps);
  out.summary["eps"] = eps;
  out.summary["q"] = r.q;
  out.summary["lambda_eps"] = std::vector<double>(r.lambda_eps.begin(), r.lambda_eps.end());
  out.summary["lambda_eff"] = std::vector<double>(r.lambda_eff.begin(), r.lambda_eff.end());
  out.summary["c_flat"] = r.c_flat;
  out.summary["subspace_angle"] = r.subspace_angle;
  out.summary["kernel_identity"] = r.kernel_identity;
  for (int i = 0; i < r.lambda_eps.size(); ++i) {
    out.rows.push_back({"lambda_eps", "index", static_cast<double>(i), 0.0, r.lambda_eps(i)});
    out.rows.push_back({"lambda_eff", "index", static_cast<double>(i), 0.0, r.lambda_eff(i)});
  }
  out.report.push_back("q = " + std::to_string(r.q) + ", c_flat = " + fmt(r.c_flat));
  check(out, "kernel_eigenvalues", r.kernel_ratio < threshold(c, "kernel_eigen_ratio"),
        "max |lambda_i| / lambda_{q+1} = " + fmt(r.kernel_ratio));
  check(out, "kernel_polynomials", r.subspace_angle < 1e-8, "distance of x^k (k < p) from Z = " + fmt(r.subspace_angle));
  check(out, "kernel_identity", r.kernel_identity < threshold(c, "kernel_identity"), "at zeta = -2: " + fmt(r.kernel_identity));
}

}  // namespace detail

inline const std::vector<std::string>& study_kinds() {
  static const std::vector<std::string> k{"cell", "check", "wholespace-rates", "neumann-rates", "zeta-sweep", "spectrum"};
  return k;
}

/// Validates the config for `kind` and runs it. Solver errors propagate with the study kind prepended.
inline ResultBundle run_study(const StudyConfig& config, const std::string& kind) {
  if (std::find(study_kinds().begin(), study_kinds().end(), kind) == study_kinds().end())
    throw ConfigError("unknown study kind " + kind);
  validate_config(config, kind);
  ResultBundle out;
  out.kind = kind;
  out.config = config;
  out.summary["schema_version"] = csv_schema_version;
  out.summary["kind"] = kind;
  out.summary["problem"] = config.problem;
  try {
    if (kind == "cell") detail::run_cell(out);
    else if (kind == "check") detail::run_check(out);
    else if (kind == "wholespace-rates") detail::run_wholespace_rates(out);
    else if (kind == "neumann-rates") detail::run_neumann_rates(out);
    else if (kind == "zeta-sweep") detail::run_zeta_sweep(out);
    else detail::run_spectrum(out);
  } catch (const ConfigError&) {
    throw;
  } catch (const SolverError& e) {
    throw SolverError(kind + ": " + e.what());
  } catch (const Error& e) {
    throw SolverError(kind + ": " + e.what());
  }
  Json checks = Json::array();
  for (const auto& ch : out.checks) checks.push_back({{"name", ch.name}, {"status", to_string(ch.status)}, {"detail", ch.detail}});
  out.summary["checks"] = checks;
  out.summary["passed"] = out.passed();
  return out;
}

/// Writes results.csv, summary.json and any field dumps into `dir`.
inline void write_bundle(const ResultBundle& b, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
  const std::filesystem::path base(dir);
  {
    std::ofstream os(base / "results.csv", std::ios::binary);
    if (!os) throw ConfigError("cannot write " + (base / "results.csv").string());
    os << b.csv();
  }
  {
    std::ofstream os(base / "summary.json", std::ios::binary);
    if (!os) throw ConfigError("cannot write " + (base / "summary.json").string());
    os << b.summary.dump(2) << "\n";
  }
  for (const auto& [stem, f] : b.fields) save_field((base / (stem + ".field")).string(), f);
}

}  // namespace homog
