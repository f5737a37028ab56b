// Command-line front end: one subcommand per study kind.
// Exit codes: 0 pass, 1 threshold failure (with --check), 2 configuration error, 3 solver failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "homog/core/parallel.hpp"
#include "homog/harness/study.hpp"

namespace {

constexpr int exit_pass = 0, exit_threshold = 1, exit_config = 2, exit_solver = 3;

struct Flags {
  std::string config;
  std::string out;
  bool check = false;
  std::optional<unsigned> seed;
  int threads = 0;
};

const char* describe(const std::string& kind) {
  if (kind == "cell") return "Solve the cell problem and print the effective matrix g0";
  if (kind == "check") return "Run the property suite (PASS / FAIL / SKIP per item)";
  if (kind == "wholespace-rates") return "Error rates in eps for the whole-space (torus) problem";
  if (kind == "neumann-rates") return "Error rates in eps for the 1-D Neumann problem";
  if (kind == "zeta-sweep") return "Error scaling in the shift: |zeta| on the torus, zeta -> c_flat for Neumann";
  return "Kernel of b(D), lowest eigenvalues and c_flat for the Neumann problem";
}

int run(const std::string& kind, const Flags& f) {
  homog::StudyConfig cfg;
  if (!f.config.empty()) cfg = homog::load_config(f.config);
  if (f.seed) cfg.seeds.base = *f.seed;
  if (f.threads > 0) homog::set_thread_count(f.threads);
  const homog::ResultBundle b = homog::run_study(cfg, kind);
  const std::string out = f.out.empty() ? cfg.output : f.out;
  homog::write_bundle(b, out);
  for (const auto& line : b.report) std::cout << line << "\n";
  for (const auto& c : b.checks) std::cout << homog::to_string(c.status) << "  " << c.name << ": " << c.detail << "\n";
  std::cout << "results written to " << out << "\n";
  return f.check && !b.passed() ? exit_threshold : exit_pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic homogenization studies"};
  app.require_subcommand(1);
  Flags flags;
  std::string chosen;
  for (const auto& kind : homog::study_kinds()) {
    CLI::App* sub = app.add_subcommand(kind, describe(kind));
    sub->add_option("--config", flags.config, "Study config (JSON); defaults apply when omitted");
    sub->add_option("--out", flags.out, "Output directory (overrides the config)");
    sub->add_flag("--check", flags.check, "Exit 1 when a threshold check fails");
    sub->add_option("--seed", flags.seed, "Base seed (overrides the config)");
    sub->add_option("--threads", flags.threads, "Worker threads (default: HOMOG_THREADS or all cores)")->check(CLI::PositiveNumber);
    sub->callback([&chosen, kind] { chosen = kind; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }
  try {
    return run(chosen, flags);
  } catch (const homog::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return exit_solver;
  }
}
