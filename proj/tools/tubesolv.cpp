// Command-line driver: analyze a symbol at a finite frequency cutoff, solve
// P u = f from a partial-Fourier field file, or forge right-hand sides with
// provable per-mode lower bounds.
//
// Exit codes: 0 success (a "not solvable" verdict is still a successful
// analysis), 2 configuration/resolution errors, 3 closure violation,
// 4 no witnesses at the requested scales, 1 unexpected failure.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "tubesolv/config.hpp"
#include "tubesolv/counterexample.hpp"
#include "tubesolv/homogeneous.hpp"
#include "tubesolv/parallel.hpp"
#include "tubesolv/report.hpp"

namespace ts = tubesolv;
namespace fs = std::filesystem;

namespace {

struct Cli {
  std::string symbol_path;
  std::string field_path;
  std::string tag = "dc";
  int kmax = 6;
  std::pair<double, double> interval{0.5, 1.0};
  ts::RunConfig rc;        // holds flag values after parsing
  CLI::App* sub = nullptr; // the parsed subcommand, for flag-presence queries
};

// precedence: defaults < config [run] < environment < flags
ts::SymbolSpec load_spec(const Cli& cli, ts::RunConfig& rc) {
  const ts::ConfigMap cfg = ts::parse_config_file(cli.symbol_path);
  ts::apply_run_section(rc, cfg);
  ts::apply_environment(rc);
  auto flag = [&](const char* name) { return cli.sub->count(name) > 0; };
  if (flag("--nt")) rc.nt = cli.rc.nt;
  if (flag("--K")) rc.K = cli.rc.K;
  if (flag("--dim")) rc.dim = cli.rc.dim;
  if (flag("--eps-z")) rc.eps_z = cli.rc.eps_z;
  if (flag("--d-floor")) rc.d_floor = cli.rc.d_floor;
  if (flag("--out")) rc.out_dir = cli.rc.out_dir;
  if (flag("--threads")) rc.threads = cli.rc.threads;
  if (flag("--format")) rc.format = cli.rc.format;
  const std::string dir = fs::path(cli.symbol_path).parent_path().string();
  return ts::load_symbol(cfg, dir.empty() ? "." : dir);
}

int pick_nt(const ts::RunConfig& rc, const ts::SymbolSpec& spec) {
  const int need = ts::required_nt(rc.K, spec.order);
  if (rc.nt == 0) return need;
  if (rc.nt < need)
    throw std::invalid_argument("nt = " + std::to_string(rc.nt) +
                                " under-resolves the |xi|^{-m} windows at K = " +
                                ts::format_real(rc.K) + "; need nt >= " + std::to_string(need));
  return rc.nt;
}

ts::SolverOptions solver_options(const ts::RunConfig& rc) {
  ts::SolverOptions so;
  so.eps_z = rc.eps_z;
  so.compat_tol = rc.compat_tol;
  so.small_divisor_floor = rc.small_divisor_floor;
  so.range_guard = rc.range_guard;
  so.threads = rc.threads;
  return so;
}

int cmd_analyze(const Cli& cli) {
  ts::RunConfig rc;
  const ts::SymbolSpec spec = load_spec(cli, rc);
  rc.validate();
  const ts::CircleGrid grid(pick_nt(rc, spec));
  const ts::FrequencyBox box(rc.dim, rc.K);
  const auto profiles = ts::evaluate(spec, grid, box, {rc.eps_z, 0, rc.threads});

  std::vector<ts::DioMargin> margins(profiles.size());
  std::vector<ts::OscillationConstants> constants(profiles.size());
  ts::parallel_for(
      int(profiles.size()),
      [&](int i) {
        margins[i] = ts::dio_margin(profiles[i]);
        constants[i] = ts::oscillation_constants(profiles[i], spec.order);
      },
      rc.threads);

  ts::AggregateOptions ao;
  ao.d_floor = rc.d_floor;
  ao.bounded_slope_tol = rc.bounded_slope_tol;
  ao.dio.offender_factor = rc.offender_factor;
  ao.dio.d_floor = rc.d_floor;
  const ts::Verdict verdict = ts::aggregate(margins, constants, rc.K, ao);

  std::optional<ts::CorollaryReport> homog;
  std::vector<std::string> extra;
  if (spec.is_homogeneous() && spec.order > 0) {
    ts::CorollaryOptions co;
    co.eps_z = rc.eps_z;
    co.sign_tol = rc.sign_tol;
    co.dio.offender_factor = rc.offender_factor;
    co.dio.d_floor = rc.d_floor;
    co.threads = rc.threads;
    homog = ts::corollary_verdict(spec, grid, box, co);
  } else if (spec.is_homogeneous_plus_lower()) {
    const ts::PerturbedReport pr = ts::perturbed_principal_check(spec, grid, box, rc.sign_tol);
    extra.push_back(std::string("perturbed_principal = ") +
                    (pr.verdict == ts::PerturbedVerdict::NotSolvable ? "not_solvable" : "inconclusive"));
    extra.push_back("perturbed_reason = " + pr.reason);
  }

  fs::create_directories(rc.out_dir);
  const std::string base = rc.out_dir + "/";
  ts::write_conditions_csv(base + "conditions.csv", margins, constants,
                           homog ? &*homog : nullptr);
  ts::write_verdict_summary(base + "verdict.txt", verdict, homog ? &*homog : nullptr, extra);
  ts::write_margin_plot(base + "margin_vs_xi.csv", margins);
  ts::write_dstar_plot(base + "dstar_vs_xi.csv", constants);

  std::cout << "solvable_at_cutoff = " << (verdict.solvable_at_cutoff ? "true" : "false") << "\n";
  for (const auto& r : verdict.reasons) std::cout << "reason = " << r << "\n";
  std::cout << "report: " << base << "verdict.txt\n";
  return 0;
}

int cmd_solve(const Cli& cli) {
  ts::RunConfig rc;
  const ts::SymbolSpec spec = load_spec(cli, rc);
  rc.validate();
  const ts::FourierField f = ts::read_field(cli.field_path);
  const auto profiles = ts::evaluate(spec, f.grid, f.box, {rc.eps_z, 0, rc.threads});

  ts::GlobalSolution sol;
  try {
    sol = ts::solve_global(f, profiles, solver_options(rc));
  } catch (const ts::closure_error& e) {
    std::cerr << "closure violation: " << e.what() << "\n";
    return 3;
  }

  fs::create_directories(rc.out_dir);
  const std::string base = rc.out_dir + "/";
  if (rc.format == "binary") ts::write_field_binary(base + "u.bin", sol.u);
  else ts::write_field_csv(base + "u.csv", sol.u);
  ts::write_solve_report(base + "solve_report.txt", sol.diag, f.box);
  std::cout << "residual_rel = " << ts::format_real(sol.diag.residual_rel) << "\n";
  std::cout << "report: " << base << "solve_report.txt\n";
  return 0;
}

int cmd_forge(const Cli& cli) {
  ts::RunConfig rc;
  const ts::SymbolSpec spec = load_spec(cli, rc);
  rc.validate();
  const ts::CircleGrid grid(pick_nt(rc, spec));
  const ts::FrequencyBox box(rc.dim, rc.K);

  ts::ForgeOptions fo;
  fo.k_max = cli.kmax;
  fo.eps_z = rc.eps_z;
  fo.interval_lo = cli.interval.first;
  fo.interval_hi = cli.interval.second;
  fo.solver = solver_options(rc);

  ts::ForgedRHS forged;
  if (cli.tag == "dc") forged = ts::forge_dc(spec, grid, box, fo);
  else if (cli.tag == "alpha") forged = ts::forge_alpha(spec, grid, box, fo);
  else if (cli.tag == "beta") forged = ts::forge_beta(spec, grid, box, fo);
  else throw std::invalid_argument("unknown forge tag '" + cli.tag + "'");

  fs::create_directories(rc.out_dir);
  const std::string base = rc.out_dir + "/forged_" + cli.tag;
  if (rc.format == "binary") ts::write_field_binary(base + ".bin", forged.field);
  else ts::write_field_csv(base + ".csv", forged.field);
  ts::write_forged_sidecar(base + ".json", forged);
  ts::write_forged_bounds(base + "_bounds.csv", forged);

  int ok = 0;
  for (const auto& m : forged.modes) ok += m.ok;
  std::cout << "forged " << ok << "/" << forged.modes.size() << " modes, bounds table: " << base
            << "_bounds.csv\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"global solvability analysis for D_t + c(t, D_x) on the torus"};
  app.require_subcommand(1);

  Cli cli;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--symbol", cli.symbol_path, "symbol configuration file")->required();
    sub->add_option("--nt", cli.rc.nt, "time-grid size (even, >= 8; 0 = auto)");
    sub->add_option("--K", cli.rc.K, "frequency cutoff");
    sub->add_option("--dim", cli.rc.dim, "spatial dimension N");
    sub->add_option("--eps-z", cli.rc.eps_z, "resonance tolerance");
    sub->add_option("--d-floor", cli.rc.d_floor, "frequency floor for the conditions");
    sub->add_option("--out", cli.rc.out_dir, "output directory");
    sub->add_option("--threads", cli.rc.threads, "worker threads (0 = hardware)");
    sub->add_option("--format", cli.rc.format, "field output format: csv | binary");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "conditions, margins and the verdict at cutoff");
  add_common(analyze);
  CLI::App* solve = app.add_subcommand("solve", "solve P u = f from a field file");
  add_common(solve);
  solve->add_option("--f", cli.field_path, "right-hand side field file")->required();
  CLI::App* forge = app.add_subcommand("forge", "construct right-hand sides with provable bounds");
  add_common(forge);
  forge->add_option("--tag", cli.tag, "construction: dc | alpha | beta");
  forge->add_option("--kmax", cli.kmax, "largest plant scale k");
  forge->add_option("--interval", cli.interval, "dc bump interval: lo hi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  try {
    if (analyze->parsed()) { cli.sub = analyze; return cmd_analyze(cli); }
    if (solve->parsed()) { cli.sub = solve; return cmd_solve(cli); }
    if (forge->parsed()) { cli.sub = forge; return cmd_forge(cli); }
  } catch (const ts::no_witness_error& e) {
    std::cerr << "no witnesses: " << e.what() << "\n";
    return 4;
  } catch (const ts::closure_error& e) {
    std::cerr << "closure violation: " << e.what() << "\n";
    return 3;
  } catch (const ts::config_error& e) {
    std::cerr << "config error (line " << e.line << "): " << e.what() << "\n";
    return 2;
  } catch (const ts::resolution_error& e) {
    std::cerr << "resolution error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
