#pragma once

#include <map>
#include <string>

#include "tubesolv/symbol.hpp"

namespace tubesolv {

struct config_error : std::runtime_error {
  int line;
  config_error(const std::string& msg, int l) : std::runtime_error(msg), line(l) {}
};

// Line-based key = value text with [section] headers; nested sections use
// dotted names ([symbol.lower]).  '#' starts a comment.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

// Build a SymbolSpec from the [symbol] section.  base_dir resolves relative
// tabulated-sample paths.
SymbolSpec load_symbol(const ConfigMap& cfg, const std::string& base_dir = ".");

struct RunConfig {
  std::string symbol_path;
  int nt = 0;  // 0: pick the smallest even grid satisfying the resolution rule
  Real K = 32;
  int dim = 1;
  Real eps_z = 1e-9;
  Real d_floor = 2;
  Real compat_tol = 1e-10;
  Real small_divisor_floor = 1e-6;
  Real range_guard = 16;
  Real bounded_slope_tol = 0.05;
  Real offender_factor = 1e3;
  Real sign_tol = 1e-6;
  std::string out_dir = ".";
  std::string format = "csv";  // csv | binary
  int threads = 0;

  void validate() const;
};

// overlay the [run] section of a config onto defaults (config wins)
void apply_run_section(RunConfig& rc, const ConfigMap& cfg);

// overlay TUBESOLV_* environment variables (env wins over config)
void apply_environment(RunConfig& rc);

} // namespace tubesolv
