#include "tubesolv/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

namespace tubesolv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw config_error("unterminated section header: " + line, lineno);
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw config_error("empty section name", lineno);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw config_error("expected key = value, got: " + line, lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw config_error("empty key", lineno);
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.count(full)) throw config_error("duplicate key '" + full + "'", lineno);
    cfg[full] = val;
  }
  return cfg;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

namespace {

std::string need(const ConfigMap& cfg, const std::string& key) {
  auto it = cfg.find(key);
  if (it == cfg.end()) throw config_error("missing required key '" + key + "'", 0);
  return it->second;
}

std::string get_or(const ConfigMap& cfg, const std::string& key, const std::string& dflt) {
  auto it = cfg.find(key);
  return it == cfg.end() ? dflt : it->second;
}

Real to_real(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const Real x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("key '" + key + "': cannot parse number from '" + v + "'", 0);
  }
}

int to_int(const std::string& key, const std::string& v) {
  const Real x = to_real(key, v);
  if (x != std::floor(x)) throw config_error("key '" + key + "': expected an integer, got " + v, 0);
  return int(x);
}

Expr time_expr(const ConfigMap& cfg, const std::string& key, const std::string& dflt) {
  const std::string v = get_or(cfg, key, dflt);
  try {
    return Expr::parse(v, ExprVar::Time);
  } catch (const std::exception& e) {
    throw config_error("key '" + key + "': " + e.what(), 0);
  }
}

Expr radial_expr(const ConfigMap& cfg, const std::string& key, const std::string& dflt) {
  const std::string v = get_or(cfg, key, dflt);
  try {
    return Expr::parse(v, ExprVar::Radial);
  } catch (const std::exception& e) {
    throw config_error("key '" + key + "': " + e.what(), 0);
  }
}

SeparableSymbol load_separable(const ConfigMap& cfg, const std::string& prefix, Real order) {
  SeparableSymbol s;
  s.a = time_expr(cfg, prefix + ".a", "0");
  s.b = time_expr(cfg, prefix + ".b", "0");
  std::ostringstream q;
  q << "r^" << order;
  s.q = radial_expr(cfg, prefix + ".q", order == 0 ? "1" : q.str());
  return s;
}

} // namespace

SymbolSpec load_symbol(const ConfigMap& cfg, const std::string& base_dir) {
  SymbolSpec spec;
  spec.order = to_real("symbol.order", get_or(cfg, "symbol.order", "0"));
  const std::string variant = need(cfg, "symbol.variant");
  if (variant == "constant") {
    ConstantSymbol c;
    c.re = radial_expr(cfg, "symbol.re", "0");
    c.im = radial_expr(cfg, "symbol.im", "0");
    spec.variant = c;
  } else if (variant == "separable") {
    spec.variant = load_separable(cfg, "symbol", spec.order);
  } else if (variant == "homogeneous") {
    HomogeneousSymbol h;
    h.a = time_expr(cfg, "symbol.a", "0");
    h.b = time_expr(cfg, "symbol.b", "0");
    spec.variant = h;
  } else if (variant == "homogeneous_plus_lower") {
    HomogeneousPlusLowerSymbol hl;
    hl.principal.a = time_expr(cfg, "symbol.a", "0");
    hl.principal.b = time_expr(cfg, "symbol.b", "0");
    hl.lower_order = to_real("symbol.lower.order", need(cfg, "symbol.lower.order"));
    hl.lower = load_separable(cfg, "symbol.lower", hl.lower_order);
    if (!(hl.lower_order < spec.order))
      throw config_error("symbol.lower.order must be strictly below symbol.order", 0);
    spec.variant = hl;
  } else if (variant == "tabulated") {
    TabulatedSymbol t;
    std::string path = need(cfg, "symbol.file");
    if (!path.empty() && path.front() != '/') path = base_dir + "/" + path;
    t.samples = read_field(path);
    spec.variant = t;
  } else {
    throw config_error("unknown symbol variant '" + variant + "'", 0);
  }
  return spec;
}

void RunConfig::validate() const {
  if (nt != 0 && (nt < 8 || nt % 2))
    throw std::invalid_argument("nt must be an even integer >= 8, got " + std::to_string(nt));
  if (!(K > 0)) throw std::invalid_argument("K must be positive");
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (!(eps_z > 0)) throw std::invalid_argument("eps-z must be positive");
  if (!(d_floor >= 2)) throw std::invalid_argument("d-floor must be >= 2 (log|xi| degenerates below)");
  if (format != "csv" && format != "binary")
    throw std::invalid_argument("format must be csv or binary, got " + format);
}

void apply_run_section(RunConfig& rc, const ConfigMap& cfg) {
  auto set_real = [&](const char* key, Real& slot) {
    auto it = cfg.find(std::string("run.") + key);
    if (it != cfg.end()) slot = to_real(key, it->second);
  };
  auto set_int = [&](const char* key, int& slot) {
    auto it = cfg.find(std::string("run.") + key);
    if (it != cfg.end()) slot = to_int(key, it->second);
  };
  set_int("nt", rc.nt);
  set_real("K", rc.K);
  set_int("dim", rc.dim);
  set_real("eps_z", rc.eps_z);
  set_real("d_floor", rc.d_floor);
  set_real("compat_tol", rc.compat_tol);
  set_real("small_divisor_floor", rc.small_divisor_floor);
  set_real("range_guard", rc.range_guard);
  set_real("bounded_slope_tol", rc.bounded_slope_tol);
  set_real("offender_factor", rc.offender_factor);
  set_real("sign_tol", rc.sign_tol);
  set_int("threads", rc.threads);
  if (auto it = cfg.find("run.format"); it != cfg.end()) rc.format = it->second;
  if (auto it = cfg.find("run.out"); it != cfg.end()) rc.out_dir = it->second;
}

void apply_environment(RunConfig& rc) {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = env("TUBESOLV_NT")) rc.nt = to_int("TUBESOLV_NT", *v);
  if (auto v = env("TUBESOLV_K")) rc.K = to_real("TUBESOLV_K", *v);
  if (auto v = env("TUBESOLV_DIM")) rc.dim = to_int("TUBESOLV_DIM", *v);
  if (auto v = env("TUBESOLV_EPS_Z")) rc.eps_z = to_real("TUBESOLV_EPS_Z", *v);
  if (auto v = env("TUBESOLV_D_FLOOR")) rc.d_floor = to_real("TUBESOLV_D_FLOOR", *v);
  if (auto v = env("TUBESOLV_THREADS")) rc.threads = to_int("TUBESOLV_THREADS", *v);
  if (auto v = env("TUBESOLV_OUT")) rc.out_dir = *v;
  if (auto v = env("TUBESOLV_FORMAT")) rc.format = *v;
}

} // namespace tubesolv
