#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "fracivp/analysis.hpp"
#include "fracivp/cli.hpp"
#include "fracivp/errors.hpp"
#include "fracivp/expr.hpp"

namespace fracivp::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double to_double(const std::string& key, const std::string& v) {
  if (v.empty()) throw ConfigError(key + ": empty value");
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d)) {
    throw ConfigError(key + ": '" + v + "' is not a finite number");
  }
  return d;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  if (v.empty() || v.size() > 12 ||
      !std::all_of(v.begin(), v.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
  }
  return static_cast<std::size_t>(std::stoull(v));
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

void check_expression(const std::string& key, const std::string& text, bool x_only) {
  try {
    const auto e = expr::parse(text);
    if (x_only && e.uses_t()) throw ConfigError(key + ": expression must not use t");
  } catch (const expr::ParseError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

// value text after '=': quoted string or bare token, trailing comment removed
std::string parse_value(const std::string& raw) {
  const std::string s = trim(raw);
  if (!s.empty() && s.front() == '"') {
    std::string out;
    std::size_t i = 1;
    for (; i < s.size() && s[i] != '"'; ++i) {
      if (s[i] == '\\' && i + 1 < s.size()) ++i;
      out += s[i];
    }
    if (i >= s.size()) throw ConfigError("unterminated string");
    const std::string rest = trim(s.substr(i + 1));
    if (!rest.empty() && rest.front() != '#' && rest.front() != ';') {
      throw ConfigError("unexpected text after string: '" + rest + "'");
    }
    return out;
  }
  const auto c = s.find_first_of("#;");
  return trim(c == std::string::npos ? s : s.substr(0, c));
}

}  // namespace

void RunConfig::set(const std::string& section, const std::string& key, const std::string& v) {
  const std::string name = section + "." + key;
  if (section == "problem") {
    if (key == "example") example = v;
    else if (key == "a") a = to_double(name, v);
    else if (key == "u0") u0 = to_double(name, v);
    else if (key == "T") T = to_double(name, v);
    else if (key == "beta") beta = to_double(name, v);
    else if (key == "h") {
      check_expression(name, v, false);
      h = v;
    } else throw ConfigError("unknown key '" + key + "' in [problem]");
  } else if (section == "solver") {
    if (key == "n_grid") solver.n_grid = to_size(name, v);
    else if (key == "n_quad") solver.n_quad = to_size(name, v);
    else if (key == "tol") solver.tol = to_double(name, v);
    else if (key == "max_iter") solver.max_iter = to_size(name, v);
    else if (key == "divergence_factor") solver.divergence_factor = to_double(name, v);
    else if (key == "horizon") solver.horizon = to_double(name, v);
    else if (key == "ball_radius") solver.ball_radius = to_double(name, v);
    else if (key == "init") {
      check_expression(name, v, true);
      init = v;
    } else throw ConfigError("unknown key '" + key + "' in [solver]");
  } else if (section == "check") {
    if (key == "r") check.r = to_double(name, v);
    else if (key == "t_lo") check.t_lo = to_double(name, v);
    else if (key == "t_hi") check.t_hi = to_double(name, v);
    else if (key == "n_x") check.sampling.n_x = to_size(name, v);
    else if (key == "n_t") check.sampling.n_t = to_size(name, v);
    else if (key == "eps") check.sampling.eps = to_double(name, v);
    else if (key == "include_origin") check.sampling.include_origin = to_bool(name, v);
    else if (key == "compat_tol") check.compat_tol = to_double(name, v);
    else if (key == "nagumo_tol") check.nagumo_tol = to_double(name, v);
    else throw ConfigError("unknown key '" + key + "' in [check]");
  } else if (section == "probe") {
    if (key == "init") {
      check_expression(name, v, true);
      probe_inits.push_back(v);
    } else throw ConfigError("unknown key '" + key + "' in [probe]");
  } else if (section == "mvt") {
    if (key == "function") {
      check_expression(name, v, true);
      mvt.function = v;
    } else if (key == "a") mvt.a = to_double(name, v);
    else if (key == "x") mvt.x = to_double(name, v);
    else throw ConfigError("unknown key '" + key + "' in [mvt]");
  } else if (section == "output") {
    if (key == "dir") output.dir = v;
    else if (key == "report") output.report = v;
    else if (key == "solution") output.solution = v;
    else throw ConfigError("unknown key '" + key + "' in [output]");
  } else {
    throw ConfigError("unknown section [" + section + "]");
  }
}

void RunConfig::validate() const {
  try {
    solver.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  if (!example.empty()) {
    if (!h.empty() || u0) throw ConfigError("problem: h and u0 come from the example '" + example + "'");
  } else if (beta) {
    throw ConfigError("problem.beta needs an example");
  }
  if (a && !(*a > 0.0 && *a < 1.0)) throw ConfigError("problem.a must lie in (0, 1)");
  if (T && !(*T > 0.0)) throw ConfigError("problem.T must be positive");
  if (u0 && *u0 == 0.0) throw ConfigError("problem.u0 must be non-zero");
  if (!(check.r > 0.0)) throw ConfigError("check.r must be positive");
  if (check.t_lo.has_value() != check.t_hi.has_value()) {
    throw ConfigError("check.t_lo and check.t_hi go together");
  }
  if (check.t_lo && !(*check.t_lo < *check.t_hi)) throw ConfigError("check.t_lo must be below check.t_hi");
  if (check.sampling.n_x < 2 || check.sampling.n_t < 2) throw ConfigError("check.n_x and check.n_t must be >= 2");
  if (!(check.sampling.eps > 0.0 && check.sampling.eps < 1.0)) throw ConfigError("check.eps must lie in (0, 1)");
  if (!(check.compat_tol >= 0.0) || !(check.nagumo_tol >= 0.0)) {
    throw ConfigError("check tolerances must be non-negative");
  }
  if (mvt.a && !(*mvt.a > 0.0 && *mvt.a < 1.0)) throw ConfigError("mvt.a must lie in (0, 1)");
  if (!(mvt.x > 0.0)) throw ConfigError("mvt.x must be positive");
  if (output.report.empty() || output.solution.empty()) throw ConfigError("output file names must be non-empty");
}

std::map<std::string, double> RunConfig::example_params() const {
  std::map<std::string, double> p;
  if (a) p["a"] = *a;
  if (T) p["T"] = *T;
  if (beta) p["beta"] = *beta;
  return p;
}

model::Problem RunConfig::problem() const {
  if (!example.empty()) {
    try {
      return analysis::catalog(example, example_params()).problem;
    } catch (const PreconditionError& e) {
      throw ConfigError(e.what());
    }
  }
  if (h.empty()) throw ConfigError("problem.h is required without an example");
  model::Problem p;
  p.a = a.value_or(0.5);
  p.u0 = u0.value_or(1.0);
  p.T = T.value_or(1.0);
  p.h = model::RegularizedRhs::parse(h);
  return p;
}

RunConfig parse_config(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  std::string section;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#' || s.front() == ';') continue;
    try {
      if (s.front() == '[') {
        if (s.back() != ']') throw ConfigError("malformed section header");
        section = trim(s.substr(1, s.size() - 2));
        static const std::set<std::string> known = {"problem", "solver", "check", "probe", "mvt", "output"};
        if (!known.count(section)) throw ConfigError("unknown section [" + section + "]");
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("expected key = value");
      if (section.empty()) throw ConfigError("setting outside a section");
      const std::string key = trim(s.substr(0, eq));
      if (key.empty()) throw ConfigError("missing key");
      const std::string full = section + "." + key;
      if (full != "probe.init" && !seen.insert(full).second) throw ConfigError("duplicate key " + full);
      cfg.set(section, key, parse_value(s.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(f, path);
}

}  // namespace fracivp::cli
