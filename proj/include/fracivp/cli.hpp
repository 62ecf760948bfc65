#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracivp/model.hpp"
#include "fracivp/solver.hpp"

namespace fracivp::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailed = 1,        // compatibility failed, or no MVT root
  kExitUsage = 2,         // usage, config, parse or h evaluation error
  kExitNoConvergence = 3  // divergence, max_iter, all probe starts failed
};

/// Bad config file or --param value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CheckConfig {
  double r = 1.0;
  std::optional<double> t_lo;
  std::optional<double> t_hi;
  model::SamplingSpec sampling;
  double compat_tol = 1e-10;
  double nagumo_tol = 1e-9;
};

struct MvtConfig {
  std::string function;  // PowerSum-representable expression in x
  std::optional<double> a;
  double x = 1.0;
};

struct OutputConfig {
  std::string dir;  // empty: report on stdout only
  std::string report = "report.json";
  std::string solution = "solution.csv";
};

struct RunConfig {
  // [problem]: either example (+ a, T, beta) or a, u0, T, h
  std::string example;
  std::optional<double> a, u0, T, beta;
  std::string h;

  solver::SolverConfig solver;
  std::string init;  // starting iterate for solve, expression in x

  CheckConfig check;
  std::vector<std::string> probe_inits;
  MvtConfig mvt;
  OutputConfig output;

  /// Applies one section.key = value setting. Throws ConfigError.
  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Checks every numeric bound and that every expression parses.
  void validate() const;

  /// Problem from the example catalog or from a, u0, T, h.
  model::Problem problem() const;
  std::map<std::string, double> example_params() const;
};

/// Line-oriented "key = value" text with [section] headers. Strings may be
/// double-quoted; '#' and ';' start comments. Errors carry origin:line.
RunConfig parse_config(std::istream& in, const std::string& origin = "config");
RunConfig load_config(const std::string& path);

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracivp::cli
