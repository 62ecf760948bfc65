#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>

#include <CLI11.hpp>

#include "fracivp/analysis.hpp"
#include "fracivp/cli.hpp"
#include "fracivp/errors.hpp"
#include "fracivp/expr.hpp"
#include "fracivp/report.hpp"
#include "fracivp/specfun.hpp"

namespace fracivp::cli {

namespace {

using report::Json;
using report::number;

// Exit code carried out of a command together with its report.
struct Outcome {
  int code = kExitOk;
  Json report;
  std::string csv;  // solve only
};

Json problem_json(const RunConfig& cfg, const model::Problem& p) {
  Json j;
  j["example"] = cfg.example.empty() ? Json(nullptr) : Json(cfg.example);
  if (!cfg.example.empty()) {
    Json params = Json::object();
    for (const auto& [k, v] : cfg.example_params()) params[k] = number(v);
    j["params"] = params;
  }
  const Json base = report::to_json(p);
  for (auto it = base.begin(); it != base.end(); ++it) j[it.key()] = it.value();
  return j;
}

Json solver_json(const RunConfig& cfg) {
  const auto& s = cfg.solver;
  Json j;
  j["n_grid"] = s.n_grid;
  j["n_quad"] = s.n_quad;
  j["tol"] = number(s.tol);
  j["max_iter"] = s.max_iter;
  j["divergence_factor"] = number(s.divergence_factor);
  j["horizon"] = s.horizon ? number(*s.horizon) : Json(nullptr);
  j["ball_radius"] = number(s.ball_radius);
  return j;
}

Json certificates_json(const std::vector<model::Certificate>& cs) {
  Json arr = Json::array();
  for (const auto& c : cs) arr.push_back(report::to_json(c));
  return arr;
}

std::string power_sum_text(const analysis::PowerSum& u) {
  std::string out;
  for (const auto& t : u.terms()) {
    if (!out.empty()) out += " + ";
    out += report::format_double(t.coef);
    if (t.exponent != 0.0) out += "*x^" + report::format_double(t.exponent);
  }
  return out.empty() ? "0" : out;
}

solver::InitialGuess guess(const std::string& text) {
  if (text.empty()) return solver::InitialGuess::constant();
  const auto e = expr::parse(text);
  return solver::InitialGuess::function([e](double x) { return e(x, 0.0); }, text);
}

model::Interval t_box(const RunConfig& cfg, const model::Problem& p) {
  if (cfg.check.t_lo) return {*cfg.check.t_lo, *cfg.check.t_hi};
  return model::default_t_box(p);
}

Outcome cmd_check(const RunConfig& cfg) {
  const auto p = cfg.problem();
  p.validate();
  const auto box = t_box(cfg, p);
  const auto& spec = cfg.check.sampling;

  std::vector<model::Certificate> certs;
  const auto compat = model::compatibility_check(p, cfg.check.compat_tol);
  certs.push_back(compat);
  const auto growth = model::estimate_growth_constant(p, cfg.check.r, spec);
  certs.push_back(growth);
  if (growth.passed) {
    certs.push_back(model::existence_interval(growth.estimate, cfg.check.r, p.T, p.a));
  } else {
    model::Certificate c;
    c.kind = model::CertificateKind::Interval;
    c.estimate = std::nan("");
    c.threshold = p.T;
    c.notes = "no finite growth constant, so no interval";
    certs.push_back(c);
  }
  certs.push_back(model::estimate_nagumo_constant(p, box, spec, cfg.check.nagumo_tol));
  certs.push_back(model::apriori_bound(p, box, spec));

  Outcome o;
  o.code = compat.passed ? kExitOk : kExitFailed;
  Json settings;
  settings["r"] = number(cfg.check.r);
  settings["t_box"] = Json::array({number(box.lo), number(box.hi)});
  settings["n_x"] = spec.n_x;
  settings["n_t"] = spec.n_t;
  settings["eps"] = number(spec.eps);
  settings["include_origin"] = spec.include_origin;
  settings["compat_tol"] = number(cfg.check.compat_tol);
  settings["nagumo_tol"] = number(cfg.check.nagumo_tol);

  o.report["command"] = "check";
  o.report["problem"] = problem_json(cfg, p);
  o.report["settings"] = settings;
  o.report["compatible"] = compat.passed;
  o.report["certificates"] = certificates_json(certs);
  return o;
}

Outcome cmd_solve(const RunConfig& cfg) {
  const auto p = cfg.problem();
  p.validate();
  Outcome o;
  o.report["command"] = "solve";
  o.report["problem"] = problem_json(cfg, p);
  Json sj = solver_json(cfg);
  sj["init"] = cfg.init.empty() ? Json(nullptr) : Json(cfg.init);
  o.report["solver"] = sj;

  const auto compat = model::compatibility_check(p);
  if (!compat.passed) {
    o.code = kExitFailed;
    o.report["status"] = "incompatible";
    o.report["certificates"] = certificates_json({compat});
    return o;
  }
  const auto sol = solver::picard_solve(p, cfg.solver, guess(cfg.init));
  o.code = sol.converged ? kExitOk : kExitNoConvergence;
  o.report["status"] = std::string(solver::to_string(sol.status));
  o.report["converged"] = sol.converged;
  o.report["iterations"] = sol.iterations;
  o.report["horizon"] = number(sol.u.grid().back());
  o.report["residual_sup"] = number(sol.residual_sup);
  o.report["u_at_horizon"] = number(sol.u.values().back());
  o.report["notes"] = sol.notes;
  o.report["certificates"] = certificates_json(sol.certificates);
  o.csv = report::solution_csv(sol);
  return o;
}

Outcome cmd_mvt(const RunConfig& cfg) {
  std::string text = cfg.mvt.function;
  std::optional<analysis::PowerSum> u;
  double a = cfg.mvt.a.value_or(cfg.a.value_or(0.5));
  if (!cfg.example.empty()) {
    const auto ex = analysis::catalog(cfg.example, cfg.example_params());
    if (!cfg.mvt.a) a = ex.problem.a;
    if (text.empty()) {
      if (ex.mvt_functions.empty()) {
        throw ConfigError("example '" + cfg.example + "' has no MVT function; set mvt.function");
      }
      u = ex.mvt_functions.front();
      text = power_sum_text(*u);
    }
  }
  if (text.empty()) throw ConfigError("mvt.function is required");
  if (!u) u = analysis::power_sum_from_expression(expr::parse(text));

  const double x = cfg.mvt.x;
  Outcome o;
  o.report["command"] = "mvt";
  o.report["function"] = text;
  o.report["a"] = number(a);
  o.report["x"] = number(x);
  try {
    const auto r = analysis::mvt_solve(*u, a, x);
    o.report["lambda"] = number(r.lambda);
    o.report["ratio"] = number(r.lambda / x);
    o.report["identity_residual"] = number(r.residual);
    o.report["degenerate"] = r.degenerate;
  } catch (const analysis::RootNotFound& e) {
    o.code = kExitFailed;
    Json scan;
    scan["points"] = analysis::kMvtScanPoints;
    scan["min_abs_defect"] = number(e.min_abs());
    scan["at"] = number(e.at());
    o.report["error"] = e.what();
    o.report["scan"] = scan;
  }
  return o;
}

std::vector<std::string> default_probe_inits(const std::string& example) {
  if (example == "beta_family") return {"1 - 2*x", "1", "1 + 2*x"};
  if (!example.empty()) return {"1", "1 + x", "1 - x", "2"};
  return {};
}

Outcome cmd_probe(const RunConfig& cfg) {
  const auto p = cfg.problem();
  p.validate();
  const auto texts = cfg.probe_inits.empty() ? default_probe_inits(cfg.example) : cfg.probe_inits;
  if (texts.size() < 2) throw ConfigError("probe needs at least 2 [probe] init entries");
  std::vector<solver::InitialGuess> inits;
  for (const auto& t : texts) inits.push_back(guess(t));

  Outcome o;
  o.report["command"] = "probe";
  o.report["problem"] = problem_json(cfg, p);
  o.report["solver"] = solver_json(cfg);
  const auto compat = model::compatibility_check(p);
  if (!compat.passed) {
    o.code = kExitFailed;
    o.report["status"] = "incompatible";
    o.report["certificates"] = certificates_json({compat});
    return o;
  }

  const auto res = solver::multistart_probe(p, cfg.solver, inits);
  Json starts = Json::array();
  for (std::size_t i = 0; i < res.runs.size(); ++i) {
    const auto& s = res.runs[i];
    Json j;
    j["init"] = res.labels[i];
    j["status"] = std::string(solver::to_string(s.status));
    j["iterations"] = s.iterations;
    j["residual_sup"] = number(s.residual_sup);
    j["u_at_horizon"] = number(s.u.values().back());
    starts.push_back(j);
  }
  Json clusters = Json::array();
  for (const auto& c : res.clusters) {
    Json j;
    j["representative"] = c.representative;
    j["members"] = c.members;
    clusters.push_back(j);
  }
  Json dist = Json::array();
  for (const auto& row : res.distances) {
    Json r = Json::array();
    for (double d : row) r.push_back(number(d));
    dist.push_back(r);
  }
  o.report["starts"] = starts;
  o.report["cluster_radius"] = number(res.cluster_radius);
  o.report["cluster_count"] = res.clusters.size();
  o.report["clusters"] = clusters;
  o.report["distances"] = dist;
  o.report["nonuniqueness_evidence"] = res.clusters.size() >= 2;
  return o;
}

Json example_json(const analysis::NamedExample& ex, std::size_t n_quad, bool verify) {
  Json j;
  j["name"] = ex.name;
  j["a"] = number(ex.problem.a);
  j["u0"] = number(ex.problem.u0);
  j["T"] = number(ex.problem.T);
  j["h"] = ex.problem.h.text();
  Json consts = Json::object();
  for (const auto& [k, v] : ex.constants) consts[k] = number(v);
  j["constants"] = consts;
  j["known_solutions"] = ex.solution_labels;
  j["notes"] = ex.notes;
  if (!verify) return j;

  const auto rule = specfun::jacobi_rule(ex.problem.a, n_quad);
  Json checks = Json::array();
  auto add = [&](const std::string& label, const analysis::PowerSum& u) {
    Json c;
    c["candidate"] = label;
    c["certificate"] = report::to_json(analysis::verify_candidate(u, ex.problem, rule));
    checks.push_back(c);
  };
  for (std::size_t i = 0; i < ex.known_solutions.size(); ++i) {
    add(ex.solution_labels[i], ex.known_solutions[i]);
  }
  for (std::size_t i = 0; i < ex.stated_family.size(); ++i) {
    add(power_sum_text(ex.stated_family[i]) + " (stated family)", ex.stated_family[i]);
  }
  j["n_quad"] = n_quad;
  j["verification"] = checks;
  return j;
}

Outcome cmd_examples(const RunConfig& cfg) {
  Outcome o;
  o.report["command"] = "examples";
  Json list = Json::array();
  if (cfg.example.empty()) {
    for (const auto& name : analysis::catalog_names()) {
      list.push_back(example_json(analysis::catalog(name), cfg.solver.n_quad, false));
    }
  } else {
    list.push_back(example_json(analysis::catalog(cfg.example, cfg.example_params()),
                                cfg.solver.n_quad, true));
  }
  o.report["examples"] = list;
  return o;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
}

// "section.key=value"; bare keys go to [problem], except x and function (mvt)
void apply_param(RunConfig& cfg, const std::string& kv, bool& probe_cleared) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects key=value, got '" + kv + "'");
  std::string key = kv.substr(0, eq);
  std::string value = kv.substr(eq + 1);
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
  std::string section = "problem";
  if (const auto dot = key.find('.'); dot != std::string::npos) {
    section = key.substr(0, dot);
    key = key.substr(dot + 1);
  } else if (key == "x" || key == "function") {
    section = "mvt";
  }
  if (section == "probe" && key == "init" && !probe_cleared) {
    cfg.probe_inits.clear();
    probe_cleared = true;
  }
  try {
    cfg.set(section, key, value);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("--param: ") + e.what());
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solver and checks for Riemann-Liouville fractional initial value problems", "fracivp"};
  app.require_subcommand(1);

  std::string config_path, out_dir, example;
  std::vector<std::string> params;
  app.add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Directory for report.json (and solution.csv)");
  app.add_option("--example", example, "Named example: unique_linear, beta_family, remark3");
  app.add_option("--param", params, "Override, key=value or section.key=value (repeatable)");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"check", "Compatibility, growth, interval, Nagumo and a-priori certificates"},
      {"solve", "Picard iteration; writes the solution CSV"},
      {"mvt", "Mean value point lambda for a power sum"},
      {"probe", "Multistart Picard runs grouped into clusters"},
      {"examples", "List the example catalog, or verify one example's solutions"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  Outcome o;
  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!example.empty()) {
      cfg.example = example;
    }
    bool probe_cleared = false;
    for (const auto& kv : params) apply_param(cfg, kv, probe_cleared);
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    cfg.validate();

    if (command == "check") o = cmd_check(cfg);
    else if (command == "solve") o = cmd_solve(cfg);
    else if (command == "mvt") o = cmd_mvt(cfg);
    else if (command == "probe") o = cmd_probe(cfg);
    else o = cmd_examples(cfg);

    const std::string text = report::dump(o.report);
    out << text;
    if (!cfg.output.dir.empty()) {
      const std::filesystem::path dir(cfg.output.dir);
      std::filesystem::create_directories(dir);
      write_file(dir / cfg.output.report, text);
      if (!o.csv.empty()) write_file(dir / cfg.output.solution, o.csv);
    }
  } catch (const ConfigError& e) {
    err << "fracivp: config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const expr::ParseError& e) {
    err << "fracivp: parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "fracivp: evaluation error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "fracivp: invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "fracivp: numerical failure: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "fracivp: " << e.what() << "\n";
    return kExitUsage;
  }
  if (o.code != kExitOk) {
    const auto it = o.report.find("status");
    const auto eit = o.report.find("error");
    err << "fracivp: " << command << " exited with " << o.code;
    if (eit != o.report.end()) err << ": " << eit->get<std::string>();
    else if (it != o.report.end()) err << " (" << it->get<std::string>() << ")";
    err << "\n";
  }
  return o.code;
}

}  // namespace fracivp::cli
