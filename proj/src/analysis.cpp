#include "fracivp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracivp/solver.hpp"

namespace fracivp::analysis {

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

double param(const std::map<std::string, double>& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void allow_only(const std::string& name, const std::map<std::string, double>& params,
                std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : params) {
    if (std::none_of(keys.begin(), keys.end(), [&k](const char* a) { return k == a; })) {
      throw PreconditionError("catalog " + name + ": unknown parameter '" + k + "'");
    }
    if (!std::isfinite(v)) throw PreconditionError("catalog " + name + ": '" + k + "' is not finite");
  }
}

// ---- expression -> PowerSum ---------------------------------------------

bool mentions(const expr::Node& n, expr::Variable v) {
  if (n.kind == expr::NodeKind::Variable) return n.variable == v;
  return std::any_of(n.children.begin(), n.children.end(),
                     [v](const expr::NodePtr& c) { return mentions(*c, v); });
}

[[noreturn]] void unsupported(const expr::Node& n, const std::string& why) {
  throw PreconditionError("not a power sum at offset " + std::to_string(n.offset) + ": " + why);
}

double constant_value(const expr::Node& n) {
  // x-free subtree: evaluate through the ordinary evaluator
  return expr::parse(expr::print(n))(0.0, 0.0);
}

PowerSum to_sum(const expr::Node& n);

PowerSum power(const expr::Node& where, const PowerSum& base, double e) {
  const auto& terms = base.terms();
  if (terms.empty()) {
    if (e > 0.0) return base;
    unsupported(where, "zero raised to a non-positive power");
  }
  if (terms.size() == 1) {
    const double c = terms[0].coef;
    if (c < 0.0 && e != std::floor(e)) unsupported(where, "negative coefficient to a fractional power");
    return PowerSum::monomial(std::pow(c, e), terms[0].exponent * e);
  }
  if (e != std::floor(e) || e < 0.0 || e > 64.0) {
    unsupported(where, "a sum can only be raised to an integer power between 0 and 64");
  }
  PowerSum out = PowerSum::constant(1.0);
  for (int i = 0; i < static_cast<int>(e); ++i) out = out * base;
  return out;
}

PowerSum to_sum(const expr::Node& n) {
  if (mentions(n, expr::Variable::T)) unsupported(n, "depends on t");
  if (!mentions(n, expr::Variable::X)) return PowerSum::constant(constant_value(n));
  switch (n.kind) {
    case expr::NodeKind::Variable: return PowerSum::monomial(1.0, 1.0);
    case expr::NodeKind::Negate: return to_sum(*n.children[0]) * -1.0;
    case expr::NodeKind::Binary: {
      const auto& l = *n.children[0];
      const auto& r = *n.children[1];
      switch (n.op) {
        case expr::BinaryOp::Add: return to_sum(l) + to_sum(r);
        case expr::BinaryOp::Sub: return to_sum(l) - to_sum(r);
        case expr::BinaryOp::Mul: return to_sum(l) * to_sum(r);
        case expr::BinaryOp::Div: {
          const PowerSum d = to_sum(r);
          if (d.terms().size() != 1) unsupported(n, "divisor must be a single term");
          // shift exponents directly; x^{-mu} alone may not be a valid PowerSum
          std::vector<fracops::PowerTerm> q = to_sum(l).terms();
          for (auto& term : q) {
            term.coef /= d.terms()[0].coef;
            term.exponent -= d.terms()[0].exponent;
          }
          return PowerSum(std::move(q));
        }
        case expr::BinaryOp::Pow:
          if (mentions(r, expr::Variable::X)) unsupported(n, "exponent depends on x");
          return power(n, to_sum(l), constant_value(r));
      }
      break;
    }
    case expr::NodeKind::Call:
      if (n.function == expr::Function::Pow) {
        if (mentions(*n.children[1], expr::Variable::X)) unsupported(n, "exponent depends on x");
        return power(n, to_sum(*n.children[0]), constant_value(*n.children[1]));
      }
      unsupported(n, "function of x");
    case expr::NodeKind::Number: break;
  }
  unsupported(n, "unexpected node");
}

}  // namespace

PowerSum mvt_weight(const PowerSum& u, double a) {
  for (const auto& t : u.terms()) {
    if (t.exponent < 0.0) {
      throw PreconditionError("mvt_lambda: exponent " + fmt(t.exponent) + " is negative");
    }
  }
  return fracops::rl_derivative(u, a) * PowerSum::monomial(specfun::gamma(1.0 - a), a);
}

MvtResult mvt_solve(const PowerSum& u, double a, double x) {
  if (!(a > 0.0 && a < 1.0)) throw PreconditionError("mvt_lambda: a must lie in (0, 1)");
  if (!(x > 0.0) || !std::isfinite(x)) throw PreconditionError("mvt_lambda: x must be positive");
  const PowerSum w = mvt_weight(u, a);
  const double target = u(x);
  const double tol = 1e-11 * (1.0 + std::abs(target));
  auto phi = [&](double l) { return w(l) - target; };

  // scan points: the limits at 0 and x, then 1024 interior points
  const std::size_t n = kMvtScanPoints;
  std::vector<double> ls(n + 2);
  std::vector<double> ph(n + 2);
  for (std::size_t k = 0; k <= n + 1; ++k) {
    ls[k] = x * (static_cast<double>(k) / static_cast<double>(n + 1));
    ph[k] = phi(ls[k]);
  }

  bool degenerate = true;
  double min_abs = std::abs(ph[1]);
  double min_at = ls[1];
  for (std::size_t k = 1; k <= n; ++k) {
    if (std::abs(ph[k]) > tol) degenerate = false;
    if (std::abs(ph[k]) < min_abs) {
      min_abs = std::abs(ph[k]);
      min_at = ls[k];
    }
  }
  if (degenerate) return {0.5 * x, true, std::abs(phi(0.5 * x))};

  for (std::size_t k = 0; k <= n; ++k) {
    // an exact zero at an interior scan point is a root
    if (k > 0 && ph[k] == 0.0) return {ls[k], false, 0.0};
    if (sign(ph[k]) * sign(ph[k + 1]) >= 0) continue;
    double lo = ls[k], hi = ls[k + 1];
    double flo = ph[k];
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fm = phi(mid);
      if (fm == 0.0) return {mid, false, 0.0};
      if (sign(fm) == sign(flo)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    // keep the end with the smaller defect, but never an endpoint of (0, x)
    double best = std::abs(phi(lo)) <= std::abs(phi(hi)) ? lo : hi;
    if (best <= 0.0) best = hi;
    if (best >= x) best = lo;
    if (std::abs(phi(best)) > tol) {
      throw RootNotFound("mvt_lambda: bracket at " + fmt(best) + " leaves |phi| = " +
                             fmt(std::abs(phi(best))) + " above " + fmt(tol),
                         std::abs(phi(best)), best);
    }
    return {best, false, std::abs(phi(best))};
  }
  throw RootNotFound("mvt_lambda: no sign change of Gamma(1-a) l^a D^a u(l) - u(x) on (0, " +
                         fmt(x) + "); min |phi| = " + fmt(min_abs) + " at l = " + fmt(min_at),
                     min_abs, min_at);
}

double mvt_lambda(const PowerSum& u, double a, double x) { return mvt_solve(u, a, x).lambda; }

std::vector<std::string> catalog_names() { return {"unique_linear", "beta_family", "remark3"}; }

NamedExample catalog(const std::string& name, const std::map<std::string, double>& params) {
  NamedExample ex;
  ex.name = name;
  const double a = param(params, "a", 0.5);
  const double T = param(params, "T", 1.0);
  const std::string A = fmt(a);

  if (name == "unique_linear") {
    allow_only(name, params, {"a", "T"});
    ex.problem = {a, 1.0, T, model::RegularizedRhs::parse("t/gamma(1-" + A + ")")};
    ex.known_solutions = {PowerSum::constant(1.0)};
    ex.solution_labels = {"1"};
    ex.notes = "Nagumo constant equals the critical 1/Gamma(1-a); unique solution u = 1";
  } else if (name == "beta_family") {
    allow_only(name, params, {"beta", "a", "T"});
    const double beta = param(params, "beta", 1.0);
    if (!(beta > 0.0)) throw PreconditionError("catalog beta_family: beta must be positive");
    const std::string B = fmt(beta);
    const std::string h = "gamma(" + B + "+1)/gamma(1-" + A + "+" + B + ")*(t + (gamma(" + B +
                          "-" + A + "+1) - gamma(1+" + B + ")*gamma(1-" + A + "))/(gamma(1+" +
                          B + ")*gamma(1-" + A + ")))";
    ex.problem = {a, 1.0, T, model::RegularizedRhs::parse(h)};
    const double slope = specfun::gamma(beta + 1.0) / specfun::gamma(1.0 - a + beta);
    const double g1 = specfun::gamma(1.0 + beta) * specfun::gamma(1.0 - a);
    ex.constants = {{"beta", beta},
                    {"slope", slope},
                    {"k", (specfun::gamma(beta - a + 1.0) - g1) / g1},
                    {"critical_slope", 1.0 / specfun::gamma(1.0 - a)}};
    for (double c : kFamilySample) {
      ex.known_solutions.push_back(PowerSum::constant(1.0) + PowerSum::monomial(c, beta));
      ex.solution_labels.push_back(fmt(c) + "*x^" + B + " + 1");
      ex.stated_family.push_back(PowerSum::constant(1.0) + PowerSum::monomial(c, 1.0));
    }
    ex.notes = "t-slope Gamma(beta+1)/Gamma(1-a+beta) exceeds 1/Gamma(1-a); candidates c x^beta + 1, "
               "which reduce to c x + 1 at beta = 1";
  } else if (name == "remark3") {
    allow_only(name, params, {"a", "T"});
    const std::string h = "t/gamma(1-" + A + ") + (2/gamma(3-" + A + ") - 1/gamma(1-" + A + "))*x^2";
    ex.problem = {a, 1.0, T, model::RegularizedRhs::parse(h)};
    const PowerSum u = PowerSum::constant(1.0) + PowerSum::monomial(1.0, 2.0);
    ex.known_solutions = {u};
    ex.solution_labels = {"1 + x^2"};
    ex.mvt_functions = {u};
    ex.constants = {{"lambda_ratio", std::sqrt((1.0 - a) * (2.0 - a) / 2.0)}};
    ex.notes = "u = 1 + x^2 has lambda(x) = sqrt((1-a)(2-a)/2) x";
  } else {
    throw PreconditionError("catalog: unknown example '" + name +
                            "' (known: unique_linear, beta_family, remark3)");
  }
  ex.problem.validate();
  return ex;
}

model::Certificate verify_candidate(const PowerSum& u, const model::Problem& p,
                                    const specfun::QuadratureRule& rule) {
  p.validate();
  for (const auto& t : u.terms()) {
    if (t.exponent < 0.0) throw PreconditionError("verify_candidate: candidate is singular at 0");
  }
  const double mismatch = std::abs(u(0.0) - p.u0);
  if (mismatch > 1e-12) {
    throw PreconditionError("verify_candidate: u(0) = " + fmt(u(0.0)) + " does not match u0 = " +
                            fmt(p.u0));
  }
  const auto grid = fracops::uniform_grid(p.T, kVerifyGrid);
  const auto r = solver::node_residuals(grid, [&u](double x) { return u(x); }, p, rule);
  const auto worst = std::max_element(r.begin(), r.end());

  model::Certificate c;
  c.kind = model::CertificateKind::Residual;
  c.estimate = *worst;
  c.threshold = kVerifyTol;
  c.samples = grid.size();
  c.tolerance = kVerifyTol;
  c.passed = c.estimate <= kVerifyTol;
  c.notes = "sup |u - Mu| on " + std::to_string(grid.size()) + " uniform nodes over [0, " +
            fmt(p.T) + "], n_quad = " + std::to_string(rule.n) + "; max at x = " +
            fmt(grid[static_cast<std::size_t>(worst - r.begin())]);
  return c;
}

PowerSum power_sum_from_expression(const expr::Expression& e) {
  if (!e.root()) throw PreconditionError("empty expression");
  try {
    return to_sum(*e.root());
  } catch (const DomainError& err) {
    throw PreconditionError(std::string("not a power sum: ") + err.what());
  }
}

}  // namespace fracivp::analysis
