#include "fracivp/model.hpp"

#include <cmath>
#include <sstream>

#include "fracivp/errors.hpp"
#include "fracivp/specfun.hpp"

namespace fracivp::model {

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// x samples for the estimators, optionally with the origin in front when h
// can be evaluated there.
std::vector<double> estimator_x(const Problem& p, const SamplingSpec& spec, bool with_origin) {
  auto xs = sample_x(p.T, spec);
  if (with_origin && spec.include_origin) {
    bool defined = true;
    try {
      (void)p.h(0.0, p.u0);
    } catch (const DomainError&) {
      defined = false;
    }
    if (defined) xs.insert(xs.begin(), 0.0);
  }
  return xs;
}

}  // namespace

RegularizedRhs::RegularizedRhs(expr::Expression e) : text_(e.source()) {
  fn_ = [e = std::move(e)](double x, double t) { return e(x, t); };
}

RegularizedRhs::RegularizedRhs(std::string description, Fn fn)
    : text_(std::move(description)), fn_(std::move(fn)) {}

RegularizedRhs RegularizedRhs::parse(std::string_view text) {
  return RegularizedRhs(expr::parse(text));
}

void Problem::validate() const {
  std::ostringstream msg;
  if (!(a > 0.0 && a < 1.0)) msg << "order a must lie in (0, 1), got " << a;
  else if (!(u0 != 0.0) || !std::isfinite(u0)) msg << "initial value u0 must be finite and nonzero";
  else if (!(T > 0.0) || !std::isfinite(T)) msg << "horizon T must be positive, got " << T;
  else if (!h.valid()) msg << "right-hand side h is not set";
  else return;
  throw PreconditionError("Problem: " + msg.str());
}

double Problem::compatible_value() const { return u0 / specfun::gamma(1.0 - a); }

std::string_view to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::Compatibility: return "compatibility";
    case CertificateKind::Growth: return "growth";
    case CertificateKind::Nagumo: return "nagumo";
    case CertificateKind::Interval: return "interval";
    case CertificateKind::Apriori: return "apriori";
    case CertificateKind::Residual: return "residual";
  }
  return "unknown";
}

std::vector<double> sample_x(double T, const SamplingSpec& spec) {
  if (spec.n_x == 0) throw PreconditionError("SamplingSpec: n_x must be positive");
  if (!(spec.eps > 0.0 && spec.eps < 1.0)) {
    throw PreconditionError("SamplingSpec: eps must lie in (0, 1)");
  }
  std::vector<double> xs(spec.n_x);
  const double n = static_cast<double>(spec.n_x);
  for (std::size_t i = 0; i < spec.n_x; ++i) {
    xs[i] = T * spec.eps * std::pow(1.0 / spec.eps, static_cast<double>(i + 1) / n);
  }
  xs.back() = T;
  return xs;
}

std::vector<double> sample_t(Interval box, std::size_t n) {
  if (n < 2) throw PreconditionError("SamplingSpec: n_t must be at least 2");
  if (!(box.hi > box.lo)) throw PreconditionError("t box must be nondegenerate");
  std::vector<double> ts(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    ts[j] = box.lo + (box.hi - box.lo) * (static_cast<double>(j) / denom);
  }
  ts.back() = box.hi;
  return ts;
}

Interval default_t_box(const Problem& p) { return {p.u0 - 5.0, p.u0 + 5.0}; }

Certificate compatibility_check(const Problem& p, double tol) {
  p.validate();
  double h0 = 0.0;
  try {
    h0 = p.h(0.0, p.u0);
  } catch (const DomainError& e) {
    throw PreconditionError(std::string("compatibility: h is not evaluable at (0, u0): ") +
                            e.what());
  }
  const double target = p.compatible_value();
  Certificate c;
  c.kind = CertificateKind::Compatibility;
  c.estimate = std::abs(h0 - target);
  c.threshold = tol;
  c.samples = 1;
  c.tolerance = 0.0;
  c.passed = c.estimate <= tol;
  c.notes = "h(0, u0) = " + fmt(h0) + ", required u0/Gamma(1-a) = " + fmt(target);
  if (!c.passed && std::abs(h0) <= tol) {
    c.notes += "; h(0, u0) = 0 means f is continuous at the origin, and then no continuous "
               "solution with u0 != 0 exists";
  }
  return c;
}

Certificate estimate_growth_constant(const Problem& p, double r, const SamplingSpec& spec) {
  p.validate();
  if (!(r > 0.0)) throw PreconditionError("growth: ball radius r must be positive");
  const auto xs = estimator_x(p, spec, true);
  const auto ts = sample_t({p.u0 - r, p.u0 + r}, spec.n_t);
  const double target = p.compatible_value();

  double best = 0.0;
  double best_x = 0.0;
  double best_t = p.u0;
  std::size_t used = 0;
  for (double x : xs) {
    for (double t : ts) {
      const double denom = std::max(x, std::abs(t - p.u0) / r);
      if (denom == 0.0) continue;
      const double ratio = std::abs(p.h(x, t) - target) / denom;
      ++used;
      if (ratio > best) {
        best = ratio;
        best_x = x;
        best_t = t;
      }
    }
  }
  if (used == 0) throw PreconditionError("growth: empty sample set");

  Certificate c;
  c.kind = CertificateKind::Growth;
  c.estimate = best;
  c.threshold = best;
  c.samples = used;
  c.tolerance = 0.0;
  c.passed = std::isfinite(best);
  c.notes = "M* candidate over [0, " + fmt(p.T) + "] x [" + fmt(p.u0 - r) + ", " +
            fmt(p.u0 + r) + "], r = " + fmt(r) + "; max at x = " + fmt(best_x) +
            ", t = " + fmt(best_t);
  return c;
}

Certificate existence_interval(double m_star, double r, double T, double a) {
  if (!(m_star >= 0.0) || !std::isfinite(m_star)) {
    throw PreconditionError("interval: M* must be finite and nonnegative");
  }
  if (!(r > 0.0)) throw PreconditionError("interval: r must be positive");
  if (!(T > 0.0)) throw PreconditionError("interval: T must be positive");
  if (!(a > 0.0 && a < 1.0)) throw PreconditionError("interval: a must lie in (0, 1)");

  const double product = m_star * specfun::gamma(1.0 - a);
  Certificate c;
  c.kind = CertificateKind::Interval;
  c.threshold = T;
  c.samples = 0;
  if (product >= r) {
    const double t0 = r / product;
    c.estimate = std::min(t0, T);
    c.notes = "branch M* Gamma(1-a) >= r: T0 = r / (M* Gamma(1-a)) = " + fmt(t0);
    if (product == r) c.notes += " (tie with the second branch)";
    if (t0 > T) c.notes += ", capped at T";
  } else {
    c.estimate = T;
    c.notes = "branch M* Gamma(1-a) < r: T0 = T";
    if (m_star == 0.0) c.notes += " (degenerate: M* = 0)";
  }
  c.passed = c.estimate > 0.0;
  return c;
}

Certificate estimate_nagumo_constant(const Problem& p, Interval t_box, const SamplingSpec& spec,
                                     double tolerance) {
  p.validate();
  const auto xs = estimator_x(p, spec, false);
  const auto ts = sample_t(t_box, spec.n_t);

  double best = 0.0;
  double best_x = xs.front();
  std::vector<double> row(ts.size());
  for (double x : xs) {
    for (std::size_t j = 0; j < ts.size(); ++j) row[j] = p.h(x, ts[j]);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      for (std::size_t k = j + 1; k < ts.size(); ++k) {
        const double slope = std::abs(row[k] - row[j]) / (ts[k] - ts[j]);
        if (slope > best) {
          best = slope;
          best_x = x;
        }
      }
    }
  }

  Certificate c;
  c.kind = CertificateKind::Nagumo;
  c.estimate = best;
  c.threshold = 1.0 / specfun::gamma(1.0 - p.a);
  c.samples = xs.size() * ts.size();
  c.tolerance = tolerance;
  c.passed = c.estimate <= c.threshold * (1.0 + tolerance);
  c.notes = "sampled sup over x in (0, " + fmt(p.T) + "], t in [" + fmt(t_box.lo) + ", " +
            fmt(t_box.hi) + "] (the condition quantifies over all real t); max at x = " +
            fmt(best_x);
  return c;
}

Certificate apriori_bound(const Problem& p, Interval t_box, const SamplingSpec& spec) {
  p.validate();
  const auto xs = estimator_x(p, spec, true);
  const auto ts = sample_t(t_box, spec.n_t);
  const double target = p.compatible_value();

  double m_h = 0.0;
  for (double x : xs) {
    for (double t : ts) m_h = std::max(m_h, std::abs(p.h(x, t) - target));
  }

  Certificate c;
  c.kind = CertificateKind::Apriori;
  c.estimate = m_h * specfun::gamma(1.0 - p.a) + std::abs(p.u0);
  c.threshold = c.estimate;
  c.samples = xs.size() * ts.size();
  c.tolerance = 0.0;
  c.passed = true;
  c.notes = "M_h = sup |h - u0/Gamma(1-a)| = " + fmt(m_h) + " over [0, " + fmt(p.T) + "] x [" +
            fmt(t_box.lo) + ", " + fmt(t_box.hi) +
            "] stands in for sup |f|, which is infinite for this class; informational";
  return c;
}

}  // namespace fracivp::model
