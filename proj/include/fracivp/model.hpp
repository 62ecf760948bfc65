#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fracivp/expr.hpp"

namespace fracivp::model {

/// Regularised right-hand side h(x, t) = x^a f(x, t).
///
/// The raw f is never supplied: it is singular like x^{-a} at the origin,
/// while h is continuous on [0, T] x R.
class RegularizedRhs {
 public:
  using Fn = std::function<double(double, double)>;

  RegularizedRhs() = default;
  explicit RegularizedRhs(expr::Expression e);
  RegularizedRhs(std::string description, Fn fn);

  static RegularizedRhs parse(std::string_view text);

  double operator()(double x, double t) const { return fn_(x, t); }
  const std::string& text() const { return text_; }
  bool valid() const { return static_cast<bool>(fn_); }

 private:
  std::string text_;
  Fn fn_;
};

/// D^a u = x^{-a} h(x, u),  u(0) = u0,  on [0, T].
struct Problem {
  double a = 0.5;
  double u0 = 1.0;
  double T = 1.0;
  RegularizedRhs h;

  /// Throws PreconditionError unless 0 < a < 1, u0 != 0, T > 0 and h is set.
  void validate() const;

  /// The value h must take at (0, u0): u0 / Gamma(1 - a).
  double compatible_value() const;
};

enum class CertificateKind { Compatibility, Growth, Nagumo, Interval, Apriori, Residual };

std::string_view to_string(CertificateKind kind);

/// Reproducible record of one sampled hypothesis check. Sampled evidence,
/// not a proof.
struct Certificate {
  CertificateKind kind = CertificateKind::Compatibility;
  bool passed = false;
  double estimate = 0.0;
  double threshold = 0.0;
  std::size_t samples = 0;
  double tolerance = 0.0;
  std::string notes;
};

/// Closed interval of t values.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Sample layout for the estimators.
///
/// x: n_x log-spaced points in (eps T, T] (the smallest is eps T (1/eps)^{1/n_x}),
/// plus x = 0 when include_origin is set and h is defined there.
/// t: n_t uniformly spaced points covering the box, endpoints included.
/// Doubling n_x and taking n_t -> 2 n_t - 1 yields a superset of samples.
struct SamplingSpec {
  std::size_t n_x = 256;
  std::size_t n_t = 256;
  double eps = 1e-6;
  bool include_origin = true;
};

std::vector<double> sample_x(double T, const SamplingSpec& spec);
std::vector<double> sample_t(Interval box, std::size_t n);

/// Default t box for the Nagumo and a-priori checks: [u0 - 5, u0 + 5].
Interval default_t_box(const Problem& p);

/// |h(0, u0) - u0 / Gamma(1 - a)| <= tol.
Certificate compatibility_check(const Problem& p, double tol = 1e-10);

/// Sampled M* for |h(x,t) - u0/G(1-a)| <= M* max(x, |t - u0| / r) on
/// [0, T] x [u0 - r, u0 + r].
Certificate estimate_growth_constant(const Problem& p, double r, const SamplingSpec& spec = {});

/// T0 = min(r / (M* G(1-a)), T) if M* G(1-a) >= r, else T.
Certificate existence_interval(double m_star, double r, double T, double a);

/// Sampled Lipschitz constant of h in t, compared with 1 / Gamma(1 - a).
Certificate estimate_nagumo_constant(const Problem& p, Interval t_box,
                                     const SamplingSpec& spec = {}, double tolerance = 1e-9);

/// M_h Gamma(1 - a) + |u0| with M_h = sampled sup |h - u0/Gamma(1-a)|.
Certificate apriori_bound(const Problem& p, Interval t_box, const SamplingSpec& spec = {});

}  // namespace fracivp::model
