#pragma once

#include <map>
#include <string>
#include <vector>

#include "fracivp/errors.hpp"
#include "fracivp/expr.hpp"
#include "fracivp/fracops.hpp"
#include "fracivp/model.hpp"
#include "fracivp/specfun.hpp"

namespace fracivp::analysis {

using fracops::PowerSum;

/// mvt_lambda found no sign change of the mean value identity.
class RootNotFound : public NumericalError {
 public:
  RootNotFound(const std::string& message, double min_abs, double at)
      : NumericalError(message), min_abs_(min_abs), at_(at) {}
  /// Smallest |phi| seen during the scan and where.
  double min_abs() const { return min_abs_; }
  double at() const { return at_; }

 private:
  double min_abs_;
  double at_;
};

/// Number of interior scan points used by mvt_lambda.
inline constexpr std::size_t kMvtScanPoints = 1024;

/// lambda in (0, x) with u(x) = Gamma(1-a) lambda^a (D^a u)(lambda).
///
/// D^a u is computed exactly with rl_derivative. The scan covers 1024
/// interior points plus the one-sided limits at 0 and x; the first sign
/// change is refined by bisection, so the smallest bracketed root wins.
/// When the identity holds across the whole scan (u constant) the
/// convention lambda = x / 2 is returned. Exponents must be >= 0.
double mvt_lambda(const PowerSum& u, double a, double x);

struct MvtResult {
  double lambda = 0.0;
  bool degenerate = false;  // identity holds on the whole scan; lambda = x / 2
  double residual = 0.0;    // |Gamma(1-a) lambda^a D^a u(lambda) - u(x)|
};

/// mvt_lambda with the degenerate flag and the identity defect.
MvtResult mvt_solve(const PowerSum& u, double a, double x);

/// Gamma(1-a) lambda^a (D^a u)(lambda) as a power sum in lambda.
PowerSum mvt_weight(const PowerSum& u, double a);

struct NamedExample {
  std::string name;
  model::Problem problem;
  std::vector<PowerSum> known_solutions;
  std::vector<std::string> solution_labels;
  /// beta_family only: the stated family c x + 1 for the same c sample.
  /// A solution only at beta = 1; kept so the oracle can report on it.
  std::vector<PowerSum> stated_family;
  /// remark3 only: the function used for the mean value tests.
  std::vector<PowerSum> mvt_functions;
  std::map<std::string, double> constants;
  std::string notes;
};

/// Sample of c used for the beta_family candidates.
inline const std::vector<double> kFamilySample = {-2.0, -1.0, 0.0, 1.0, 2.0};

/// Names accepted by catalog().
std::vector<std::string> catalog_names();

/// Closed-form examples by name.
///
/// unique_linear(a = 0.5, T = 1): h = t / Gamma(1-a), u0 = 1, solution 1.
/// beta_family(beta = 1, a = 0.5, T = 1): h = C (t + k) with
///   C = Gamma(beta+1)/Gamma(1-a+beta),
///   k = (Gamma(beta-a+1) - Gamma(1+beta) Gamma(1-a)) / (Gamma(1+beta) Gamma(1-a)),
///   candidates c x^beta + 1.
/// remark3(a = 0.5, T = 1): h = t/Gamma(1-a) + (2/Gamma(3-a) - 1/Gamma(1-a)) x^2,
///   solution 1 + x^2.
/// Throws PreconditionError for unknown names or parameters and beta <= 0.
NamedExample catalog(const std::string& name, const std::map<std::string, double>& params = {});

/// Number of nodes used by verify_candidate.
inline constexpr std::size_t kVerifyGrid = 513;
inline constexpr double kVerifyTol = 1e-8;

/// Residual certificate of an analytic candidate on a 513-node uniform
/// grid over [0, T]; passes iff sup |u - Mu| <= 1e-8. Throws
/// PreconditionError when |u(0) - u0| > 1e-12.
model::Certificate verify_candidate(const PowerSum& u, const model::Problem& p,
                                    const specfun::QuadratureRule& rule);

/// Converts an expression in x built from numbers, + - * /, integer
/// powers of sums and real powers of monomials into a PowerSum.
/// Subexpressions free of x may use any function. Throws PreconditionError
/// for anything else (t, functions of x, division by x terms).
PowerSum power_sum_from_expression(const expr::Expression& e);

}  // namespace fracivp::analysis
