#pragma once

#include <cstddef>
#include <vector>

namespace fracivp::specfun {

/// Gamma function for real z > 0, double precision.
///
/// Evaluated with the 13-term rational Lanczos approximation (g ~ 6.0247)
/// tabulated by Boost.Math as lanczos13m53. Throws DomainError for z <= 0
/// and for z large enough that the result overflows.
double gamma(double z);

/// Euler Beta function B(p, q) = gamma(p) gamma(q) / gamma(p + q).
double beta(double p, double q);

/// Gauss rule for the weight t^{-a} (1 - t)^{a - 1} on (0, 1).
///
/// This is the weight left over after substituting xi = x t in the
/// Riemann-Liouville kernel xi^{-a} (x - xi)^{a - 1}; its total mass is
/// B(1 - a, a) = pi / sin(pi a).
struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing, inside (0, 1)
  std::vector<double> weights;  // positive
  double order_a = 0.5;
  std::size_t n = 0;

  /// Sum of w_j g(t_j).
  template <typename F>
  double integrate(F&& g) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += weights[j] * g(nodes[j]);
    return acc;
  }

  double total_mass() const;
};

/// Golub-Welsch construction of the n-point rule for order a in (0, 1).
/// Exact for polynomials of degree <= 2n - 1.
QuadratureRule jacobi_rule(double a, std::size_t n);

}  // namespace fracivp::specfun
