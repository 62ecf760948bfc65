#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracivp::fracops {

/// Exponent separation below which two power terms are merged.
inline constexpr double kExponentMergeTol = 1e-12;

/// Coefficients smaller than this are dropped from rl_derivative output.
inline constexpr double kPruneTol = 1e-15;

struct PowerTerm {
  double coef = 0.0;
  double exponent = 0.0;
};

/// Finite sum  sum_i c_i x^{mu_i}  with every mu_i > -1.
///
/// Terms are kept sorted by exponent; exponents closer than
/// kExponentMergeTol are merged (the first exponent is kept).
class PowerSum {
 public:
  PowerSum() = default;
  explicit PowerSum(std::vector<PowerTerm> terms);

  static PowerSum constant(double c);
  static PowerSum monomial(double coef, double exponent);

  const std::vector<PowerTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Value at x >= 0. Negative exponents evaluate to +-inf at x = 0.
  double operator()(double x) const;

  /// Coefficient of x^exponent (0 when absent).
  double coefficient(double exponent) const;

  PowerSum operator+(const PowerSum& other) const;
  PowerSum operator-(const PowerSum& other) const;
  PowerSum operator*(const PowerSum& other) const;
  PowerSum operator*(double s) const;

 private:
  std::vector<PowerTerm> terms_;
};

/// Riemann-Liouville integral of order a: x^mu -> G(mu+1)/G(mu+1+a) x^{mu+a}.
PowerSum rl_integral(const PowerSum& p, double a);

/// Riemann-Liouville derivative of order a: x^mu -> G(mu+1)/G(mu+1-a) x^{mu-a}.
///
/// The term mu = a - 1 is annihilated (1/G(0) = 0). A term with
/// -1 < mu < a - 1 would map below x^{-1}; that raises DomainError.
PowerSum rl_derivative(const PowerSum& p, double a);

/// Function sampled on a grid starting at 0, read back through its
/// continuous piecewise linear interpolant.
class SampledFunction {
 public:
  /// Degree of the interpolant used everywhere in the library.
  static constexpr int kInterpolationDegree = 1;

  SampledFunction(std::vector<double> grid, std::vector<double> values);

  /// Samples f on the given grid.
  template <typename F>
  static SampledFunction sample(std::vector<double> grid, F&& f) {
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = f(grid[i]);
    return SampledFunction(std::move(grid), std::move(values));
  }

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return grid_.size(); }
  double back() const { return grid_.back(); }

  /// Piecewise linear interpolant; DomainError outside [0, back()].
  double operator()(double x) const;

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
};

/// n uniformly spaced nodes on [0, length].
std::vector<double> uniform_grid(double length, std::size_t n);

/// n nodes on [0, length] clustered at 0: x_i = length (i / (n-1))^grading.
std::vector<double> graded_grid(double length, std::size_t n, double grading);

/// Product-integration Riemann-Liouville integral of order a at every node.
///
/// u is replaced by its piecewise linear interpolant and the kernel
/// (x_i - xi)^{a-1} / G(a) is integrated exactly against it, so the result
/// is exact (to rounding) for piecewise linear data and second order for
/// smooth data.
SampledFunction rl_integral_sampled(const SampledFunction& u, double a);

/// Same product rule, evaluated only at the last grid node. O(n).
double rl_integral_endpoint(const SampledFunction& u, double a);

}  // namespace fracivp::fracops
