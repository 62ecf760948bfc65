#include "fracivp/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracivp/errors.hpp"
#include "fracivp/specfun.hpp"

namespace fracivp::fracops {

namespace {

// Cells with h / (x - left end) below this use the series weights.
constexpr double kSeriesCutoff = 0.25;

void require_order(double a, const char* who) {
  if (!(a > 0.0 && a < 1.0)) {
    std::ostringstream msg;
    msg << who << ": order must lie in (0, 1), got " << a;
    throw DomainError(msg.str());
  }
}

void require_integrable(double exponent, const char* who) {
  if (!(exponent > -1.0) || !std::isfinite(exponent)) {
    std::ostringstream msg;
    msg << who << ": exponent " << exponent
        << " is not integrable at 0 (need > -1)";
    throw DomainError(msg.str());
  }
}

// Product-integration value at grid[n] using the cells left of it.
double product_rule_at(std::span<const double> grid,
                       std::span<const double> values, std::size_t n,
                       double a) {
  if (n == 0) return 0.0;
  const double x = grid[n];
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double h = grid[k + 1] - grid[k];
    const double d0 = x - grid[k];
    const double d1 = x - grid[k + 1];
    const double s = h / d0;
    double w_left = 0.0;
    double w_right = 0.0;
    if (s <= kSeriesCutoff) {
      // Short cell far from x: the closed form below cancels badly, so
      // expand (1 - s tau)^{a-1} against the two hat functions instead.
      double c = 1.0;
      double sm = 1.0;
      double left = 0.0;
      double right = 0.0;
      for (int m = 0; m < 200; ++m) {
        const double term = c * sm;
        left += term / ((m + 1.0) * (m + 2.0));
        right += term / (m + 2.0);
        if (term < 1e-17 * right) break;
        c *= (m + 1.0 - a) / (m + 1.0);
        sm *= s;
      }
      const double scale = h * std::pow(d0, a - 1.0);
      w_left = scale * left;
      w_right = scale * right;
    } else {
      // A = int (x - xi)^{a-1},  B = int (x - xi)^a  over the cell.
      const double A = (std::pow(d0, a) - std::pow(d1, a)) / a;
      const double B = (std::pow(d0, a + 1.0) - std::pow(d1, a + 1.0)) / (a + 1.0);
      w_left = (B - d1 * A) / h;
      w_right = (d0 * A - B) / h;
    }
    acc += w_left * values[k] + w_right * values[k + 1];
  }
  return acc / specfun::gamma(a);
}

}  // namespace

PowerSum::PowerSum(std::vector<PowerTerm> terms) {
  for (const auto& t : terms) {
    require_integrable(t.exponent, "PowerSum");
    if (!std::isfinite(t.coef)) throw DomainError("PowerSum: non-finite coefficient");
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const PowerTerm& l, const PowerTerm& r) {
                     return l.exponent < r.exponent;
                   });
  for (const auto& t : terms) {
    if (!terms_.empty() &&
        std::abs(t.exponent - terms_.back().exponent) <= kExponentMergeTol) {
      terms_.back().coef += t.coef;
    } else {
      terms_.push_back(t);
    }
  }
  std::erase_if(terms_, [](const PowerTerm& t) { return t.coef == 0.0; });
}

PowerSum PowerSum::constant(double c) { return PowerSum({{c, 0.0}}); }

PowerSum PowerSum::monomial(double coef, double exponent) {
  return PowerSum({{coef, exponent}});
}

double PowerSum::operator()(double x) const {
  double acc = 0.0;
  for (const auto& t : terms_) acc += t.coef * std::pow(x, t.exponent);
  return acc;
}

double PowerSum::coefficient(double exponent) const {
  for (const auto& t : terms_) {
    if (std::abs(t.exponent - exponent) <= kExponentMergeTol) return t.coef;
  }
  return 0.0;
}

PowerSum PowerSum::operator+(const PowerSum& other) const {
  std::vector<PowerTerm> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return PowerSum(std::move(all));
}

PowerSum PowerSum::operator-(const PowerSum& other) const {
  return *this + other * -1.0;
}

PowerSum PowerSum::operator*(double s) const {
  std::vector<PowerTerm> scaled = terms_;
  for (auto& t : scaled) t.coef *= s;
  return PowerSum(std::move(scaled));
}

PowerSum PowerSum::operator*(const PowerSum& other) const {
  std::vector<PowerTerm> prod;
  prod.reserve(terms_.size() * other.terms_.size());
  for (const auto& l : terms_) {
    for (const auto& r : other.terms_) {
      prod.push_back({l.coef * r.coef, l.exponent + r.exponent});
    }
  }
  return PowerSum(std::move(prod));
}

PowerSum rl_integral(const PowerSum& p, double a) {
  require_order(a, "rl_integral");
  std::vector<PowerTerm> out;
  out.reserve(p.terms().size());
  for (const auto& t : p.terms()) {
    require_integrable(t.exponent, "rl_integral");
    const double mu = t.exponent;
    const double factor = specfun::gamma(mu + 1.0) / specfun::gamma(mu + 1.0 + a);
    out.push_back({t.coef * factor, mu + a});
  }
  return PowerSum(std::move(out));
}

PowerSum rl_derivative(const PowerSum& p, double a) {
  require_order(a, "rl_derivative");
  std::vector<PowerTerm> out;
  out.reserve(p.terms().size());
  for (const auto& t : p.terms()) {
    require_integrable(t.exponent, "rl_derivative");
    const double mu = t.exponent;
    const double shifted = mu + 1.0 - a;
    if (std::abs(shifted) <= kExponentMergeTol) continue;  // x^{a-1} is in the kernel
    if (shifted < 0.0) {
      std::ostringstream msg;
      msg << "rl_derivative: x^" << mu << " maps to x^" << (mu - a)
          << ", which is not integrable at 0";
      throw DomainError(msg.str());
    }
    const double coef = t.coef * specfun::gamma(mu + 1.0) / specfun::gamma(shifted);
    if (std::abs(coef) < kPruneTol) continue;
    out.push_back({coef, mu - a});
  }
  return PowerSum(std::move(out));
}

SampledFunction::SampledFunction(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_.size() < 2) throw PreconditionError("SampledFunction: need at least two nodes");
  if (grid_.size() != values_.size()) {
    throw PreconditionError("SampledFunction: grid and values differ in length");
  }
  if (grid_.front() != 0.0) throw PreconditionError("SampledFunction: grid must start at 0");
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (!(grid_[i] > grid_[i - 1])) {
      std::ostringstream msg;
      msg << "SampledFunction: grid not strictly increasing at index " << i;
      throw PreconditionError(msg.str());
    }
  }
}

double SampledFunction::operator()(double x) const {
  if (!(x >= 0.0 && x <= grid_.back())) {
    std::ostringstream msg;
    msg << "SampledFunction: x = " << x << " outside [0, " << grid_.back() << "]";
    throw DomainError(msg.str());
  }
  auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  if (it == grid_.end()) return values_.back();
  const auto hi = static_cast<std::size_t>(it - grid_.begin());
  const std::size_t lo = hi - 1;
  const double s = (x - grid_[lo]) / (grid_[hi] - grid_[lo]);
  return values_[lo] + s * (values_[hi] - values_[lo]);
}

std::vector<double> uniform_grid(double length, std::size_t n) {
  if (n < 2) throw PreconditionError("uniform_grid: need at least two nodes");
  if (!(length > 0.0)) throw PreconditionError("uniform_grid: length must be positive");
  std::vector<double> g(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = length * (static_cast<double>(i) / denom);
  g.back() = length;
  return g;
}

std::vector<double> graded_grid(double length, std::size_t n, double grading) {
  if (!(grading >= 1.0)) throw PreconditionError("graded_grid: grading must be >= 1");
  auto g = uniform_grid(1.0, n);
  for (auto& x : g) x = length * std::pow(x, grading);
  g.back() = length;
  return g;
}

SampledFunction rl_integral_sampled(const SampledFunction& u, double a) {
  require_order(a, "rl_integral_sampled");
  std::vector<double> out(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) {
    out[n] = product_rule_at(u.grid(), u.values(), n, a);
  }
  return SampledFunction(u.grid(), std::move(out));
}

double rl_integral_endpoint(const SampledFunction& u, double a) {
  require_order(a, "rl_integral_endpoint");
  return product_rule_at(u.grid(), u.values(), u.size() - 1, a);
}

}  // namespace fracivp::fracops
