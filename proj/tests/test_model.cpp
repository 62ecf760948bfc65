#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fracivp/errors.hpp"
#include "fracivp/model.hpp"
#include "fracivp/specfun.hpp"

using namespace fracivp;
using namespace fracivp::model;
namespace sf = fracivp::specfun;

namespace {

Problem make(double a, double u0, double T, const std::string& h) {
  return Problem{a, u0, T, RegularizedRhs::parse(h)};
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Example-1 family in regularised form, written with gamma calls so the
// constants match the library's gamma bit for bit.
std::string beta_family_h(double a, double b) {
  const std::string A = num(a), B = num(b);
  return "gamma(" + B + "+1)/gamma(1-" + A + "+" + B + ")*(t + (gamma(" + B + "-" + A +
         "+1) - gamma(1+" + B + ")*gamma(1-" + A + "))/(gamma(1+" + B + ")*gamma(1-" + A + ")))";
}

// Brute force max of the growth ratio on a uniform (nx x nt) grid.
double brute_growth(const Problem& p, double r, int nx, int nt) {
  const double target = p.u0 / sf::gamma(1.0 - p.a);
  double best = 0.0;
  for (int i = 0; i < nx; ++i) {
    const double x = p.T * i / (nx - 1);
    for (int j = 0; j < nt; ++j) {
      const double t = p.u0 - r + 2.0 * r * j / (nt - 1);
      const double d = std::max(x, std::abs(t - p.u0) / r);
      if (d == 0.0) continue;
      best = std::max(best, std::abs(p.h(x, t) - target) / d);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("Problem validation") {
  CHECK_NOTHROW(make(0.5, 1, 1, "t").validate());
  CHECK_THROWS_AS(make(0.0, 1, 1, "t").validate(), PreconditionError);
  CHECK_THROWS_AS(make(1.0, 1, 1, "t").validate(), PreconditionError);
  CHECK_THROWS_AS(make(0.5, 0, 1, "t").validate(), PreconditionError);
  CHECK_THROWS_AS(make(0.5, 1, -1, "t").validate(), PreconditionError);
  CHECK_THROWS_AS((Problem{0.5, 1, 1, {}}).validate(), PreconditionError);
}

TEST_CASE("compatibility_check") {
  SUBCASE("unique example passes") {
    const auto c = compatibility_check(make(0.5, 1, 1, "t/gamma(1-0.5)"), 1e-12);
    CHECK(c.passed);
    CHECK(c.estimate <= 1e-15);
    CHECK(c.kind == CertificateKind::Compatibility);
  }
  SUBCASE("continuous f is rejected with deviation u0/Gamma(1-a)") {
    for (double a : {0.3, 0.5, 0.7}) {
      const auto c = compatibility_check(make(a, 1, 1, "x*t"), 1e-12);
      CHECK_FALSE(c.passed);
      CHECK(std::abs(c.estimate - 1.0 / sf::gamma(1.0 - a)) <= 1e-12);
      CHECK(c.notes.find("continuous") != std::string::npos);
    }
    const auto c = compatibility_check(make(0.5, -2, 1, "x*t"), 1e-12);
    CHECK(std::abs(c.estimate - 2.0 / std::sqrt(std::numbers::pi)) <= 1e-12);
  }
  SUBCASE("Example-1 family passes for every beta") {
    for (double b : {0.5, 1.0, 2.0}) {
      const auto p = make(0.5, 1, 1, beta_family_h(0.5, b));
      CHECK(compatibility_check(p, 1e-12).passed);
    }
  }
  SUBCASE("h undefined at the origin") {
    CHECK_THROWS_AS(compatibility_check(make(0.5, 1, 1, "t/x"), 1e-12), PreconditionError);
  }
}

TEST_CASE("estimate_growth_constant") {
  const double a = 0.5;
  const double c0 = 1.0 / sf::gamma(1.0 - a);
  SUBCASE("unit slope along t = u0") {
    const auto c = estimate_growth_constant(make(a, 1, 1, num(c0) + " + x"), 0.7);
    CHECK(c.estimate == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.passed);
  }
  SUBCASE("zero deviation") {
    const auto c = estimate_growth_constant(make(a, 1, 1, "1/gamma(1-0.5)"), 1.0);
    CHECK(c.estimate == 0.0);
  }
  SUBCASE("unique example against 500 x 500 brute force") {
    const auto p = make(a, 1, 1, "t/gamma(1-0.5)");
    const double oracle = brute_growth(p, 1.0, 500, 500);
    const auto c = estimate_growth_constant(p, 1.0);
    CHECK(oracle == doctest::Approx(c0).epsilon(1e-12));
    CHECK(c.estimate == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(c.samples > 0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(estimate_growth_constant(make(a, 1, 1, "t"), 0.0), PreconditionError);
  }
}

TEST_CASE("existence_interval") {
  const auto c = existence_interval(2.0, 1.0, 1.0, 0.5);
  CHECK(std::abs(c.estimate - 1.0 / (2.0 * std::sqrt(std::numbers::pi))) <= 1e-12);
  CHECK(c.kind == CertificateKind::Interval);

  // second branch
  CHECK(existence_interval(0.5, 1.0, 3.0, 0.5).estimate == 3.0);
  CHECK(existence_interval(0.0, 1.0, 3.0, 0.5).notes.find("degenerate") != std::string::npos);

  // tie: M* G(1-a) = r gives r/(M* G(1-a)) = 1, capped at T
  double tie_m = 1.0 / sf::gamma(0.5);
  while (tie_m * sf::gamma(0.5) < 1.0) tie_m = std::nextafter(tie_m, 2.0);
  REQUIRE(tie_m * sf::gamma(0.5) == 1.0);
  CHECK(existence_interval(tie_m, 1.0, 3.0, 0.5).notes.find("tie") != std::string::npos);
  CHECK(existence_interval(tie_m, 1.0, 3.0, 0.5).estimate == doctest::Approx(1.0));
  CHECK(existence_interval(tie_m, 1.0, 0.4, 0.5).estimate == 0.4);

  // antitone in M*
  double prev = INFINITY;
  for (double m = 0.0; m <= 20.0; m += 0.125) {
    const double t0 = existence_interval(m, 0.8, 2.0, 0.3).estimate;
    CHECK(t0 <= prev);
    prev = t0;
  }
  CHECK_THROWS_AS(existence_interval(-1.0, 1.0, 1.0, 0.5), PreconditionError);
  CHECK_THROWS_AS(existence_interval(1.0, 0.0, 1.0, 0.5), PreconditionError);
}

TEST_CASE("estimate_nagumo_constant") {
  SUBCASE("unique example sits exactly at the threshold") {
    for (double a : {0.3, 0.5, 0.7}) {
      const auto p = make(a, 1, 1, "t/gamma(1-" + num(a) + ")");
      const auto c = estimate_nagumo_constant(p, default_t_box(p));
      CHECK(c.passed);
      CHECK(std::abs(c.estimate - 1.0 / sf::gamma(1.0 - a)) <= 1e-9);
    }
  }
  SUBCASE("Example-1 family at beta = 1 fails") {
    const auto p = make(0.5, 1, 1, beta_family_h(0.5, 1.0));
    const auto c = estimate_nagumo_constant(p, default_t_box(p));
    CHECK_FALSE(c.passed);
    CHECK(c.estimate == doctest::Approx(1.0 / sf::gamma(1.5)).epsilon(1e-9));
    CHECK(c.estimate == doctest::Approx(1.1283791670955126).epsilon(1e-12));
    CHECK(c.threshold == doctest::Approx(0.5641895835477563).epsilon(1e-12));
  }
  SUBCASE("constant in t") {
    const auto p = make(0.5, 1, 1, "1/gamma(0.5) + x^2");
    const auto c = estimate_nagumo_constant(p, default_t_box(p));
    CHECK(c.estimate == 0.0);
    CHECK(c.passed);
  }
  SUBCASE("degenerate box") {
    const auto p = make(0.5, 1, 1, "t");
    CHECK_THROWS_AS(estimate_nagumo_constant(p, {1.0, 1.0}), PreconditionError);
  }
}

TEST_CASE("apriori_bound") {
  SUBCASE("zero deviation gives |u0|") {
    const auto p = make(0.5, -3, 1, "-3/gamma(0.5)");
    CHECK(apriori_bound(p, default_t_box(p)).estimate == doctest::Approx(3.0).epsilon(1e-15));
  }
  SUBCASE("unique example on [0, 2]") {
    const auto p = make(0.5, 1, 1, "t/gamma(1-0.5)");
    CHECK(apriori_bound(p, {0.0, 2.0}).estimate == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("never below |u0|") {
    for (const char* h : {"t*x", "sin(t*x) + 1/gamma(0.5)", "t/gamma(0.5)"}) {
      const auto p = make(0.5, 1.5, 2, h);
      CHECK(apriori_bound(p, default_t_box(p)).estimate >= 1.5);
    }
  }
}

TEST_CASE("properties: nested grids never decrease the estimates") {
  const auto p = make(0.4, 1, 1.5, "t/gamma(0.6) + sin(3*x*t) * x^0.7 + 0.2*x*t^2");
  const Interval box = default_t_box(p);
  double prev_growth = 0.0;
  double prev_nagumo = 0.0;
  SamplingSpec spec{16, 9, 1e-6, true};
  for (int level = 0; level < 4; ++level) {
    const double g = estimate_growth_constant(p, 0.8, spec).estimate;
    const double n = estimate_nagumo_constant(p, box, spec).estimate;
    CHECK(g >= prev_growth);
    CHECK(n >= prev_nagumo);
    prev_growth = g;
    prev_nagumo = n;
    spec.n_x *= 2;
    spec.n_t = 2 * spec.n_t - 1;
  }
}

TEST_CASE("properties: scale law for growth and Nagumo estimates") {
  const double a = 0.35;
  const std::string c0 = "(1.25/gamma(1-" + num(a) + "))";
  const std::string dev = "(t - 1.25)*cos(x) + x*sin(t)";
  const auto base = make(a, 1.25, 1, c0 + " + " + dev);
  const auto g0 = estimate_growth_constant(base, 1.0).estimate;
  const auto n0 = estimate_nagumo_constant(base, default_t_box(base)).estimate;
  for (double s : {-2.0, 0.5, 3.0}) {
    const auto scaled = make(a, 1.25, 1, c0 + " + " + num(s) + "*(" + dev + ")");
    const auto g = estimate_growth_constant(scaled, 1.0).estimate;
    const auto n = estimate_nagumo_constant(scaled, default_t_box(scaled)).estimate;
    CHECK(std::abs(g - std::abs(s) * g0) <= 1e-10 * (1.0 + std::abs(s) * g0));
    CHECK(std::abs(n - std::abs(s) * n0) <= 1e-10 * (1.0 + std::abs(s) * n0));
  }
}

TEST_CASE("sample layouts") {
  const auto xs = sample_x(2.0, {});
  REQUIRE(xs.size() == 256);
  CHECK(xs.front() > 2.0 * 1e-6);
  CHECK(xs.back() == 2.0);
  for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] > xs[i - 1]);
  const auto ts = sample_t({-1.0, 3.0}, 5);
  CHECK(ts == std::vector<double>{-1.0, 0.0, 1.0, 2.0, 3.0});
}
