#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <string>

#include "fracivp/expr.hpp"
#include "fracivp/specfun.hpp"

using namespace fracivp::expr;
namespace sf = fracivp::specfun;

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// Random well-formed source text drawn from the grammar, with irregular
// spacing and optional redundant parentheses.
class SourceGen {
 public:
  explicit SourceGen(std::uint64_t seed) : rng_(seed) {}

  std::string expression(int depth) {
    const int pick = depth <= 0 ? uniform(0, 2) : uniform(0, 9);
    switch (pick) {
      case 0: return number();
      case 1: return "x";
      case 2: return "t";
      case 3: return wrap(expression(depth - 1)) + space() + "+" + space() + wrap(expression(depth - 1));
      case 4: return wrap(expression(depth - 1)) + space() + "-" + space() + wrap(expression(depth - 1));
      case 5: return wrap(expression(depth - 1)) + "*" + wrap(expression(depth - 1));
      case 6: return wrap(expression(depth - 1)) + "/" + space() + wrap(expression(depth - 1));
      case 7: return wrap(expression(depth - 1)) + "^" + wrap(expression(depth - 1));
      case 8: return "-" + wrap(expression(depth - 1));
      default: {
        static const char* one[] = {"gamma", "sqrt", "abs", "exp", "ln", "sin", "cos"};
        static const char* two[] = {"pow", "max"};
        if (uniform(0, 3) == 0) {
          return std::string(two[uniform(0, 1)]) + "(" + expression(depth - 1) + "," + space() +
                 expression(depth - 1) + ")";
        }
        return std::string(one[uniform(0, 6)]) + "(" + space() + expression(depth - 1) + ")";
      }
    }
  }

 private:
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string wrap(const std::string& s) { return "(" + s + ")"; }

  std::string space() { return uniform(0, 2) == 0 ? " " : ""; }

  std::string number() {
    switch (uniform(0, 3)) {
      case 0: return std::to_string(uniform(0, 100));
      case 1: return "0." + std::to_string(uniform(0, 99999));
      case 2: return std::to_string(uniform(1, 9)) + "e-" + std::to_string(uniform(1, 12));
      default: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g",
                      std::uniform_real_distribution<double>(0.0, 50.0)(rng_));
        return buf;
      }
    }
  }

  std::mt19937_64 rng_;
};

}  // namespace

TEST_CASE("parse: structure of t/gamma(1-0.5)") {
  const auto e = parse("t/gamma(1-0.5)");
  const Node& root = *e.root();
  REQUIRE(root.kind == NodeKind::Binary);
  CHECK(root.op == BinaryOp::Div);
  CHECK(root.children[0]->kind == NodeKind::Variable);
  CHECK(root.children[0]->variable == Variable::T);
  CHECK(root.children[1]->kind == NodeKind::Call);
  CHECK(root.children[1]->function == Function::Gamma);
  CHECK(e(0.0, 1.0) == doctest::Approx(1.0 / sf::gamma(0.5)));
}

TEST_CASE("precedence and associativity") {
  CHECK(parse("2^3^2")(0, 0) == 512.0);
  CHECK(parse("-2^2")(0, 0) == -4.0);
  CHECK(parse("2^-1")(0, 0) == 0.5);
  CHECK(parse("1-2-3")(0, 0) == -4.0);
  CHECK(parse("8/4/2")(0, 0) == 1.0);
  CHECK(parse("1+2*3")(0, 0) == 7.0);
  CHECK(parse("-x*t")(2, 3) == -6.0);
  CHECK(parse("x^(0.5)*t")(4.0, 3.0) == 6.0);
  CHECK(parse(" max(x, abs(t-1)/2) ")(0.3, 2.0) == 0.5);
  CHECK(parse(".5e1")(0, 0) == 5.0);
  CHECK(parse("pow(2, 10)")(0, 0) == 1024.0);
}

TEST_CASE("eval: Example-1 shift constant k at beta = 1, a = 0.5") {
  const auto k = parse("(gamma(1.5) - gamma(2)*gamma(0.5))/(gamma(2)*gamma(0.5))");
  // gamma(1.5) = gamma(0.5)/2, so k = 1/2 - 1
  CHECK(k(0, 0) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("eval: domain errors carry the location") {
  auto offset_of = [](const char* src, double x, double t) -> std::size_t {
    try {
      parse(src)(x, t);
    } catch (const EvalError& e) {
      return e.offset();
    }
    return 0;
  };
  CHECK(offset_of("gamma(-1)", 0, 0) == 1);
  CHECK(offset_of("1 + gamma(0)", 0, 0) == 5);
  CHECK(offset_of("ln(x)", 0, 0) == 1);
  CHECK(offset_of("x^(-1)", 0, 0) == 2);
  CHECK(offset_of("(-2)^0.5", 0, 0) == 5);
  CHECK(offset_of("pow(-2, 0.5)", 0, 0) == 1);
  CHECK(offset_of("t/x", 0, 1) == 2);
  CHECK(offset_of("sqrt(t)", 0, -1) == 1);
  CHECK(offset_of("exp(t)", 0, 1000) == 1);
  CHECK_THROWS_AS(parse("gamma(200)")(0, 0), EvalError);
  // integer exponents of negative bases are fine
  CHECK(parse("(-2)^3")(0, 0) == -8.0);
  CHECK(parse("0^0")(0, 0) == 1.0);
}

TEST_CASE("parse errors: offsets and expected sets") {
  auto catch_parse = [](const char* src) -> ParseError {
    try {
      parse(src);
    } catch (const ParseError& e) {
      return e;
    }
    FAIL("no parse error for " << src);
    return ParseError("", 0, {});
  };

  auto e1 = catch_parse("1 + ");
  CHECK(e1.offset() == 5);
  CHECK(contains(e1.expected(), "number"));

  auto e2 = catch_parse("2*(x+1");
  CHECK(e2.offset() == 7);
  CHECK(contains(e2.expected(), "')'"));

  auto e3 = catch_parse("y + 1");
  CHECK(e3.offset() == 1);
  CHECK(std::string(e3.what()).find("unknown identifier") != std::string::npos);

  auto e4 = catch_parse("x + gamma(1, 2)");
  CHECK(e4.offset() == 5);
  CHECK(std::string(e4.what()).find("expects 1 argument") != std::string::npos);

  auto e5 = catch_parse("max(1)");
  CHECK(std::string(e5.what()).find("expects 2 arguments") != std::string::npos);

  auto e6 = catch_parse("x $ 2");
  CHECK(e6.offset() == 3);

  auto e7 = catch_parse("x 2");
  CHECK(e7.offset() == 3);
  CHECK(contains(e7.expected(), "end of input"));

  auto e8 = catch_parse("");
  CHECK(e8.offset() == 1);

  auto e9 = catch_parse("1e999");
  CHECK(e9.offset() == 1);

  auto e10 = catch_parse("gamma 2");
  CHECK(contains(e10.expected(), "'('"));

  CHECK_THROWS_AS(parse("+1"), ParseError);
  CHECK_THROWS_AS(parse("1e"), ParseError);
}

TEST_CASE("print: canonical form") {
  CHECK(print(parse("1+2*x")) == "(1 + (2 * x))");
  CHECK(print(parse("-x^2")) == "(-(x ^ 2))");
  CHECK(print(parse("max(x,t)")) == "max(x, t)");
  CHECK(print(parse("0.1")) == "0.10000000000000001");
}

TEST_CASE("round trip: parse(print(parse(s))) == parse(s) on 1000 random sources") {
  SourceGen gen(424242);
  for (int i = 0; i < 1000; ++i) {
    const std::string src = gen.expression(4);
    const auto first = parse(src);
    const auto again = parse(print(first));
    INFO("source: " << src);
    REQUIRE(structurally_equal(*first.root(), *again.root()));
  }
}

TEST_CASE("eval is deterministic") {
  SourceGen gen(99);
  for (int i = 0; i < 200; ++i) {
    const auto e = parse(gen.expression(3));
    double first = 0.0;
    bool ok = true;
    try {
      first = e(0.37, 1.25);
    } catch (const EvalError&) {
      ok = false;
    }
    if (!ok) {
      CHECK_THROWS_AS(e(0.37, 1.25), EvalError);
      continue;
    }
    CHECK(std::bit_cast<std::uint64_t>(e(0.37, 1.25)) == std::bit_cast<std::uint64_t>(first));
  }
}

TEST_CASE("variable usage") {
  CHECK(parse("x + 1").uses_x());
  CHECK_FALSE(parse("x + 1").uses_t());
  CHECK(parse("gamma(t)").uses_t());
}
