#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fracivp/errors.hpp"

namespace fracivp::expr {

/// Grammar (see docs/grammar.md):
///
///   expression := term { ("+" | "-") term }
///   term       := unary { ("*" | "/") unary }
///   unary      := "-" unary | power
///   power      := primary [ "^" unary ]          (right associative)
///   primary    := number | "x" | "t" | call | "(" expression ")"
///   call       := name "(" expression { "," expression } ")"
///
/// Functions: gamma sqrt abs exp ln sin cos (one argument), pow max (two).

enum class NodeKind { Number, Variable, Negate, Binary, Call };
enum class Variable { X, T };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Gamma, Sqrt, Abs, Exp, Ln, Sin, Cos, Pow, Max };

struct Node {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;
  Variable variable = Variable::X;
  BinaryOp op = BinaryOp::Add;
  Function function = Function::Gamma;
  std::vector<std::shared_ptr<const Node>> children;
  std::size_t offset = 1;  // 1-based byte offset of the token in the source
};

using NodePtr = std::shared_ptr<const Node>;

/// Syntax error, unknown identifier or arity mismatch.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset,
             std::vector<std::string> expected);

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// Domain violation during evaluation; offset locates the sub-expression.
class EvalError : public DomainError {
 public:
  EvalError(const std::string& message, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Immutable parsed expression in the variables x and t.
class Expression {
 public:
  Expression() = default;

  const NodePtr& root() const { return root_; }
  const std::string& source() const { return source_; }

  /// Evaluates with the given bindings. Throws EvalError instead of
  /// returning NaN or infinity.
  double operator()(double x, double t) const;

  bool uses_x() const;
  bool uses_t() const;

 private:
  friend Expression parse(std::string_view text);
  Expression(NodePtr root, std::string source)
      : root_(std::move(root)), source_(std::move(source)) {}

  NodePtr root_;
  std::string source_;
};

Expression parse(std::string_view text);

inline double eval(const Expression& e, double x, double t) { return e(x, t); }

/// Canonical, fully parenthesised text. Numbers are written with 17
/// significant digits, so parse(print(e)) is structurally equal to e.
std::string print(const Expression& e);
std::string print(const Node& n);

/// Structural equality (source offsets ignored, numbers compared exactly).
bool structurally_equal(const Node& l, const Node& r);

}  // namespace fracivp::expr
