#include "fracivp/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fracivp/specfun.hpp"

namespace fracivp::expr {

namespace {

struct FunctionInfo {
  std::string_view name;
  Function function;
  std::size_t arity;
};

constexpr std::array<FunctionInfo, 9> kFunctions = {{
    {"gamma", Function::Gamma, 1},
    {"sqrt", Function::Sqrt, 1},
    {"abs", Function::Abs, 1},
    {"exp", Function::Exp, 1},
    {"ln", Function::Ln, 1},
    {"sin", Function::Sin, 1},
    {"cos", Function::Cos, 1},
    {"pow", Function::Pow, 2},
    {"max", Function::Max, 2},
}};

const FunctionInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::string_view function_name(Function fn) {
  for (const auto& f : kFunctions) {
    if (f.function == fn) return f.name;
  }
  return "?";
}

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  double number = 0.0;
  std::size_t offset = 1;
};

const std::vector<std::string> kOperandStart = {"number", "identifier", "'('", "'-'"};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) { advance(); }

  NodePtr parse_all() {
    auto root = expression();
    if (cur_.kind != Tok::End) {
      fail("unexpected " + describe(cur_), cur_.offset,
           {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t offset,
                         std::vector<std::string> expected) {
    throw ParseError(what, offset, std::move(expected));
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    return "'" + std::string(t.text) + "'";
  }

  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    cur_ = Token{};
    cur_.offset = pos_ + 1;
    if (pos_ >= src_.size()) {
      cur_.kind = Tok::End;
      return;
    }
    const char c = src_[pos_];
    const std::size_t start = pos_;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number(start);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      cur_.kind = Tok::Ident;
      cur_.text = src_.substr(start, pos_ - start);
      return;
    }
    ++pos_;
    cur_.text = src_.substr(start, 1);
    switch (c) {
      case '+': cur_.kind = Tok::Plus; return;
      case '-': cur_.kind = Tok::Minus; return;
      case '*': cur_.kind = Tok::Star; return;
      case '/': cur_.kind = Tok::Slash; return;
      case '^': cur_.kind = Tok::Caret; return;
      case '(': cur_.kind = Tok::LParen; return;
      case ')': cur_.kind = Tok::RParen; return;
      case ',': cur_.kind = Tok::Comma; return;
      default:
        fail("unexpected character '" + std::string(1, c) + "'", start + 1, kOperandStart);
    }
  }

  void lex_number(std::size_t start) {
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) fail("malformed number", start + 1, {"digit"});
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent in number", pos_ + 1, {"digit"});
    }
    cur_.kind = Tok::Number;
    cur_.text = src_.substr(start, pos_ - start);
    // from_chars does not accept a leading '.', so prefix a zero.
    const std::string buf =
        cur_.text.front() == '.' ? "0" + std::string(cur_.text) : std::string(cur_.text);
    const char* first = buf.data();
    const char* last = buf.data() + buf.size();
    auto [ptr, ec] = std::from_chars(first, last, cur_.number);
    if (ec != std::errc{} || ptr != last || !std::isfinite(cur_.number)) {
      fail("number out of range: " + std::string(cur_.text), start + 1, {"finite number"});
    }
  }

  static NodePtr make_binary(BinaryOp op, NodePtr l, NodePtr r, std::size_t offset) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Binary;
    n->op = op;
    n->offset = offset;
    n->children = {std::move(l), std::move(r)};
    return n;
  }

  NodePtr expression() {
    auto lhs = term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const auto op = cur_.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      const auto off = cur_.offset;
      advance();
      lhs = make_binary(op, std::move(lhs), term(), off);
    }
    return lhs;
  }

  NodePtr term() {
    auto lhs = unary();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const auto op = cur_.kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      const auto off = cur_.offset;
      advance();
      lhs = make_binary(op, std::move(lhs), unary(), off);
    }
    return lhs;
  }

  NodePtr unary() {
    if (cur_.kind == Tok::Minus) {
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Negate;
      n->offset = cur_.offset;
      advance();
      n->children = {unary()};
      return n;
    }
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (cur_.kind == Tok::Caret) {
      const auto off = cur_.offset;
      advance();
      return make_binary(BinaryOp::Pow, std::move(base), unary(), off);
    }
    return base;
  }

  NodePtr primary() {
    auto n = std::make_shared<Node>();
    n->offset = cur_.offset;
    switch (cur_.kind) {
      case Tok::Number:
        n->kind = NodeKind::Number;
        n->number = cur_.number;
        advance();
        return n;
      case Tok::LParen: {
        advance();
        auto inner = expression();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident:
        return identifier();
      default:
        fail("expected an operand, found " + describe(cur_), cur_.offset, kOperandStart);
    }
  }

  NodePtr identifier() {
    const Token id = cur_;
    advance();
    auto n = std::make_shared<Node>();
    n->offset = id.offset;
    if (id.text == "x" || id.text == "t") {
      n->kind = NodeKind::Variable;
      n->variable = id.text == "x" ? Variable::X : Variable::T;
      return n;
    }
    const FunctionInfo* fn = find_function(id.text);
    if (fn == nullptr) {
      fail("unknown identifier '" + std::string(id.text) + "'", id.offset,
           {"x", "t", "gamma", "sqrt", "abs", "exp", "ln", "sin", "cos", "pow", "max"});
    }
    n->kind = NodeKind::Call;
    n->function = fn->function;
    expect(Tok::LParen, "'('");
    n->children.push_back(expression());
    while (cur_.kind == Tok::Comma) {
      advance();
      n->children.push_back(expression());
    }
    expect(Tok::RParen, "')'");
    if (n->children.size() != fn->arity) {
      std::ostringstream msg;
      msg << fn->name << " expects " << fn->arity << " argument" << (fn->arity == 1 ? "" : "s")
          << ", got " << n->children.size();
      fail(msg.str(), id.offset, {std::to_string(fn->arity) + " argument(s)"});
    }
    return n;
  }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind) {
      std::vector<std::string> expected = {what};
      if (kind == Tok::RParen) expected = {"')'", "','", "operator"};
      fail(std::string("expected ") + what + ", found " + describe(cur_), cur_.offset,
           std::move(expected));
    }
    advance();
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token cur_;
};

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double checked(double v, const Node& n, const char* what) {
  if (!std::isfinite(v)) {
    throw EvalError(std::string("non-finite result in ") + what, n.offset);
  }
  return v;
}

double power_checked(double base, double exponent, const Node& n) {
  if (base == 0.0 && exponent < 0.0) {
    throw EvalError("zero raised to a negative power", n.offset);
  }
  if (base < 0.0 && exponent != std::trunc(exponent)) {
    throw EvalError("negative base with non-integer exponent", n.offset);
  }
  return checked(std::pow(base, exponent), n, "power");
}

double evaluate(const Node& n, double x, double t) {
  switch (n.kind) {
    case NodeKind::Number:
      return n.number;
    case NodeKind::Variable:
      return n.variable == Variable::X ? x : t;
    case NodeKind::Negate:
      return -evaluate(*n.children[0], x, t);
    case NodeKind::Binary: {
      const double l = evaluate(*n.children[0], x, t);
      const double r = evaluate(*n.children[1], x, t);
      switch (n.op) {
        case BinaryOp::Add: return checked(l + r, n, "addition");
        case BinaryOp::Sub: return checked(l - r, n, "subtraction");
        case BinaryOp::Mul: return checked(l * r, n, "multiplication");
        case BinaryOp::Div:
          if (r == 0.0) throw EvalError("division by zero", n.offset);
          return checked(l / r, n, "division");
        case BinaryOp::Pow: return power_checked(l, r, n);
      }
      break;
    }
    case NodeKind::Call: {
      const double v = evaluate(*n.children[0], x, t);
      switch (n.function) {
        case Function::Gamma:
          if (!(v > 0.0)) throw EvalError("gamma of a non-positive argument", n.offset);
          try {
            return specfun::gamma(v);
          } catch (const DomainError& e) {
            throw EvalError(e.what(), n.offset);
          }
        case Function::Sqrt:
          if (v < 0.0) throw EvalError("sqrt of a negative argument", n.offset);
          return std::sqrt(v);
        case Function::Abs: return std::abs(v);
        case Function::Exp: return checked(std::exp(v), n, "exp");
        case Function::Ln:
          if (!(v > 0.0)) throw EvalError("ln of a non-positive argument", n.offset);
          return std::log(v);
        case Function::Sin: return std::sin(v);
        case Function::Cos: return std::cos(v);
        case Function::Pow: return power_checked(v, evaluate(*n.children[1], x, t), n);
        case Function::Max: return std::max(v, evaluate(*n.children[1], x, t));
      }
      break;
    }
  }
  throw EvalError("corrupt expression node", n.offset);
}

bool mentions(const Node& n, Variable v) {
  if (n.kind == NodeKind::Variable) return n.variable == v;
  for (const auto& c : n.children) {
    if (mentions(*c, v)) return true;
  }
  return false;
}

std::string message_with_expected(const std::string& what, std::size_t offset,
                                  const std::vector<std::string>& expected) {
  std::ostringstream msg;
  msg << "at offset " << offset << ": " << what;
  if (!expected.empty()) {
    msg << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) msg << (i ? ", " : "") << expected[i];
    msg << ")";
  }
  return msg.str();
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t offset,
                       std::vector<std::string> expected)
    : std::runtime_error(message_with_expected(message, offset, expected)),
      offset_(offset),
      expected_(std::move(expected)) {}

EvalError::EvalError(const std::string& message, std::size_t offset)
    : DomainError("at offset " + std::to_string(offset) + ": " + message), offset_(offset) {}

Expression parse(std::string_view text) {
  Parser p(text);
  return Expression(p.parse_all(), std::string(text));
}

double Expression::operator()(double x, double t) const {
  if (!root_) throw EvalError("empty expression", 1);
  const double v = evaluate(*root_, x, t);
  if (!std::isfinite(v)) throw EvalError("non-finite result", root_->offset);
  return v;
}

bool Expression::uses_x() const { return root_ && mentions(*root_, Variable::X); }
bool Expression::uses_t() const { return root_ && mentions(*root_, Variable::T); }

std::string print(const Node& n) {
  switch (n.kind) {
    case NodeKind::Number: return format_number(n.number);
    case NodeKind::Variable: return n.variable == Variable::X ? "x" : "t";
    case NodeKind::Negate: return "(-" + print(*n.children[0]) + ")";
    case NodeKind::Binary: {
      static constexpr std::array<const char*, 5> kOps = {" + ", " - ", " * ", " / ", " ^ "};
      return "(" + print(*n.children[0]) + kOps[static_cast<std::size_t>(n.op)] +
             print(*n.children[1]) + ")";
    }
    case NodeKind::Call: {
      std::string out(function_name(n.function));
      out += "(";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += ", ";
        out += print(*n.children[i]);
      }
      return out + ")";
    }
  }
  return "?";
}

std::string print(const Expression& e) { return e.root() ? print(*e.root()) : std::string(); }

bool structurally_equal(const Node& l, const Node& r) {
  if (l.kind != r.kind || l.children.size() != r.children.size()) return false;
  switch (l.kind) {
    case NodeKind::Number:
      if (l.number != r.number) return false;
      break;
    case NodeKind::Variable:
      if (l.variable != r.variable) return false;
      break;
    case NodeKind::Binary:
      if (l.op != r.op) return false;
      break;
    case NodeKind::Call:
      if (l.function != r.function) return false;
      break;
    case NodeKind::Negate:
      break;
  }
  for (std::size_t i = 0; i < l.children.size(); ++i) {
    if (!structurally_equal(*l.children[i], *r.children[i])) return false;
  }
  return true;
}

}  // namespace fracivp::expr
