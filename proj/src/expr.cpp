#include "plap/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace plap {

ParseError::ParseError(std::size_t offset, const std::string& message)
    : std::invalid_argument("offset " + std::to_string(offset) + ": " + message), offset_(offset), message_(message) {}

const std::vector<std::string>& expr_variables() {
  static const std::vector<std::string> v{"n", "p", "q"};
  return v;
}

const std::vector<std::string>& expr_constants() {
  static const std::vector<std::string> c{"alpha", "lambda", "eps2", "t", "beta0", "M", "k", "omega_star"};
  return c;
}

namespace {

bool contains(const std::vector<std::string>& xs, const std::string& x) {
  for (const auto& s : xs)
    if (s == x) return true;
  return false;
}

std::shared_ptr<ExprNode> make(NodeKind kind, std::size_t offset, Expr lhs = nullptr, Expr rhs = nullptr) {
  auto node = std::make_shared<ExprNode>();
  node->kind = kind;
  node->offset = offset;
  node->lhs = std::move(lhs);
  node->rhs = std::move(rhs);
  return node;
}

/// Recursive descent over the raw text; pos_ always sits on a non-space character or the end.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) { skip(); }

  Expr parse() {
    if (at_end()) throw ParseError(pos_, "expected expression, found end of input");
    auto e = expr();
    if (!at_end()) {
      if (peek() == ')') throw ParseError(pos_, "unbalanced ')'");
      throw ParseError(pos_, "expected operator or end of input, found '" + std::string(1, peek()) + "'");
    }
    return e;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void advance() {
    ++pos_;
    skip();
  }
  std::string found() const { return at_end() ? "end of input" : "'" + std::string(1, peek()) + "'"; }

  Expr expr() {
    auto lhs = term();
    while (peek() == '+' || peek() == '-') {
      const auto at = pos_;
      const auto kind = peek() == '+' ? NodeKind::add : NodeKind::sub;
      advance();
      lhs = make(kind, at, lhs, term());
    }
    return lhs;
  }

  Expr term() {
    auto lhs = unary();
    while (peek() == '*' || peek() == '/') {
      const auto at = pos_;
      const auto kind = peek() == '*' ? NodeKind::mul : NodeKind::div;
      advance();
      lhs = make(kind, at, lhs, unary());
    }
    return lhs;
  }

  Expr unary() {
    if (peek() == '-') {
      const auto at = pos_;
      advance();
      return make(NodeKind::neg, at, unary());
    }
    return power();
  }

  Expr power() {
    auto base = atom();
    if (peek() != '^') return base;
    const auto at = pos_;
    advance();
    auto ex = exponent();
    auto node = make(NodeKind::pow, at, base, ex.first);
    node->exponent = ex.second;
    return node;
  }

  /// Integer-literal exponent with its folded value.
  std::pair<Expr, long> exponent() {
    const auto at = pos_;
    if (peek() == '(') {
      advance();
      auto inner = exponent();
      if (peek() != ')') throw ParseError(pos_, "exponent must be an integer literal, found " + found());
      advance();
      auto g = make(NodeKind::group, at, inner.first);
      return {g, inner.second};
    }
    if (peek() == '-') {
      advance();
      auto inner = exponent_literal();
      return {make(NodeKind::neg, at, inner.first), -inner.second};
    }
    return exponent_literal();
  }

  std::pair<Expr, long> exponent_literal() {
    const auto at = pos_;
    if (!std::isdigit(static_cast<unsigned char>(peek())))
      throw ParseError(pos_, "exponent must be an integer literal, found " + found());
    auto lit = number();
    if (!lit->number.is_integer()) throw ParseError(at, "exponent must be an integer literal");
    if (!lit->number.raw().get_num().fits_slong_p()) throw ParseError(at, "exponent too large");
    long value = lit->number.raw().get_num().get_si();
    if (peek() != '^') return {lit, value};
    const auto hat = pos_;
    advance();
    auto rest = exponent();
    if (rest.second < 0) throw ParseError(hat, "exponent must fold to an integer (negative tower)");
    // value >= 0 here; fold value^rest with an overflow guard
    long folded = 1;
    if (value <= 1) {
      folded = (value == 0 && rest.second > 0) ? 0 : 1;
    } else {
      for (long i = 0; i < rest.second; ++i) {
        if (folded > std::numeric_limits<long>::max() / value) throw ParseError(hat, "exponent too large");
        folded *= value;
      }
    }
    auto node = make(NodeKind::pow, hat, lit, rest.first);
    node->exponent = rest.second;
    return {node, folded};
  }

  std::shared_ptr<ExprNode> number() {
    const auto at = pos_;
    std::size_t end = pos_;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    std::size_t frac_digits = 0;
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      const auto start = end;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
      frac_digits = end - start;
      if (frac_digits == 0) throw ParseError(end, "expected digit after '.'");
    }
    std::string spelled(text_.substr(at, end - at));
    std::string digits;
    for (char c : spelled)
      if (c != '.') digits += c;
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_digits);
    auto node = make(NodeKind::number, at);
    node->number = Rational(mpz_class(digits, 10), den);  // base 10: leading zeros are not octal
    node->name = spelled;
    pos_ = end;
    skip();
    return node;
  }

  Expr atom() {
    const auto at = pos_;
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) ++end;
      std::string name(text_.substr(at, end - at));
      NodeKind kind;
      if (contains(expr_variables(), name)) kind = NodeKind::variable;
      else if (contains(expr_constants(), name)) kind = NodeKind::constant;
      else throw ParseError(at, "unknown name '" + name + "' (expected n, p, q or a named constant)");
      auto node = make(kind, at);
      node->name = name;
      pos_ = end;
      skip();
      return node;
    }
    if (c == '(') {
      advance();
      if (peek() == ')') throw ParseError(pos_, "expected expression inside parentheses");
      auto inner = expr();
      if (peek() != ')') throw ParseError(pos_, "expected ')', found " + found());
      advance();
      return make(NodeKind::group, at, inner);
    }
    if (c == ')') throw ParseError(pos_, "unbalanced ')'");
    throw ParseError(pos_, "expected number, name or '(', found " + found());
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

std::string print_expr(const Expr& e) {
  switch (e->kind) {
    case NodeKind::number: return e->name.empty() ? e->number.to_string() : e->name;
    case NodeKind::variable:
    case NodeKind::constant: return e->name;
    case NodeKind::add: return print_expr(e->lhs) + " + " + print_expr(e->rhs);
    case NodeKind::sub: return print_expr(e->lhs) + " - " + print_expr(e->rhs);
    case NodeKind::mul: return print_expr(e->lhs) + " * " + print_expr(e->rhs);
    case NodeKind::div: return print_expr(e->lhs) + " / " + print_expr(e->rhs);
    case NodeKind::pow: return print_expr(e->lhs) + "^" + print_expr(e->rhs);
    case NodeKind::neg: return "-" + print_expr(e->lhs);
    case NodeKind::group: return "(" + print_expr(e->lhs) + ")";
  }
  return {};
}

// --- evaluation ----------------------------------------------------------------

namespace {

std::string at_offset(const Expr& e) { return " at offset " + std::to_string(e->offset); }

/// Shared traversal; the leaf resolver and field operations differ by mode.
template <class T, class Leaf, class Ops>
T evaluate_tree(const Expr& e, const Leaf& leaf, const Ops& ops) {
  switch (e->kind) {
    case NodeKind::number:
    case NodeKind::variable:
    case NodeKind::constant: return leaf(e);
    case NodeKind::group: return evaluate_tree<T>(e->lhs, leaf, ops);
    case NodeKind::neg: return ops.neg(evaluate_tree<T>(e->lhs, leaf, ops));
    case NodeKind::pow: {
      try {
        return ops.pow(evaluate_tree<T>(e->lhs, leaf, ops), e->exponent);
      } catch (const ArithmeticError&) {
        throw EvalError("zero raised to a negative power" + at_offset(e));
      }
    }
    default: break;
  }
  auto l = evaluate_tree<T>(e->lhs, leaf, ops);
  auto r = evaluate_tree<T>(e->rhs, leaf, ops);
  switch (e->kind) {
    case NodeKind::add: return ops.add(l, r);
    case NodeKind::sub: return ops.sub(l, r);
    case NodeKind::mul: return ops.mul(l, r);
    case NodeKind::div:
      try {
        return ops.div(l, r);
      } catch (const ArithmeticError&) {
        throw EvalError("division by zero" + at_offset(e));
      }
    default: throw std::logic_error("unreachable expression kind");
  }
}

struct SymbolicOps {
  RationalFunction neg(const RationalFunction& a) const { return -a; }
  RationalFunction add(const RationalFunction& a, const RationalFunction& b) const { return a + b; }
  RationalFunction sub(const RationalFunction& a, const RationalFunction& b) const { return a - b; }
  RationalFunction mul(const RationalFunction& a, const RationalFunction& b) const { return a * b; }
  RationalFunction div(const RationalFunction& a, const RationalFunction& b) const {
    if (b.is_zero()) throw ArithmeticError("division by zero");
    return a / b;
  }
  RationalFunction pow(const RationalFunction& a, long k) const {
    if (k < 0 && a.is_zero()) throw ArithmeticError("zero to negative power");
    return a.pow(k);
  }
};

/// Exact until a double enters; then everything downstream is double.
struct NumericOps {
  static double real(const NumericValue& v) {
    return std::holds_alternative<double>(v) ? std::get<double>(v) : std::get<Rational>(v).to_double();
  }
  static bool exact(const NumericValue& a, const NumericValue& b) {
    return std::holds_alternative<Rational>(a) && std::holds_alternative<Rational>(b);
  }
  NumericValue neg(const NumericValue& a) const {
    if (std::holds_alternative<Rational>(a)) return -std::get<Rational>(a);
    return -std::get<double>(a);
  }
  NumericValue add(const NumericValue& a, const NumericValue& b) const {
    if (exact(a, b)) return std::get<Rational>(a) + std::get<Rational>(b);
    return real(a) + real(b);
  }
  NumericValue sub(const NumericValue& a, const NumericValue& b) const {
    if (exact(a, b)) return std::get<Rational>(a) - std::get<Rational>(b);
    return real(a) - real(b);
  }
  NumericValue mul(const NumericValue& a, const NumericValue& b) const {
    if (exact(a, b)) return std::get<Rational>(a) * std::get<Rational>(b);
    return real(a) * real(b);
  }
  NumericValue div(const NumericValue& a, const NumericValue& b) const {
    if (exact(a, b)) {
      if (std::get<Rational>(b).is_zero()) throw ArithmeticError("division by zero");
      return std::get<Rational>(a) / std::get<Rational>(b);
    }
    if (real(b) == 0.0) throw ArithmeticError("division by zero");
    return real(a) / real(b);
  }
  NumericValue pow(const NumericValue& a, long k) const {
    if (std::holds_alternative<Rational>(a)) {
      if (k < 0 && std::get<Rational>(a).is_zero()) throw ArithmeticError("zero to negative power");
      return std::get<Rational>(a).pow(k);
    }
    if (k < 0 && std::get<double>(a) == 0.0) throw ArithmeticError("zero to negative power");
    return std::pow(std::get<double>(a), static_cast<double>(k));
  }
};

}  // namespace

RationalFunction eval_symbolic(const Expr& e, const SymbolicBinding& binding) {
  const auto b = binding.fixed_n > 0 ? ExprBuilder::with_fixed_n(binding.fixed_n) : ExprBuilder::symbolic();
  const auto beta = [&] { return binding.beta_symbolic ? b.beta() : b.beta0(); };
  auto leaf = [&](const Expr& node) -> RationalFunction {
    switch (node->kind) {
      case NodeKind::number: return b.cst(node->number);
      case NodeKind::variable:
        if (node->name == "n") return b.n();
        if (node->name == "p") return b.p();
        return b.q();
      default: break;
    }
    const auto& c = node->name;
    if (c == "alpha") return b.alpha();
    if (c == "lambda") return b.lambda();
    if (c == "eps2") return b.eps2();
    if (c == "t") return b.t();
    if (c == "beta0") return b.beta0();
    if (c == "k") return b.k(beta());
    if (c == "M") return b.M(beta());
    throw EvalError("constant '" + c + "' is irrational and has no symbolic value" + at_offset(node));
  };
  return evaluate_tree<RationalFunction>(e, leaf, SymbolicOps{});
}

NumericValue eval_numeric(const Expr& e, const ParamPoint& pt) {
  auto leaf = [&](const Expr& node) -> NumericValue {
    switch (node->kind) {
      case NodeKind::number: return node->number;
      case NodeKind::variable:
        if (node->name == "n") return Rational(pt.n);
        if (node->name == "p") return pt.p;
        return pt.q;
      default: break;
    }
    const auto& c = node->name;
    try {
      if (c == "alpha") return derive_basic(pt).alpha;
      if (c == "lambda") return derive_basic(pt).lambda;
      if (c == "t") return t_of(pt);
      const auto d = derive_params(pt);
      if (c == "eps2") return d.eps2;
      if (c == "beta0") return d.beta0;
      if (c == "k") return d.k;
      if (c == "M") return d.M;
      return d.omega_star;
    } catch (const std::exception& ex) {
      throw EvalError("constant '" + c + "' undefined at " + pt.to_string() + ": " + ex.what());
    }
  };
  return evaluate_tree<NumericValue>(e, leaf, NumericOps{});
}

std::string to_string(const NumericValue& v) {
  if (std::holds_alternative<Rational>(v)) return std::get<Rational>(v).to_string();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", std::get<double>(v));
  return buf;
}

std::vector<ManifestLine> parse_manifest(std::string_view content) {
  std::vector<ManifestLine> out;
  std::size_t line_no = 0, start = 0;
  while (start <= content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    ++line_no;
    auto line = content.substr(start, end - start);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos) {
      const auto last = line.find_last_not_of(" \t\r");
      const auto text = line.substr(first, last - first + 1);
      try {
        out.push_back({line_no, std::string(text), parse_expr(text)});
      } catch (const ParseError& err) {
        throw ParseError(err.offset(), "line " + std::to_string(line_no) + ": " + err.message());
      }
    }
    if (end == content.size()) break;
    start = end + 1;
  }
  return out;
}

CheckReport check_manifest(const std::vector<ManifestLine>& lines, const SymbolicBinding& binding) {
  CheckReport report;
  const std::string suffix = binding.fixed_n > 0 ? "@n=" + std::to_string(binding.fixed_n) : "";
  for (const auto& l : lines) {
    char id[32];
    std::snprintf(id, sizeof id, "manifest.line%04zu", l.line);
    try {
      report.add(exact_zero_entry(id + suffix, l.text + " == 0", eval_symbolic(l.expr, binding)));
    } catch (const EvalError& err) {
      report.add({id + suffix, l.text + " == 0", CheckStatus::fail, err.what(), 0.0});
    }
  }
  return report;
}

}  // namespace plap
