#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "plap/quantities.hpp"
#include "plap/ratfunc.hpp"
#include "plap/report.hpp"

namespace plap {

/// Syntax error at a byte offset of the input.
class ParseError : public std::invalid_argument {
 public:
  ParseError(std::size_t offset, const std::string& message);
  std::size_t offset() const { return offset_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t offset_;
  std::string message_;
};

/// Evaluation failure; names the offending constant when one is involved.
class EvalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class NodeKind { number, variable, constant, add, sub, mul, div, pow, neg, group };

/// Immutable expression tree. Names are resolved at evaluation time, so named
/// constants always follow the current closed forms.
struct ExprNode {
  NodeKind kind;
  Rational number;      ///< number
  std::string name;     ///< variable or constant
  long exponent = 0;    ///< pow: folded value of rhs
  std::shared_ptr<const ExprNode> lhs, rhs;  ///< neg and group use lhs only
  std::size_t offset = 0;
};
using Expr = std::shared_ptr<const ExprNode>;

/// Grammar (docs/expr-grammar.md):
///   expr  = term { ("+" | "-") term }
///   term  = unary { ("*" | "/") unary }
///   unary = "-" unary | power
///   power = atom [ "^" exponent ]
///   exponent = ["-"] INTEGER [ "^" exponent ] | "(" exponent ")"
///   atom  = NUMBER | NAME | "(" expr ")"
Expr parse_expr(std::string_view text);

/// Fully parenthesized only where the source had groups; print(parse(print(e))) == print(e).
std::string print_expr(const Expr& e);

const std::vector<std::string>& expr_variables();  ///< n, p, q
const std::vector<std::string>& expr_constants();  ///< alpha, lambda, eps2, t, beta0, M, k, omega_star

struct SymbolicBinding {
  /// k and M take beta as an indeterminate instead of beta0.
  bool beta_symbolic = false;
  /// Fixed sphere dimension; 0 keeps n symbolic.
  long fixed_n = 0;
};

/// Exact rational function over ExprBuilder::variables(); omega_star is rejected.
RationalFunction eval_symbolic(const Expr& e, const SymbolicBinding& binding = {});

using NumericValue = std::variant<Rational, double>;

/// Exact at a point unless omega_star appears, in which case the result is a double.
NumericValue eval_numeric(const Expr& e, const ParamPoint& pt);
std::string to_string(const NumericValue& v);

struct ManifestLine {
  std::size_t line = 0;
  std::string text;
  Expr expr;
};

/// One expression per line, each asserted identically zero; "#" starts a comment.
/// ParseError messages are prefixed with the line number.
std::vector<ManifestLine> parse_manifest(std::string_view content);

/// One exact-zero entry per manifest line, id "manifest.lineNNNN", suffixed "@n=K" in fixed-n mode.
CheckReport check_manifest(const std::vector<ManifestLine>& lines, const SymbolicBinding& binding = {});

}  // namespace plap
