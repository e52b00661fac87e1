#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "plap/rational.hpp"

namespace plap {

/// Raised when two operands live over different variable lists.
class VariableMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Monomial = std::vector<std::uint32_t>;

/// Graded lexicographic order; later variables dominate ties (n < p < q < beta < s).
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Canonical order of known symbols; unknown names sort after these alphabetically.
std::vector<std::string> merge_variables(const std::vector<std::string>& a,
                                         const std::vector<std::string>& b);

/// Sparse multivariate polynomial over Q with an explicit ordered variable list.
class MultiPoly {
 public:
  using Terms = std::map<Monomial, Rational, GrlexLess>;

  MultiPoly() = default;
  explicit MultiPoly(std::vector<std::string> vars) : vars_(std::move(vars)) {}
  MultiPoly(std::vector<std::string> vars, const Rational& c);

  static MultiPoly variable(const std::vector<std::string>& vars, const std::string& name);
  static MultiPoly monomial(const std::vector<std::string>& vars, Monomial exps, const Rational& c);

  const std::vector<std::string>& variables() const { return vars_; }
  const Terms& terms() const { return terms_; }
  std::size_t nvars() const { return vars_.size(); }
  int var_index(const std::string& name) const;  ///< -1 when absent

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_value() const;  ///< requires is_constant()
  std::size_t size() const { return terms_.size(); }

  /// Largest term under grlex; requires !is_zero().
  const std::pair<const Monomial, Rational>& leading_term() const { return *terms_.rbegin(); }
  const Rational& leading_coefficient() const { return terms_.rbegin()->second; }
  unsigned total_degree() const;
  unsigned degree_in(std::size_t var) const;
  bool depends_on(std::size_t var) const { return degree_in(var) > 0; }

  /// Coefficients as a polynomial in var: result[k] multiplies var^k (same variable list).
  std::vector<MultiPoly> coefficients_in(std::size_t var) const;
  MultiPoly shifted(std::size_t var, unsigned power) const;

  MultiPoly extended(const std::vector<std::string>& vars) const;
  /// Binds one variable to a value; the variable list is unchanged.
  MultiPoly with_value(std::size_t var, const Rational& value) const;

  MultiPoly& operator+=(const MultiPoly& rhs);
  MultiPoly& operator-=(const MultiPoly& rhs);
  MultiPoly& operator*=(const MultiPoly& rhs);
  MultiPoly& operator*=(const Rational& c);
  MultiPoly operator-() const;
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(MultiPoly a, const Rational& c) { return a *= c; }
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

  MultiPoly pow(unsigned e) const;
  MultiPoly derivative(std::size_t var) const;

  /// Exact quotient; throws std::domain_error if divisor does not divide *this.
  MultiPoly exact_divide(const MultiPoly& divisor) const;

  Rational evaluate(const std::vector<Rational>& values) const;

  /// Scales to coprime integer coefficients with positive leading coefficient.
  MultiPoly integer_primitive() const;
  MultiPoly monic() const;

  std::string to_string() const;

  void add_term(const Monomial& m, const Rational& c);

 private:
  void require_same(const MultiPoly& rhs, const char* what) const;

  std::vector<std::string> vars_;
  Terms terms_;
};

enum class PolyOp { add, sub, mul };
MultiPoly poly_combine(const MultiPoly& lhs, const MultiPoly& rhs, PolyOp op);

/// Greatest common divisor up to a unit, returned as integer-primitive.
MultiPoly poly_gcd(const MultiPoly& a, const MultiPoly& b);

/// Pseudo-remainder of a by b viewed as univariate polynomials in var.
MultiPoly pseudo_remainder(const MultiPoly& a, const MultiPoly& b, std::size_t var);

}  // namespace plap
