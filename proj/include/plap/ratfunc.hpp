#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "plap/multipoly.hpp"
#include "plap/rational.hpp"

namespace plap {

/// Raised when an evaluation point hits a zero of the denominator.
class PoleError : public ArithmeticError {
 public:
  using ArithmeticError::ArithmeticError;
};

/// Canonical reduced ratio of polynomials: gcd(num, den) = 1 and den is monic under grlex.
class RationalFunction {
 public:
  RationalFunction() : RationalFunction(std::vector<std::string>{}) {}
  explicit RationalFunction(std::vector<std::string> vars);
  RationalFunction(std::vector<std::string> vars, const Rational& c);
  explicit RationalFunction(MultiPoly num);
  RationalFunction(MultiPoly num, MultiPoly den);

  static RationalFunction variable(const std::vector<std::string>& vars, const std::string& name);

  const MultiPoly& numerator() const { return num_; }
  const MultiPoly& denominator() const { return den_; }
  const std::vector<std::string>& variables() const { return num_.variables(); }

  /// True iff the canonical numerator is the zero polynomial.
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  Rational constant_value() const;

  RationalFunction extended(const std::vector<std::string>& vars) const;

  RationalFunction& operator+=(const RationalFunction& rhs);
  RationalFunction& operator-=(const RationalFunction& rhs);
  RationalFunction& operator*=(const RationalFunction& rhs);
  RationalFunction& operator/=(const RationalFunction& rhs);
  RationalFunction operator-() const;

  friend RationalFunction operator+(RationalFunction a, const RationalFunction& b) { return a += b; }
  friend RationalFunction operator-(RationalFunction a, const RationalFunction& b) { return a -= b; }
  friend RationalFunction operator*(RationalFunction a, const RationalFunction& b) { return a *= b; }
  friend RationalFunction operator/(RationalFunction a, const RationalFunction& b) { return a /= b; }
  friend RationalFunction operator+(RationalFunction a, const Rational& c);
  friend RationalFunction operator-(RationalFunction a, const Rational& c);
  friend RationalFunction operator*(RationalFunction a, const Rational& c);
  friend RationalFunction operator/(RationalFunction a, const Rational& c);
  friend RationalFunction operator+(const Rational& c, const RationalFunction& a) { return a + c; }
  friend RationalFunction operator-(const Rational& c, const RationalFunction& a) { return -a + c; }
  friend RationalFunction operator*(const Rational& c, const RationalFunction& a) { return a * c; }
  friend RationalFunction operator/(const Rational& c, const RationalFunction& a);

  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  /// Integer power; negative exponents require a nonzero base.
  RationalFunction pow(long e) const;

  /// Exact value at a full binding of the variables; PoleError on a vanishing denominator.
  Rational evaluate(const std::map<std::string, Rational>& point) const;

  /// Binds a subset of variables to rationals, keeping the variable list.
  RationalFunction partial_evaluate(const std::map<std::string, Rational>& point) const;

  std::string to_string() const;

 private:
  void canonicalize();

  MultiPoly num_;
  MultiPoly den_;
};

enum class RatFuncOp { add, sub, mul, div, pow_int };

/// pow_int reads its integer exponent from exponent (rhs is ignored).
RationalFunction ratfunc_arith(const RationalFunction& lhs, const RationalFunction& rhs, RatFuncOp op,
                               long exponent = 0);

/// Both operands extended to the merged variable list.
std::pair<RationalFunction, RationalFunction> unify(const RationalFunction& a, const RationalFunction& b);

/// Composition f|_{var := g}; both are first extended to the merged variable list.
RationalFunction substitute(const RationalFunction& f, const std::string& var, const RationalFunction& g);

/// Randomized zero test at `points` rational points avoiding denominator zeros.
/// Secondary oracle only: the canonical-form test is authoritative.
bool randomized_zero_test(const RationalFunction& f, int points = 32, std::uint64_t seed = 0x5eed'2024ULL);

}  // namespace plap
