#include "plap/ratfunc.hpp"

#include <random>

namespace plap {

RationalFunction::RationalFunction(std::vector<std::string> vars)
    : num_(vars), den_(vars, Rational(1)) {}

RationalFunction::RationalFunction(std::vector<std::string> vars, const Rational& c)
    : num_(vars, c), den_(vars, Rational(1)) {}

RationalFunction::RationalFunction(MultiPoly num)
    : num_(std::move(num)), den_(num_.variables(), Rational(1)) {}

RationalFunction::RationalFunction(MultiPoly num, MultiPoly den) : num_(std::move(num)), den_(std::move(den)) {
  if (num_.variables() != den_.variables()) throw VariableMismatch("numerator/denominator variable lists differ");
  if (den_.is_zero()) throw ArithmeticError("rational function with zero denominator");
  canonicalize();
}

RationalFunction RationalFunction::variable(const std::vector<std::string>& vars, const std::string& name) {
  return RationalFunction(MultiPoly::variable(vars, name));
}

void RationalFunction::canonicalize() {
  if (num_.is_zero()) {
    den_ = MultiPoly(num_.variables(), Rational(1));
    return;
  }
  if (!den_.is_constant()) {
    const MultiPoly g = poly_gcd(num_, den_);
    if (!g.is_constant()) {
      num_ = num_.exact_divide(g);
      den_ = den_.exact_divide(g);
    }
  }
  const Rational lc = den_.leading_coefficient();
  if (lc != Rational(1)) {
    const Rational inv = Rational(1) / lc;
    num_ *= inv;
    den_ *= inv;
  }
}

Rational RationalFunction::constant_value() const {
  if (!is_constant()) throw std::logic_error("rational function is not constant");
  return num_.constant_value() / den_.constant_value();
}

RationalFunction RationalFunction::extended(const std::vector<std::string>& vars) const {
  RationalFunction out(vars);
  out.num_ = num_.extended(vars);
  out.den_ = den_.extended(vars);
  return out;
}

RationalFunction& RationalFunction::operator+=(const RationalFunction& rhs) {
  if (rhs.is_zero()) {
    if (variables() != rhs.variables()) throw VariableMismatch("add: variable lists differ");
    return *this;
  }
  if (den_ == rhs.den_) {
    num_ += rhs.num_;
  } else {
    num_ = num_ * rhs.den_ + rhs.num_ * den_;
    den_ = den_ * rhs.den_;
  }
  canonicalize();
  return *this;
}

RationalFunction& RationalFunction::operator-=(const RationalFunction& rhs) { return *this += -rhs; }

RationalFunction& RationalFunction::operator*=(const RationalFunction& rhs) {
  if (variables() != rhs.variables()) throw VariableMismatch("mul: variable lists differ");
  // cross-cancel before multiplying to keep intermediate sizes small
  const MultiPoly g1 = poly_gcd(num_, rhs.den_);
  const MultiPoly g2 = poly_gcd(rhs.num_, den_);
  MultiPoly n1 = num_.exact_divide(g1), d2 = rhs.den_.exact_divide(g1);
  MultiPoly n2 = rhs.num_.exact_divide(g2), d1 = den_.exact_divide(g2);
  num_ = n1 * n2;
  den_ = d1 * d2;
  canonicalize();
  return *this;
}

RationalFunction& RationalFunction::operator/=(const RationalFunction& rhs) {
  if (rhs.is_zero()) throw ArithmeticError("division by the zero rational function");
  RationalFunction inv(rhs.variables());
  inv.num_ = rhs.den_;
  inv.den_ = rhs.num_;
  inv.canonicalize();
  return *this *= inv;
}

RationalFunction RationalFunction::operator-() const {
  RationalFunction out = *this;
  out.num_ = -out.num_;
  return out;
}

RationalFunction operator+(RationalFunction a, const Rational& c) {
  a.num_ += a.den_ * c;
  a.canonicalize();
  return a;
}

RationalFunction operator-(RationalFunction a, const Rational& c) { return std::move(a) + (-c); }

RationalFunction operator*(RationalFunction a, const Rational& c) {
  a.num_ *= c;
  a.canonicalize();
  return a;
}

RationalFunction operator/(RationalFunction a, const Rational& c) {
  if (c.is_zero()) throw ArithmeticError("division by zero");
  return std::move(a) * (Rational(1) / c);
}

RationalFunction operator/(const Rational& c, const RationalFunction& a) {
  return RationalFunction(a.variables(), c) / a;
}

RationalFunction RationalFunction::pow(long e) const {
  if (e < 0) {
    if (is_zero()) throw ArithmeticError("zero rational function raised to a negative power");
    RationalFunction inv(variables());
    inv.num_ = den_;
    inv.den_ = num_;
    inv.canonicalize();
    return inv.pow(-e);
  }
  // coprime inputs stay coprime under powers; only the sign/scale needs fixing
  RationalFunction out(variables());
  out.num_ = num_.pow(static_cast<unsigned>(e));
  out.den_ = den_.pow(static_cast<unsigned>(e));
  out.canonicalize();
  return out;
}

Rational RationalFunction::evaluate(const std::map<std::string, Rational>& point) const {
  std::vector<Rational> values;
  values.reserve(variables().size());
  for (const auto& v : variables()) {
    auto it = point.find(v);
    if (it == point.end()) throw std::invalid_argument("evaluate: variable '" + v + "' unbound");
    values.push_back(it->second);
  }
  const Rational d = den_.evaluate(values);
  if (d.is_zero()) throw PoleError("denominator vanishes at evaluation point");
  return num_.evaluate(values) / d;
}

RationalFunction RationalFunction::partial_evaluate(const std::map<std::string, Rational>& point) const {
  RationalFunction out = *this;
  for (const auto& [name, value] : point) {
    if (out.num_.var_index(name) < 0) continue;
    out = substitute(out, name, RationalFunction(variables(), value));
  }
  return out;
}

std::string RationalFunction::to_string() const {
  if (den_.is_constant()) {
    if (den_.constant_value() == Rational(1)) return num_.to_string();
  }
  return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
}

RationalFunction ratfunc_arith(const RationalFunction& lhs, const RationalFunction& rhs, RatFuncOp op,
                               long exponent) {
  switch (op) {
    case RatFuncOp::add: return lhs + rhs;
    case RatFuncOp::sub: return lhs - rhs;
    case RatFuncOp::mul: return lhs * rhs;
    case RatFuncOp::div: return lhs / rhs;
    case RatFuncOp::pow_int: return lhs.pow(exponent);
  }
  throw std::logic_error("unknown RatFuncOp");
}

std::pair<RationalFunction, RationalFunction> unify(const RationalFunction& a, const RationalFunction& b) {
  if (a.variables() == b.variables()) return {a, b};
  const auto vars = merge_variables(a.variables(), b.variables());
  return {a.extended(vars), b.extended(vars)};
}

namespace {

// Sum_k c_k * gn^k * gd^(K-k) for the coefficients of poly in var.
MultiPoly homogenized_compose(const MultiPoly& poly, std::size_t var, const std::vector<MultiPoly>& gn_pows,
                              const std::vector<MultiPoly>& gd_pows, unsigned K) {
  const auto coeffs = poly.coefficients_in(var);
  MultiPoly acc(poly.variables());
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k].is_zero()) continue;
    acc += coeffs[k] * gn_pows[k] * gd_pows[K - k];
  }
  return acc;
}

}  // namespace

RationalFunction substitute(const RationalFunction& f, const std::string& var, const RationalFunction& g) {
  auto [fe, ge] = unify(f, g);
  const int idx = fe.numerator().var_index(var);
  if (idx < 0) {
    const auto vars = merge_variables(fe.variables(), {var});
    return fe.extended(vars);
  }
  const auto vi = static_cast<std::size_t>(idx);
  const unsigned K = std::max(fe.numerator().degree_in(vi), fe.denominator().degree_in(vi));
  if (K == 0) return fe;
  std::vector<MultiPoly> gn_pows{MultiPoly(fe.variables(), Rational(1))};
  std::vector<MultiPoly> gd_pows{MultiPoly(fe.variables(), Rational(1))};
  for (unsigned k = 1; k <= K; ++k) {
    gn_pows.push_back(gn_pows.back() * ge.numerator());
    gd_pows.push_back(gd_pows.back() * ge.denominator());
  }
  MultiPoly num = homogenized_compose(fe.numerator(), vi, gn_pows, gd_pows, K);
  MultiPoly den = homogenized_compose(fe.denominator(), vi, gn_pows, gd_pows, K);
  if (den.is_zero()) throw ArithmeticError("substitution of '" + var + "' makes the denominator vanish");
  return RationalFunction(std::move(num), std::move(den));
}

bool randomized_zero_test(const RationalFunction& f, int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> num_dist(-97, 97);
  std::uniform_int_distribution<long> den_dist(1, 61);
  const auto& vars = f.variables();
  int accepted = 0;
  for (int attempt = 0; accepted < points && attempt < points * 50; ++attempt) {
    std::map<std::string, Rational> pt;
    for (const auto& v : vars) pt[v] = Rational(mpz_class(num_dist(rng)), mpz_class(den_dist(rng)));
    Rational value;
    try {
      value = f.evaluate(pt);
    } catch (const PoleError&) {
      continue;
    }
    if (!value.is_zero()) return false;
    ++accepted;
  }
  return accepted == points;
}

}  // namespace plap
