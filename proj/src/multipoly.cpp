#include "plap/multipoly.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>

namespace plap {

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const {
  const auto da = std::accumulate(a.begin(), a.end(), 0u);
  const auto db = std::accumulate(b.begin(), b.end(), 0u);
  if (da != db) return da < db;
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

namespace {

int symbol_rank(const std::string& name) {
  static const std::vector<std::string> known{"n", "p", "q", "beta", "s"};
  auto it = std::find(known.begin(), known.end(), name);
  return it == known.end() ? static_cast<int>(known.size()) : static_cast<int>(it - known.begin());
}

}  // namespace

std::vector<std::string> merge_variables(const std::vector<std::string>& a,
                                         const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  for (const auto& v : b)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  std::stable_sort(out.begin(), out.end(), [](const std::string& x, const std::string& y) {
    const int rx = symbol_rank(x), ry = symbol_rank(y);
    if (rx != ry) return rx < ry;
    return x < y;
  });
  return out;
}

MultiPoly::MultiPoly(std::vector<std::string> vars, const Rational& c) : vars_(std::move(vars)) {
  if (!c.is_zero()) terms_.emplace(Monomial(vars_.size(), 0), c);
}

MultiPoly MultiPoly::variable(const std::vector<std::string>& vars, const std::string& name) {
  MultiPoly out(vars);
  const int idx = out.var_index(name);
  if (idx < 0) throw VariableMismatch("unknown variable '" + name + "'");
  Monomial m(vars.size(), 0);
  m[static_cast<std::size_t>(idx)] = 1;
  out.terms_.emplace(std::move(m), Rational(1));
  return out;
}

MultiPoly MultiPoly::monomial(const std::vector<std::string>& vars, Monomial exps, const Rational& c) {
  if (exps.size() != vars.size()) throw VariableMismatch("exponent vector length mismatch");
  MultiPoly out(vars);
  if (!c.is_zero()) out.terms_.emplace(std::move(exps), c);
  return out;
}

int MultiPoly::var_index(const std::string& name) const {
  auto it = std::find(vars_.begin(), vars_.end(), name);
  return it == vars_.end() ? -1 : static_cast<int>(it - vars_.begin());
}

bool MultiPoly::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() > 1) return false;
  const auto& m = terms_.begin()->first;
  return std::all_of(m.begin(), m.end(), [](auto e) { return e == 0; });
}

Rational MultiPoly::constant_value() const {
  if (!is_constant()) throw std::logic_error("polynomial is not constant");
  return terms_.empty() ? Rational(0) : terms_.begin()->second;
}

unsigned MultiPoly::total_degree() const {
  if (terms_.empty()) return 0;
  const auto& m = terms_.rbegin()->first;
  return std::accumulate(m.begin(), m.end(), 0u);
}

unsigned MultiPoly::degree_in(std::size_t var) const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
  return d;
}

std::vector<MultiPoly> MultiPoly::coefficients_in(std::size_t var) const {
  std::vector<MultiPoly> out(degree_in(var) + 1, MultiPoly(vars_));
  for (const auto& [m, c] : terms_) {
    Monomial reduced = m;
    const auto k = reduced[var];
    reduced[var] = 0;
    out[k].terms_.emplace(std::move(reduced), c);
  }
  return out;
}

MultiPoly MultiPoly::shifted(std::size_t var, unsigned power) const {
  if (power == 0) return *this;
  MultiPoly out(vars_);
  for (const auto& [m, c] : terms_) {
    Monomial s = m;
    s[var] += power;
    out.terms_.emplace(std::move(s), c);
  }
  return out;
}

MultiPoly MultiPoly::extended(const std::vector<std::string>& vars) const {
  std::vector<std::size_t> where(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    auto it = std::find(vars.begin(), vars.end(), vars_[i]);
    if (it == vars.end()) throw VariableMismatch("cannot extend: variable '" + vars_[i] + "' dropped");
    where[i] = static_cast<std::size_t>(it - vars.begin());
  }
  MultiPoly out(vars);
  for (const auto& [m, c] : terms_) {
    Monomial e(vars.size(), 0);
    for (std::size_t i = 0; i < m.size(); ++i) e[where[i]] = m[i];
    out.terms_.emplace(std::move(e), c);
  }
  return out;
}

MultiPoly MultiPoly::with_value(std::size_t var, const Rational& value) const {
  const unsigned d = degree_in(var);
  std::vector<Rational> powers{Rational(1)};
  for (unsigned k = 1; k <= d; ++k) powers.push_back(powers.back() * value);
  MultiPoly out(vars_);
  for (const auto& [m, c] : terms_) {
    Monomial r = m;
    r[var] = 0;
    out.add_term(r, c * powers[m[var]]);
  }
  return out;
}

void MultiPoly::require_same(const MultiPoly& rhs, const char* what) const {
  if (vars_ != rhs.vars_) throw VariableMismatch(std::string(what) + ": variable lists differ");
}

void MultiPoly::add_term(const Monomial& m, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& rhs) {
  require_same(rhs, "add");
  for (const auto& [m, c] : rhs.terms_) add_term(m, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& rhs) {
  require_same(rhs, "sub");
  for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& rhs) {
  *this = *this * rhs;
  return *this;
}

MultiPoly& MultiPoly::operator*=(const Rational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly out = *this;
  for (auto& [m, v] : out.terms_) v = -v;
  return out;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  a.require_same(b, "mul");
  MultiPoly out(a.vars_);
  if (a.is_zero() || b.is_zero()) return out;
  Monomial m(a.vars_.size());
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

MultiPoly MultiPoly::pow(unsigned e) const {
  MultiPoly result(vars_, Rational(1));
  MultiPoly base = *this;
  while (e > 0) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return result;
}

MultiPoly MultiPoly::derivative(std::size_t var) const {
  MultiPoly out(vars_);
  for (const auto& [m, c] : terms_) {
    if (m[var] == 0) continue;
    Monomial d = m;
    d[var] -= 1;
    out.add_term(d, c * Rational(static_cast<long>(m[var])));
  }
  return out;
}

MultiPoly MultiPoly::exact_divide(const MultiPoly& divisor) const {
  require_same(divisor, "divide");
  if (divisor.is_zero()) throw ArithmeticError("polynomial division by zero");
  MultiPoly quotient(vars_);
  MultiPoly rem = *this;
  const auto& [dm, dc] = divisor.leading_term();
  Monomial qm(vars_.size());
  while (!rem.is_zero()) {
    const auto& [rm, rc] = rem.leading_term();
    for (std::size_t i = 0; i < qm.size(); ++i) {
      if (rm[i] < dm[i]) throw std::domain_error("inexact polynomial division");
      qm[i] = rm[i] - dm[i];
    }
    const Rational qc = rc / dc;
    quotient.add_term(qm, qc);
    MultiPoly step = MultiPoly::monomial(vars_, qm, qc);
    rem -= step * divisor;
  }
  return quotient;
}

Rational MultiPoly::evaluate(const std::vector<Rational>& values) const {
  if (values.size() != vars_.size()) throw VariableMismatch("evaluate: wrong number of values");
  std::vector<std::vector<Rational>> powers(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    powers[i].push_back(Rational(1));
    const unsigned d = degree_in(i);
    for (unsigned k = 1; k <= d; ++k) powers[i].push_back(powers[i].back() * values[i]);
  }
  Rational sum;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i]) t *= powers[i][m[i]];
    sum += t;
  }
  return sum;
}

MultiPoly MultiPoly::integer_primitive() const {
  if (terms_.empty()) return *this;
  mpz_class den_lcm = 1, num_gcd = 0;
  for (const auto& [m, c] : terms_) {
    den_lcm = lcm(den_lcm, c.denominator());
    num_gcd = gcd(num_gcd, c.numerator());
  }
  Rational scale(den_lcm, num_gcd);
  if (leading_coefficient().sign() < 0) scale = -scale;
  MultiPoly out = *this;
  out *= scale;
  return out;
}

MultiPoly MultiPoly::monic() const {
  if (terms_.empty()) return *this;
  MultiPoly out = *this;
  out *= Rational(1) / leading_coefficient();
  return out;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    const bool unit_monomial = std::all_of(m.begin(), m.end(), [](auto e) { return e == 0; });
    Rational mag = c.abs();
    if (first) {
      if (c.sign() < 0) os << "-";
    } else {
      os << (c.sign() < 0 ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    if (unit_monomial || mag != Rational(1)) {
      os << mag;
      wrote = true;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i]) continue;
      if (wrote) os << "*";
      os << vars_[i];
      if (m[i] > 1) os << "^" << m[i];
      wrote = true;
    }
  }
  return os.str();
}

MultiPoly poly_combine(const MultiPoly& lhs, const MultiPoly& rhs, PolyOp op) {
  switch (op) {
    case PolyOp::add: return lhs + rhs;
    case PolyOp::sub: return lhs - rhs;
    case PolyOp::mul: return lhs * rhs;
  }
  throw std::logic_error("unknown PolyOp");
}

MultiPoly pseudo_remainder(const MultiPoly& a, const MultiPoly& b, std::size_t var) {
  const unsigned db = b.degree_in(var);
  const MultiPoly lb = b.coefficients_in(var).back();
  MultiPoly r = a;
  while (!r.is_zero()) {
    const unsigned dr = r.degree_in(var);
    if (dr < db) break;
    const MultiPoly lr = r.coefficients_in(var).back();
    r = r * lb - (lr * b).shifted(var, dr - db);
  }
  return r;
}

namespace {

MultiPoly content_in(const MultiPoly& a, std::size_t var) {
  MultiPoly g(a.variables());
  for (const auto& c : a.coefficients_in(var)) {
    if (c.is_zero()) continue;
    g = g.is_zero() ? c.integer_primitive() : poly_gcd(g, c);
    if (g.is_constant()) break;
  }
  return g;
}

MultiPoly primitive_part(const MultiPoly& a, std::size_t var) {
  if (a.is_zero()) return a;
  return a.exact_divide(content_in(a, var)).integer_primitive();
}

}  // namespace

namespace {

std::optional<MultiPoly> try_divide(const MultiPoly& a, const MultiPoly& d) {
  try {
    return a.exact_divide(d);
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

mpz_class max_norm(const MultiPoly& a) {
  mpz_class m = 0;
  for (const auto& [mono, c] : a.terms()) {
    mpz_class v = abs(c.numerator());
    if (v > m) m = v;
  }
  return m;
}

// Symmetric xi-adic reconstruction: the digits of each coefficient become powers of var.
MultiPoly xi_adic_lift(const MultiPoly& h, const mpz_class& xi, std::size_t var) {
  MultiPoly result(h.variables());
  MultiPoly rest = h;
  const mpz_class half = xi / 2;
  const Rational inv_xi(mpz_class(1), xi);
  for (unsigned power = 0; !rest.is_zero(); ++power) {
    MultiPoly digit(h.variables());
    for (const auto& [m, c] : rest.terms()) {
      mpz_class r;
      mpz_fdiv_r(r.get_mpz_t(), c.numerator().get_mpz_t(), xi.get_mpz_t());
      if (r > half) r -= xi;
      if (r != 0) digit.add_term(m, Rational(r, 1));
    }
    result += digit.shifted(var, power);
    rest -= digit;
    rest *= inv_xi;
  }
  return result;
}

constexpr int kHeuristicAttempts = 6;

// Heuristic GCD of integer-primitive polynomials (Char, Geddes & Gonnet). Every
// candidate is verified by trial division; nullopt means "no luck", not "coprime".
std::optional<MultiPoly> heuristic_gcd(const MultiPoly& a, const MultiPoly& b) {
  const MultiPoly one(a.variables(), Rational(1));
  if (a.is_constant() || b.is_constant()) return one;

  std::size_t var = a.nvars();
  for (std::size_t i = a.nvars(); i-- > 0;) {
    if (a.depends_on(i) || b.depends_on(i)) {
      var = i;
      break;
    }
  }

  const mpz_class na = max_norm(a), nb = max_norm(b);
  const mpz_class bound = 2 * std::min(na, nb) + 29;
  mpz_class sq;
  mpz_sqrt(sq.get_mpz_t(), bound.get_mpz_t());
  mpz_class xi = std::min(bound, mpz_class(99 * sq));
  const mpz_class lca = abs(a.leading_coefficient().numerator());
  const mpz_class lcb = abs(b.leading_coefficient().numerator());
  xi = std::max(xi, mpz_class(2 * std::min(mpz_class(na / lca), mpz_class(nb / lcb)) + 2));

  for (int attempt = 0; attempt < kHeuristicAttempts; ++attempt) {
    const Rational at(xi, 1);
    const MultiPoly fa = a.with_value(var, at), fb = b.with_value(var, at);
    if (!fa.is_zero() && !fb.is_zero()) {
      const MultiPoly fa_p = fa.integer_primitive(), fb_p = fb.integer_primitive();
      // integer content of the evaluations is part of the image of the gcd
      const Rational ca = fa.terms().begin()->second / fa_p.terms().begin()->second;
      const Rational cb = fb.terms().begin()->second / fb_p.terms().begin()->second;
      const mpz_class cint = gcd(ca.numerator(), cb.numerator());
      if (auto h_low = heuristic_gcd(fa_p, fb_p)) {
        const MultiPoly image = *h_low * Rational(cint, 1);
        MultiPoly h = xi_adic_lift(image, xi, var);
        if (!h.is_zero()) {
          h = h.integer_primitive();
          if (try_divide(a, h) && try_divide(b, h)) return h;
        }
        if (auto cof = try_divide(fa, image)) {
          const MultiPoly cf = xi_adic_lift(*cof, xi, var);
          if (!cf.is_zero()) {
            if (auto hh = try_divide(a, cf)) {
              const MultiPoly hp = hh->integer_primitive();
              if (try_divide(b, hp)) return hp;
            }
          }
        }
      }
    }
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), xi.get_mpz_t());
    mpz_sqrt(root.get_mpz_t(), root.get_mpz_t());
    xi = (73794 * xi * root) / 27011;
  }
  return std::nullopt;
}

MultiPoly prs_gcd(const MultiPoly& a, const MultiPoly& b);

}  // namespace

MultiPoly poly_gcd(const MultiPoly& a, const MultiPoly& b) {
  if (a.variables() != b.variables()) throw VariableMismatch("gcd: variable lists differ");
  if (a.is_zero()) return b.integer_primitive();
  if (b.is_zero()) return a.integer_primitive();
  if (a.is_constant() || b.is_constant()) return MultiPoly(a.variables(), Rational(1));
  const MultiPoly ap = a.integer_primitive(), bp = b.integer_primitive();
  if (ap == bp) return ap;
  if (auto h = heuristic_gcd(ap, bp)) return *h;
  return prs_gcd(ap, bp);
}

namespace {

// Recursive primitive PRS; slow but unconditional.
MultiPoly prs_gcd(const MultiPoly& a, const MultiPoly& b) {
  if (a.is_zero()) return b.integer_primitive();
  if (b.is_zero()) return a.integer_primitive();
  const MultiPoly one(a.variables(), Rational(1));
  if (a.is_constant() || b.is_constant()) return one;
  if (a == b) return a.integer_primitive();

  std::size_t var = a.nvars();
  for (std::size_t i = a.nvars(); i-- > 0;) {
    if (a.depends_on(i) || b.depends_on(i)) {
      var = i;
      break;
    }
  }
  if (!a.depends_on(var)) return poly_gcd(a, content_in(b, var));
  if (!b.depends_on(var)) return poly_gcd(content_in(a, var), b);

  const MultiPoly ca = content_in(a, var);
  const MultiPoly cb = content_in(b, var);
  const MultiPoly c = poly_gcd(ca, cb);
  MultiPoly pa = a.exact_divide(ca).integer_primitive();
  MultiPoly pb = b.exact_divide(cb).integer_primitive();
  if (pa.degree_in(var) < pb.degree_in(var)) std::swap(pa, pb);

  MultiPoly g = one;
  while (true) {
    MultiPoly r = pseudo_remainder(pa, pb, var);
    if (r.is_zero()) {
      g = pb;
      break;
    }
    if (!r.depends_on(var)) {
      g = one;
      break;
    }
    pa = std::move(pb);
    pb = primitive_part(r, var);
  }
  return (c * primitive_part(g, var)).integer_primitive();
}

}  // namespace

}  // namespace plap
