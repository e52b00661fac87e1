#include "plap/quantities.hpp"

#include <cmath>
#include <sstream>

namespace plap {

void ParamPoint::validate() const {
  if (n < 3) throw InadmissibleParams("n >= 3 violated (n = " + std::to_string(n) + ")");
  if (!(p > Rational(1))) throw InadmissibleParams("p > 1 violated (p = " + p.to_string() + ")");
  if (!(p < Rational(n))) throw InadmissibleParams("p < n violated (p = " + p.to_string() + ", n = " + std::to_string(n) + ")");
  if (!(q > p - Rational(1))) throw InadmissibleParams("q > p-1 violated (q = " + q.to_string() + ")");
}

std::string ParamPoint::to_string() const {
  return "(n=" + std::to_string(n) + ", p=" + p.to_string() + ", q=" + q.to_string() + ")";
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::lambda_negative: return "lambda_negative";
    case Regime::lambda_zero: return "lambda_zero";
    case Regime::subcritical_window: return "subcritical_window";
    case Regime::sobolev_critical: return "sobolev_critical";
    case Regime::supercritical: return "supercritical";
  }
  return "unknown";
}

Rational lambda_zero_exponent(const ParamPoint& pt) {
  const Rational n(pt.n);
  return (n + Rational(1)) * (pt.p - Rational(1)) / (n + Rational(1) - pt.p);
}

Rational sobolev_exponent(const ParamPoint& pt) {
  const Rational n(pt.n);
  return (n * pt.p - n + pt.p) / (n - pt.p);
}

Regime classify_regime(const ParamPoint& pt) {
  pt.validate();
  const Rational lower = lambda_zero_exponent(pt);
  const Rational upper = sobolev_exponent(pt);
  if (pt.q < lower) return Regime::lambda_negative;
  if (pt.q == lower) return Regime::lambda_zero;
  if (pt.q < upper) return Regime::subcritical_window;
  if (pt.q == upper) return Regime::sobolev_critical;
  return Regime::supercritical;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& ExprBuilder::variables() {
  static const std::vector<std::string> vars{"n", "p", "q", "beta", "a", "e2"};
  return vars;
}

ExprBuilder ExprBuilder::symbolic() {
  const auto& v = variables();
  return ExprBuilder(RationalFunction::variable(v, "n"), RationalFunction::variable(v, "p"),
                     RationalFunction::variable(v, "q"));
}

ExprBuilder ExprBuilder::with_fixed_n(long n) {
  const auto& v = variables();
  return ExprBuilder(RationalFunction(v, Rational(n)), RationalFunction::variable(v, "p"),
                     RationalFunction::variable(v, "q"));
}

ExprBuilder ExprBuilder::at(const ParamPoint& pt) {
  const auto& v = variables();
  return ExprBuilder(RationalFunction(v, Rational(pt.n)), RationalFunction(v, pt.p), RationalFunction(v, pt.q));
}

RationalFunction ExprBuilder::gap() const { return q_ + Rational(1) - p_; }

RationalFunction ExprBuilder::alpha() const { return p_ / gap(); }

RationalFunction ExprBuilder::lambda() const {
  const auto al = alpha();
  return al * (n_ + Rational(1) - al * q_);
}

RationalFunction ExprBuilder::k(const RationalFunction& beta) const {
  return (beta + Rational(1)) * (p_ - Rational(1)) - beta * q_;
}

RationalFunction ExprBuilder::n2eps2() const {
  const auto lg = lambda() * gap();
  return (n_ - lg) * (n_ - Rational(1)) / lg;
}

RationalFunction ExprBuilder::eps2() const { return n2eps2() / (n_ * n_); }

RationalFunction ExprBuilder::weight_factor_closed() const { return lambda() * gap() / (n_ - Rational(1)); }

RationalFunction ExprBuilder::t_raw() const {
  const auto lam = lambda();
  const auto al2 = alpha().pow(2);
  return (q_ - lam * (p_ - Rational(1)) / al2 - lam * p_ / (n_ * al2)) * n_ / (n_ - lam * gap());
}

RationalFunction ExprBuilder::t() const { return (n_ + Rational(1)) / alpha(); }

RationalFunction ExprBuilder::g_A() const {
  const auto lam = lambda();
  const auto al = alpha();
  const auto al2 = al.pow(2);
  const auto pm1 = p_ - Rational(1);
  const auto nm1 = n_ - Rational(1);
  const auto tt = (n_ + Rational(1)) / al;
  const auto sum = lam * p_ / al2 + tt * lam * gap() / nm1;
  const auto square_term = -(Rational(1) / (Rational(4) * n_)) * sum.pow(2) * nm1.pow(2) / (lam * gap());
  return square_term + lam * pm1 * tt / al2 - pm1.pow(2) + q_ * pm1 - tt * pm1;
}

RationalFunction ExprBuilder::g_B() const {
  const auto pm1 = p_ - Rational(1);
  const auto tt = (n_ + Rational(1)) / alpha();
  return q_ * pm1 - tt * pm1 - lambda() * pm1 / alpha().pow(2) - Rational(2) * pm1.pow(2);
}

RationalFunction ExprBuilder::g_C() const { return -(p_ - Rational(1)).pow(2); }

RationalFunction ExprBuilder::beta0() const { return -g_B() / (Rational(2) * g_A()); }

RationalFunction ExprBuilder::g_at(const RationalFunction& beta) const {
  return g_A() * beta.pow(2) + g_B() * beta + g_C();
}

RationalFunction ExprBuilder::M(const RationalFunction& beta) const {
  const auto w = weight_factor_closed();
  return (beta * lambda() * p_ / alpha().pow(2) + t() * beta * w) / (Rational(2) * w);
}

RationalFunction ExprBuilder::D() const { return n_ - Rational(1) + e2(); }

RationalFunction ExprBuilder::master_K1() const {
  const auto b = beta(), aa = a();
  return -b * q_ + (-aa + aa * e2()) / D() + b * lambda() * (p_ - Rational(1)) / alpha().pow(2);
}

RationalFunction ExprBuilder::master_K2() const {
  return n_ * (n_ - Rational(1)) / D() + lambda() * (p_ - Rational(1) - q_);
}

RationalFunction ExprBuilder::master_K3() const {
  return beta() * lambda() * p_ / alpha().pow(2) + n_ * a() / D();
}

RationalFunction ExprBuilder::master_K4() const {
  const auto b = beta(), aa = a();
  const auto pm1 = p_ - Rational(1);
  return b * lambda() * pm1 * (aa - Rational(1)) / alpha().pow(2) - (k(b) + aa) * (b + Rational(1)) * pm1;
}

RationalFunction ExprBuilder::master_K5() const { return n_ / D(); }

RationalFunction ExprBuilder::crucial_C1() const { return master_K1() + master_K3() / n_; }

RationalFunction ExprBuilder::crucial_C2() const { return master_K2(); }

RationalFunction ExprBuilder::crucial_C4() const {
  const auto k3 = master_K3();
  return -(Rational(1) / Rational(4)) * k3.pow(2) * (D() / n_) * ((n_ - Rational(1)) / n_) + master_K4();
}

RationalFunction ExprBuilder::fix_parameters(const RationalFunction& f) const {
  return substitute(substitute(f, "e2", n2eps2()), "a", t() * beta());
}

// ---------------------------------------------------------------------------

namespace {

Rational constant_of(const RationalFunction& f) { return f.constant_value(); }

void require_gap(const ParamPoint& pt) {
  if ((pt.q + Rational(1) - pt.p).is_zero())
    throw DegenerateExponent("q + 1 - p = 0: alpha = p/(q+1-p) is undefined");
}

void require_positive_lambda(const ParamPoint& pt, const ExprBuilder& b, const char* what) {
  if (constant_of(b.lambda()).sign() <= 0)
    throw OutOfWindow(std::string(what) + " requires lambda > 0; " + pt.to_string() + " has lambda = " +
                      constant_of(b.lambda()).to_string());
}

}  // namespace

BasicParams derive_basic(const ParamPoint& pt) {
  require_gap(pt);
  pt.validate();
  const auto b = ExprBuilder::at(pt);
  return {constant_of(b.alpha()), constant_of(b.lambda()), b.k(b.beta())};
}

Eps2Result eps2_of(const ParamPoint& pt) {
  require_gap(pt);
  pt.validate();
  const auto b = ExprBuilder::at(pt);
  require_positive_lambda(pt, b, "eps^2");
  return {constant_of(b.eps2()), constant_of(b.weight_factor_closed())};
}

Rational t_of(const ParamPoint& pt) {
  require_gap(pt);
  pt.validate();
  return constant_of(ExprBuilder::at(pt).t());
}

QuadraticCoefficients g_quadratic(const ParamPoint& pt) {
  require_gap(pt);
  pt.validate();
  const auto b = ExprBuilder::at(pt);
  require_positive_lambda(pt, b, "g(beta)");
  return {constant_of(b.g_A()), constant_of(b.g_B()), constant_of(b.g_C())};
}

Rational beta0_of(const ParamPoint& pt) {
  const auto g = g_quadratic(pt);
  if (g.A.is_zero()) throw DegenerateQuadratic("leading coefficient of g vanishes at " + pt.to_string());
  return -g.B / (Rational(2) * g.A);
}

Rational M_of(const ParamPoint& pt, const Rational& beta) {
  require_gap(pt);
  pt.validate();
  const auto b = ExprBuilder::at(pt);
  require_positive_lambda(pt, b, "M");
  return constant_of(b.M(b.cst(beta)));
}

double omega_star(const ParamPoint& pt) {
  require_gap(pt);
  pt.validate();
  const auto b = ExprBuilder::at(pt);
  const Rational lam = constant_of(b.lambda());
  if (lam.sign() <= 0)
    throw OutOfWindow("no positive constant solution: lambda = " + lam.to_string() + " at " + pt.to_string());
  const long double alpha = constant_of(b.alpha()).to_double();
  const long double gap = (pt.q + Rational(1) - pt.p).to_double();
  const long double base = static_cast<long double>(lam.to_double()) *
                           std::pow(alpha, static_cast<long double>((pt.p - Rational(2)).to_double()));
  return static_cast<double>(std::pow(base, 1.0L / gap));
}

DerivedParams derive_params(const ParamPoint& pt) {
  require_gap(pt);
  const Regime regime = classify_regime(pt);
  if (regime != Regime::subcritical_window)
    throw OutOfWindow(pt.to_string() + " is not in the subcritical window (regime " +
                      std::string(to_string(regime)) + ")");
  const auto b = ExprBuilder::at(pt);
  DerivedParams d;
  d.alpha = constant_of(b.alpha());
  d.lambda = constant_of(b.lambda());
  d.eps2 = constant_of(b.eps2());
  d.t = constant_of(b.t());
  d.g = g_quadratic(pt);
  d.beta0 = beta0_of(pt);
  d.a = d.t * d.beta0;
  d.k = constant_of(b.k(b.cst(d.beta0)));
  d.M = constant_of(b.M(b.cst(d.beta0)));
  d.omega_star = omega_star(pt);
  d.regime = regime;
  return d;
}

// ---------------------------------------------------------------------------

ParamPoint sample_window_point(std::mt19937_64& rng, const WindowSampler& region) {
  std::uniform_int_distribution<long> ndist(region.n_min, region.n_max);
  const long den = region.denominator;
  const Rational margin(mpz_class(1), mpz_class(64));
  for (;;) {
    ParamPoint pt;
    pt.n = ndist(rng);
    // p in (1 + 1/8, n - 1/8) on the 1/den lattice
    const long lo = den + den / 8 + 1, hi = pt.n * den - den / 8 - 1;
    std::uniform_int_distribution<long> pdist(lo, hi);
    pt.p = Rational(mpz_class(pdist(rng)), mpz_class(den));
    const Rational qlo = lambda_zero_exponent(pt) + margin;
    const Rational qhi = sobolev_exponent(pt) - margin;
    if (!(qlo < qhi)) continue;
    // lattice points j/den with qlo < j/den < qhi
    mpz_class jlo, jhi;
    const mpz_class lo_scaled = (qlo * Rational(den)).numerator();
    const mpz_class lo_den = (qlo * Rational(den)).denominator();
    mpz_fdiv_q(jlo.get_mpz_t(), lo_scaled.get_mpz_t(), lo_den.get_mpz_t());
    jlo += 1;
    const mpz_class hi_scaled = (qhi * Rational(den)).numerator();
    const mpz_class hi_den = (qhi * Rational(den)).denominator();
    mpz_cdiv_q(jhi.get_mpz_t(), hi_scaled.get_mpz_t(), hi_den.get_mpz_t());
    jhi -= 1;
    if (jhi < jlo) continue;
    const mpz_class span = jhi - jlo + 1;
    std::uniform_int_distribution<unsigned long> jdist(0, span.get_ui() - 1);
    pt.q = Rational(mpz_class(jlo + jdist(rng)), mpz_class(den));
    return pt;
  }
}

namespace {

std::string tagged(const std::string& id, const std::string& suffix) { return suffix.empty() ? id : id + "@" + suffix; }

}  // namespace

CheckReport check_window_margin(const ExprBuilder& b, const std::string& suffix) {
  CheckReport r;
  const auto& n = b.n();
  const auto& p = b.p();
  const auto& q = b.q();
  const auto lam = b.lambda();
  const auto gap = b.gap();
  const auto one = b.cst(1);

  r.add(exact_zero_entry(tagged("window.margin_factorization", suffix),
                         "n - lambda(q+1-p) = (p-1)/(q+1-p) [1 - (q+1-p)(n+1) + (p+1)q]",
                         n - lam * gap - (p - one) / gap * (one - gap * (n + one) + (p + one) * q)));

  r.add(exact_zero_entry(tagged("window.margin_reduction", suffix),
                         "(q+1-p)(n + lambda(p-1-q)) = (1-p)[(n-p)q - (np+p-n)]: positivity <=> subcritical q",
                         gap * (n + lam * (p - one - q)) - (one - p) * ((n - p) * q - (n * p + p - n))));

  const auto margin = n + lam * (p - one - q);
  const auto critical_q = (n * p - n + p) / (n - p);
  r.add(exact_zero_entry(tagged("window.margin_critical_edge", suffix),
                         "n + lambda(p-1-q) vanishes at the Sobolev critical exponent", substitute(margin, "q", critical_q)));
  return r;
}

CheckReport check_t_identity(const ExprBuilder& b, const std::string& suffix) {
  CheckReport r;
  const auto& n = b.n();
  const auto& p = b.p();
  const auto& q = b.q();
  const auto one = b.cst(1);
  const auto lam = b.lambda();
  const auto al = b.alpha();
  const auto al2 = al.pow(2);
  const auto gap = b.gap();

  r.add(exact_zero_entry(tagged("t.closed_form", suffix), "t from the vanishing first coefficient equals (n+1)/alpha",
                         b.t_raw() - b.t()));

  const auto lhs = n * (q - lam * (p - one) / al2 - lam * p / (n * al2));
  const auto rhs = (n + one) / al * (p - one) / gap * (q + one - (n + one) * gap + p * q);
  r.add(exact_zero_entry(tagged("t.numerator_simplification", suffix),
                         "n(q - lambda(p-1)/alpha^2 - lambda p/(n alpha^2)) = (n+1)/alpha (p-1)/(q+1-p) [q+1-(n+1)(q+1-p)+pq]",
                         lhs - rhs));

  const auto defining = lam * p / (n * al2) - q + b.t() * b.e2() / b.D() + lam * (p - one) / al2;
  r.add(exact_zero_entry(tagged("t.defining_equation", suffix),
                         "lambda p/(n alpha^2) - q + t n^2eps^2/(n-1+n^2eps^2) + lambda(p-1)/alpha^2 = 0",
                         substitute(defining, "e2", b.n2eps2())));
  return r;
}

CheckReport check_discriminant(const ExprBuilder& b, const std::string& suffix) {
  CheckReport r;
  const auto& n = b.n();
  const auto& p = b.p();
  const auto& q = b.q();
  const auto one = b.cst(1);
  const auto lam = b.lambda();
  const auto al = b.alpha();
  const auto al2 = al.pow(2);
  const auto gap = b.gap();
  const auto pm1 = p - one;
  const auto np1 = n + one;
  const auto nm1 = n - one;
  const auto A = b.g_A(), B = b.g_B(), C = b.g_C();

  r.add(exact_zero_entry(tagged("g.expansion", suffix),
                         "quartic coefficient after eps, a = t beta substitution equals A beta^2 + B beta + C",
                         b.fix_parameters(b.crucial_C4()) - b.g_at(b.beta())));

  r.add(exact_zero_entry(tagged("g.linear_coefficient_form", suffix),
                         "B = (p-1)[-lambda/alpha^2 - 2(p-1) + q - (n+1)/alpha]",
                         B - pm1 * (-lam / al2 - Rational(2) * pm1 + q - np1 / al)));

  r.add(exact_zero_entry(tagged("g.discriminant", suffix), "discriminant B^2 - 4AC of g(beta) vanishes identically",
                         B * B - Rational(4) * A * C));

  r.add(exact_zero_entry(tagged("g.step_linear", suffix),
                         "-lambda/alpha^2 - 2(p-1) + q - (n+1)/alpha = 2(p-n-1)(q+1-p)/p",
                         -lam / al2 - Rational(2) * pm1 + q - np1 / al - Rational(2) * (p - n - one) * gap / p));

  const auto weight_sum = lam * p / al2 + np1 / al * lam * gap / nm1;
  const auto n1aq = np1 - al * q;
  r.add(exact_zero_entry(tagged("g.step_weight_sum", suffix),
                         "lambda p/alpha^2 + (n+1)/alpha lambda(q+1-p)/(n-1) = (n+1-alpha q)(q+1-p) 2n/(n-1)",
                         weight_sum - n1aq * gap * Rational(2) * n / nm1));

  r.add(exact_zero_entry(tagged("g.step_square", suffix),
                         "-(1/4n)(...)^2 (n-1)^2/(lambda(q+1-p)) = -n(n+1-alpha q)(q+1-p)^2/p",
                         -(one / (Rational(4) * n)) * weight_sum.pow(2) * nm1.pow(2) / (lam * gap) +
                             n * n1aq * gap.pow(2) / p));

  r.add(exact_zero_entry(tagged("g.step_cubic", suffix),
                         "lambda(p-1)(n+1)/alpha^3 = (n+1-alpha q)(p-1)(n+1)(q+1-p)^2/p^2",
                         lam * pm1 * np1 / al.pow(3) - n1aq * pm1 * np1 * gap.pow(2) / p.pow(2)));

  r.add(exact_zero_entry(tagged("g.step_alpha", suffix), "-(n+1)(p-1)/alpha = -(n+1)(p-1)(q+1-p)/p",
                         -np1 * pm1 / al + np1 * pm1 * gap / p));

  r.add(exact_zero_entry(tagged("g.reduced_form", suffix), "discriminant after term-by-term simplification",
                         (p - n - one).pow(2) * gap.pow(2) / p.pow(2) - n * n1aq * gap.pow(2) / p +
                             n1aq * pm1 * np1 * gap.pow(2) / p.pow(2) - np1 * pm1 * gap / p + gap * pm1));

  const auto expanded = (p - n - one).pow(2) * gap - p * n * gap * np1 + p.pow(2) * n * gap + p.pow(2) * n * pm1 +
                        np1 * pm1 * np1 * gap - np1 * pm1 * p * gap + np1 * pm1 * p * (one - p) -
                        p * pm1 * np1 + p.pow(2) * pm1;
  r.add(exact_zero_entry(tagged("g.expanded_polynomial", suffix),
                         "discriminant multiplied by p^2/(q+1-p), expanded polynomial form", expanded));

  // the factored bracket, with the sign of the last product as it follows from the expanded form
  const auto bracket = (p - one - n).pow(2) - p * n * np1 + p.pow(2) * n + np1.pow(2) * pm1 - np1 * pm1 * p;
  r.add(exact_zero_entry(tagged("g.final_bracket", suffix),
                         "(q+1-p)[(p-1-n)^2 - pn(n+1) + p^2 n + (n+1)^2(p-1) - (n+1)(p-1)p] = 0", gap * bracket));

  r.add(exact_zero_entry(tagged("g.leading_coefficient", suffix),
                         "A = -(n+1-p)^2 (q+1-p)^2/p^2, strictly negative on the window: the double root is unique",
                         A * p.pow(2) + (np1 - p).pow(2) * gap.pow(2)));

  r.add(exact_zero_entry(tagged("g.root", suffix), "g(beta0) = 0 for beta0 = -B/(2A)", b.g_at(b.beta0())));
  return r;
}

CheckReport check_coefficients(const ExprBuilder& b, const std::string& suffix) {
  CheckReport r;
  const auto& n = b.n();
  const auto& p = b.p();
  const auto& q = b.q();
  const auto one = b.cst(1);
  const auto lam = b.lambda();
  const auto al2 = b.alpha().pow(2);
  const auto beta = b.beta();
  const auto aa = b.a();

  r.add(exact_zero_entry(tagged("identity.first_coefficient_assembly", suffix),
                         "div-X coefficient: -(beta+1)(p-1) + (k+a) - na/D + beta lambda (p-1)/alpha^2",
                         b.master_K1() - (-(beta + one) * (p - one) + b.k(beta) + aa - n * aa / b.D() +
                                          beta * lam * (p - one) / al2)));

  r.add(exact_zero_entry(tagged("identity.lambda_coefficient_assembly", suffix),
                         "beta^-1 lambda (k+a) - beta^-1 lambda (a+p-1) = lambda(p-1-q)",
                         lam * (b.k(beta) + aa) / beta - lam * (aa + p - one) / beta - lam * (p - one - q)));

  const auto Mfree = b.master_K3() / (Rational(2) * b.master_K5());
  r.add(exact_zero_entry(tagged("identity.square_completion", suffix),
                         "quartic coefficient = K4 - M^2 n/D (n-1)/n after completing (F+ML).(F+ML)",
                         b.crucial_C4() - (b.master_K4() - Mfree.pow(2) * b.master_K5() * (n - one) / n)));

  r.add(exact_zero_entry(tagged("identity.first_coefficient_vanishes", suffix),
                         "first bracket of the crucial identity vanishes for every beta once eps and a = t beta are fixed",
                         b.fix_parameters(b.crucial_C1())));

  r.add(exact_zero_entry(tagged("identity.gradient_coefficient_vanishes", suffix),
                         "n(n-1)/(n-1+n^2eps^2) + lambda(p-1-q) = 0 for the chosen eps",
                         b.fix_parameters(b.crucial_C2())));

  r.add(exact_zero_entry(tagged("identity.quartic_coefficient_vanishes", suffix),
                         "quartic bracket of the crucial identity vanishes at beta = beta0",
                         substitute(b.fix_parameters(b.crucial_C4()), "beta", b.beta0())));

  r.add(exact_zero_entry(tagged("identity.surviving_factor", suffix),
                         "n/(n-1+n^2eps^2) = lambda(q+1-p)/(n-1)", b.fix_parameters(b.master_K5()) - b.weight_factor_closed()));

  r.add(exact_zero_entry(tagged("identity.M_closed_form", suffix), "M = K3/(2 n/D) with eps and a = t beta fixed",
                         b.fix_parameters(Mfree) - b.M(beta)));
  return r;
}

CheckReport check_sampled_positivity(const CertificationOptions& options) {
  CheckReport r;
  std::mt19937_64 rng(options.sampler.seed);
  int margin_bad = 0, factor_bad = 0, eps_bad = 0;
  std::string margin_witness, factor_witness, eps_witness;
  for (int i = 0; i < options.positivity_samples; ++i) {
    const ParamPoint pt = sample_window_point(rng, options.sampler);
    const auto b = ExprBuilder::at(pt);
    const Rational lam = b.lambda().constant_value();
    const Rational margin = Rational(pt.n) + lam * (pt.p - Rational(1) - pt.q);
    if (margin.sign() <= 0 && margin_bad++ == 0) margin_witness = pt.to_string();
    if (b.weight_factor_closed().constant_value().sign() <= 0 && factor_bad++ == 0) factor_witness = pt.to_string();
    if (b.eps2().constant_value().sign() <= 0 && eps_bad++ == 0) eps_witness = pt.to_string();
  }
  const std::string count = std::to_string(options.positivity_samples) + " window points";
  auto entry = [&](std::string id, std::string ref, int bad, const std::string& witness) {
    CheckEntry e{std::move(id), std::move(ref), bad == 0 ? CheckStatus::pass : CheckStatus::fail, {}, 0.0};
    e.witness = bad == 0 ? "positive at " + count : std::to_string(bad) + " violations, first at " + witness;
    r.add(std::move(e));
  };
  entry("window.margin_positive_sampled", "n + lambda(p-1-q) > 0 inside the window", margin_bad, margin_witness);
  entry("identity.surviving_factor_positive_sampled", "lambda(q+1-p)/(n-1) > 0 inside the window", factor_bad,
        factor_witness);
  entry("eps.square_positive_sampled", "eps^2 > 0 inside the window", eps_bad, eps_witness);
  return r;
}

CheckReport run_certification(const CertificationOptions& options) {
  CheckReport report;
  auto run_all = [&](const ExprBuilder& b, const std::string& suffix) {
    report.merge(check_window_margin(b, suffix));
    report.merge(check_t_identity(b, suffix));
    report.merge(check_discriminant(b, suffix));
    report.merge(check_coefficients(b, suffix));
  };
  if (options.symbolic_n) {
    run_all(ExprBuilder::symbolic(), "");
  } else {
    for (long n : options.fixed_n) run_all(ExprBuilder::with_fixed_n(n), "n=" + std::to_string(n));
  }
  report.merge(check_sampled_positivity(options));
  return report;
}

}  // namespace plap
