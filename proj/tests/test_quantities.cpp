#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "plap/quantities.hpp"

using namespace plap;

namespace {

Rational R(long a, long b = 1) { return Rational(mpz_class(a), mpz_class(b)); }

ParamPoint P(long n, Rational p, Rational q) {
  ParamPoint pt;
  pt.n = n;
  pt.p = p;
  pt.q = q;
  return pt;
}

// Oracle: straight-line arithmetic on mpq, independent of ExprBuilder.
struct Oracle {
  mpq_class alpha, lambda, eps2, t, A, B, C, beta0;
  explicit Oracle(long n_, const Rational& p_, const Rational& q_) {
    const mpq_class n(n_), p = p_.raw(), q = q_.raw();
    const mpq_class gap = q + 1 - p;
    alpha = p / gap;
    lambda = alpha * (n + 1 - alpha * q);
    eps2 = (n - lambda * gap) * (n - 1) / (lambda * gap) / (n * n);
    t = (n + 1) / alpha;
    A = -(n + 1 - p) * (n + 1 - p) * gap * gap / (p * p);
    B = q * (p - 1) - t * (p - 1) - lambda * (p - 1) / (alpha * alpha) - 2 * (p - 1) * (p - 1);
    C = -(p - 1) * (p - 1);
    beta0 = -p * (p - 1) / ((n + 1 - p) * gap);
  }
};

}  // namespace

TEST_CASE("frozen values at (3, 2, 4)") {
  const auto d = derive_params(P(3, R(2), R(4)));
  CHECK(d.alpha == R(2, 3));
  CHECK(d.lambda == R(8, 9));
  CHECK(d.eps2 == R(1, 36));
  CHECK(d.t == R(6));
  CHECK(d.g.A == R(-9));
  CHECK(d.g.B == R(-6));
  CHECK(d.g.C == R(-1));
  CHECK(d.beta0 == R(-1, 3));
  CHECK(d.a == R(-2));
  CHECK(d.k == R(2));
  CHECK(d.M == R(-3, 2));
  CHECK(M_of(P(3, R(2), R(4)), R(1)) == R(9, 2));
  CHECK(d.omega_star == doctest::Approx(std::cbrt(8.0 / 9.0)).epsilon(1e-12));
  CHECK(d.regime == Regime::subcritical_window);
}

TEST_CASE("frozen values at (3, 5/2, 6)") {
  const ParamPoint pt = P(3, R(5, 2), R(6));
  const auto b = derive_basic(pt);
  CHECK(b.alpha == R(5, 9));
  CHECK(b.lambda == R(10, 27));
  CHECK(lambda_zero_exponent(pt) == R(4));
  CHECK(sobolev_exponent(pt) == R(14));
  CHECK(t_of(pt) == R(36, 5));
}

TEST_CASE("derived values agree with the straight-line oracle on sampled window points") {
  std::mt19937_64 rng(7);
  WindowSampler region;
  for (int i = 0; i < 200; ++i) {
    const ParamPoint pt = sample_window_point(rng, region);
    REQUIRE(classify_regime(pt) == Regime::subcritical_window);
    const Oracle o(pt.n, pt.p, pt.q);
    const auto d = derive_params(pt);
    CHECK(d.alpha.raw() == o.alpha);
    CHECK(d.lambda.raw() == o.lambda);
    CHECK(d.eps2.raw() == o.eps2);
    CHECK(d.t.raw() == o.t);
    CHECK(d.g.A.raw() == o.A);
    CHECK(d.g.B.raw() == o.B);
    CHECK(d.g.C.raw() == o.C);
    CHECK(d.beta0.raw() == o.beta0);
    CHECK(o.B * o.B - 4 * o.A * o.C == 0);
    CHECK(d.lambda.sign() > 0);
    CHECK(d.eps2.sign() > 0);
  }
}

TEST_CASE("regime classification is consistent with the sign of lambda") {
  for (long n = 3; n <= 6; ++n) {
    for (long pn = 5; pn < 4 * n; ++pn) {
      const Rational p = R(pn, 4);
      for (long qn = 1; qn < 200; ++qn) {
        const Rational q = R(qn, 4);
        if (!(q > p - R(1))) continue;
        const ParamPoint pt = P(n, p, q);
        const Regime r = classify_regime(pt);
        const int s = derive_basic(pt).lambda.sign();
        if (r == Regime::lambda_negative) CHECK(s < 0);
        if (r == Regime::lambda_zero) CHECK(s == 0);
        if (r == Regime::subcritical_window || r == Regime::sobolev_critical || r == Regime::supercritical)
          CHECK(s > 0);
      }
    }
  }
}

TEST_CASE("errors name the violated condition") {
  try {
    classify_regime(P(3, R(3), R(4)));
    FAIL("expected InadmissibleParams");
  } catch (const InadmissibleParams& e) {
    CHECK(std::string(e.what()).find("p < n violated") != std::string::npos);
  }
  CHECK_THROWS_AS(classify_regime(P(2, R(3, 2), R(2))), InadmissibleParams);
  CHECK_THROWS_AS(classify_regime(P(3, R(1), R(2))), InadmissibleParams);
  CHECK_THROWS_AS(classify_regime(P(3, R(2), R(1, 2))), InadmissibleParams);
  CHECK_THROWS_AS(derive_basic(P(3, R(2), R(1))), DegenerateExponent);
  CHECK_THROWS_AS(derive_params(P(3, R(2), R(1, 1) + R(1, 2))), OutOfWindow);  // lambda < 0
  CHECK_THROWS_AS(derive_params(P(3, R(2), R(5))), OutOfWindow);              // Sobolev critical
  CHECK_THROWS_AS(omega_star(P(3, R(2), R(3, 2))), OutOfWindow);
  CHECK_THROWS_AS(eps2_of(P(3, R(2), R(3, 2))), OutOfWindow);
}

TEST_CASE("printed factored bracket is nonzero; corrected bracket vanishes") {
  auto b = ExprBuilder::symbolic();
  const auto& n = b.n();
  const auto& p = b.p();
  const auto one = b.cst(R(1));
  const auto np1 = n + one, pm1 = p - one;
  const auto base = (p - one - n).pow(2) - p * n * np1 + p.pow(2) * n + np1.pow(2) * pm1;
  const auto printed = base + np1 * pm1 * p;
  const auto corrected = base - np1 * pm1 * p;
  CHECK(corrected.is_zero());
  CHECK((printed - R(2) * p * pm1 * np1).is_zero());
}

TEST_CASE("symbolic certification is all exact-zero and runs within budget") {
  const auto start = std::chrono::steady_clock::now();
  CertificationOptions opts;
  const auto report = run_certification(opts);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& e : report.sorted()) {
    INFO(e.id << ": " << e.witness);
    CHECK(e.status != CheckStatus::fail);
  }
  CHECK(report.passed());
  CHECK(report.entries().size() >= 25);
  CHECK(secs <= 60.0);
  MESSAGE("symbolic certification: " << report.entries().size() << " entries in " << secs << " s");
}

TEST_CASE("fixed-n certification passes for n = 3..8") {
  CertificationOptions opts;
  opts.symbolic_n = false;
  opts.positivity_samples = 100;
  const auto report = run_certification(opts);
  for (const auto& e : report.sorted()) {
    INFO(e.id << ": " << e.witness);
    CHECK(e.status != CheckStatus::fail);
  }
}

TEST_CASE("a broken identity is reported as a failure with a witness") {
  auto b = ExprBuilder::symbolic();
  const auto e = exact_zero_entry("bogus", "t equals n/alpha", b.t() - b.n() / b.alpha());
  CHECK(e.status == CheckStatus::fail);
  CHECK(!e.witness.empty());
}
