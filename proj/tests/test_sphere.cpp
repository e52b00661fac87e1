#include <cmath>
#include <gmpxx.h>
#include <numbers>
#include <random>

#include "doctest.h"
#include "plap/sphere.hpp"

using namespace plap;

namespace {

constexpr double pi = std::numbers::pi;

Rational R(long a, long b = 1) { return Rational(mpz_class(a), mpz_class(b)); }

ParamPoint point(long n, Rational p, Rational q) {
  ParamPoint pt;
  pt.n = n;
  pt.p = p;
  pt.q = q;
  return pt;
}

template <class Fn>
std::vector<double> sample(const SphereGrid& g, Fn fn) {
  std::vector<double> out(g.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = fn(g.theta[j]);
  return out;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

void require_clean(const CheckReport& r) {
  for (const auto& e : r.entries()) {
    INFO(e.id << ": " << e.witness);
    CHECK(e.status == CheckStatus::pass);
  }
}

}  // namespace

TEST_CASE("quadrature reproduces sphere areas and kills odd functions") {
  CHECK(quadrature(SphereGrid::make(2, 64), std::vector<double>(65, 1.0)) == doctest::Approx(4 * pi).epsilon(1e-12));
  CHECK(quadrature(SphereGrid::make(3, 64), std::vector<double>(65, 1.0)) ==
        doctest::Approx(2 * pi * pi).epsilon(1e-12));
  for (long n = 2; n <= 6; ++n) {
    const auto g = SphereGrid::make(n, 48);
    CHECK(std::abs(quadrature(g, sample(g, [](double t) { return std::cos(t); }))) <= 1e-12);
    // |S^n| = 2 pi^{(n+1)/2} / Gamma((n+1)/2), independent of the moment recurrence
    const double area = 2 * std::pow(pi, (n + 1) / 2.0) / std::tgamma((n + 1) / 2.0);
    CHECK(quadrature(g, std::vector<double>(g.size(), 1.0)) == doctest::Approx(area).epsilon(1e-12));
  }
}

TEST_CASE("quadrature of cos^2 matches the beta-function moment") {
  // int_0^pi cos^2 sin^{n-1} = B(3/2, n/2), times |S^{n-1}|
  for (long n = 2; n <= 5; ++n) {
    const auto g = SphereGrid::make(n, 32);
    const double moment = std::tgamma(1.5) * std::tgamma(n / 2.0) / std::tgamma(1.5 + n / 2.0);
    const double expect = moment * sphere_area(n - 1);
    CHECK(quadrature(g, sample(g, [](double t) { return std::cos(t) * std::cos(t); })) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("spectral derivatives of cosine modes") {
  const auto g = SphereGrid::make(3, 64);
  const auto d = differentiate(g, sample(g, [](double t) { return std::cos(t); }));
  CHECK(sup_diff(d.d1, sample(g, [](double t) { return -std::sin(t); })) <= 1e-10);
  CHECK(sup_diff(d.d2, sample(g, [](double t) { return -std::cos(t); })) <= 1e-10);
  const auto c = differentiate(g, std::vector<double>(g.size(), 3.5));
  for (double x : c.d1) CHECK(x == 0.0);
  const auto d3 = differentiate(g, sample(g, [](double t) { return std::cos(3 * t); }));
  CHECK(d3.d1[32] == doctest::Approx(3.0).epsilon(1e-10));  // theta = pi/2
  for (int m = 0; m <= 32; ++m) {
    const auto dm = differentiate(g, sample(g, [m](double t) { return std::cos(m * t); }));
    CHECK(sup_diff(dm.d1, sample(g, [m](double t) { return -m * std::sin(m * t); })) <= 1e-10 * (1 + m * m));
  }
}

TEST_CASE("Laplace-Beltrami on the first harmonic, constants and the divergence theorem") {
  for (long n = 2; n <= 5; ++n) {
    const auto g = SphereGrid::make(n, 64);
    const auto lap = laplace_beltrami(g, sample(g, [](double t) { return 2 + std::cos(t); }));
    CHECK(sup_diff(lap, sample(g, [n](double t) { return -double(n) * std::cos(t); })) <= 1e-10);
    for (double x : laplace_beltrami(g, std::vector<double>(g.size(), 1.0))) CHECK(std::abs(x) <= 1e-12);
  }
  const auto g = SphereGrid::make(3, 128);
  std::mt19937_64 rng(21);
  for (int i = 0; i < 10; ++i) {
    const auto f = random_profile(g, rng);
    CHECK(std::abs(quadrature(g, laplace_beltrami(g, f))) <= 1e-10);
  }
}

TEST_CASE("frame fields: constants, Hessian trace and p = 2") {
  const auto g = SphereGrid::make(3, 64);
  const auto cst = frame_fields(g, std::vector<double>(g.size(), 1.5), {2.0 / 3, -1.0 / 3, 3.0, 0.25});
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(std::sqrt(cst.Q2[j]) == doctest::Approx(1.0));  // Q = alpha c
    CHECK(cst.h[j] == 0.0);
    CHECK(cst.divX[j] == 0.0);
    CHECK(cst.f[j] == 0.0);
  }
  std::mt19937_64 rng(4);
  const auto v = random_profile(g, rng);
  const auto lap = laplace_beltrami(g, v);
  const auto ff = frame_fields(g, v, {0.8, -0.5, 2.0, 0.1});
  std::vector<double> trace(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) trace[j] = ff.d2v[j] + 2 * ff.hess_tangential[j];
  CHECK(sup_diff(trace, lap) <= 1e-10);
  CHECK(sup_diff(ff.divX, lap) <= 1e-10);
}

TEST_CASE("frame fields reject nonpositive profiles") {
  const auto g = SphereGrid::make(3, 16);
  auto v = std::vector<double>(g.size(), 1.0);
  v[5] = 0.0;
  CHECK_THROWS_AS(frame_fields(g, v, {1, 1, 2, 0}), PositivityError);
}

TEST_CASE("PDE residual at constants and in the semilinear case") {
  const auto g = SphereGrid::make(3, 64);
  const auto pt = point(3, R(2), R(4));
  for (double r : pde_residual(g, std::vector<double>(g.size(), 1.0), pt)) CHECK(r == doctest::Approx(1.0 / 9));
  const double ws = omega_star(pt);
  for (double r : pde_residual(g, std::vector<double>(g.size(), ws), pt)) CHECK(std::abs(r) <= 1e-10);

  // p = 2: A = 1, so R = Laplacian + w^q - lambda w
  const auto w = sample(g, [](double t) { return 1 + 0.3 * std::cos(t) + 0.1 * std::cos(2 * t); });
  const auto lap = laplace_beltrami(g, w);
  std::vector<double> expect(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) expect[j] = lap[j] + std::pow(w[j], 4) - 8.0 / 9 * w[j];
  CHECK(sup_diff(pde_residual(g, w, pt), expect) <= 1e-10);
}

TEST_CASE("PDE residual against an finite-difference route at p = 5/2") {
  // R = A w'' + A' w' + (n-1) cot A w' + w^q - lambda A w; A' by centered differences
  const auto pt = point(3, R(5, 2), R(6));
  const double al = 2.5 / 4.5, lam = 10.0 / 27;
  const auto g = SphereGrid::make(3, 128);
  auto A = [&](double t) {
    const double w = 1 + 0.2 * std::cos(t), dw = -0.2 * std::sin(t);
    return std::pow(al * al * w * w + dw * dw, 0.25);
  };
  const auto res = pde_residual(g, sample(g, [](double t) { return 1 + 0.2 * std::cos(t); }), pt);
  for (std::size_t j = 1; j + 1 < g.size(); j += 7) {
    const double t = g.theta[j], h = 1e-5;
    const double w = 1 + 0.2 * std::cos(t), dw = -0.2 * std::sin(t), d2w = -0.2 * std::cos(t);
    const double dA = (A(t + h) - A(t - h)) / (2 * h);
    const double expect = A(t) * d2w + dA * dw + 2 * std::cos(t) / std::sin(t) * A(t) * dw + std::pow(w, 6) -
                          lam * A(t) * w;
    CHECK(res[j] == doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("constant-solution consistency across window points") {
  const auto g = SphereGrid::make(3, 32);
  SweepSpec spec;
  spec.solve = false;
  int tested = 0;
  for (const auto& row : sweep(spec)) {
    if (row.regime != "subcritical_window") continue;
    const auto pt = point(3, row.p, row.q);
    for (double r : pde_residual(g, std::vector<double>(g.size(), omega_star(pt)), pt)) CHECK(std::abs(r) <= 1e-10);
    ++tested;
  }
  CHECK(tested > 0);
}

TEST_CASE("calculus identities on v = 2 + cos(theta) and on constants") {
  const auto g = SphereGrid::make(3, 256);
  CalculusParams prm;
  prm.point = point(3, R(2), R(4));
  require_clean(calculus_identity_defects(g, sample(g, [](double t) { return 2 + std::cos(t); }), prm));
  prm.point = point(3, R(5, 2), R(6));
  prm.a = 0.7;
  require_clean(calculus_identity_defects(g, sample(g, [](double t) { return 2 + std::cos(t); }), prm));
  const auto c = calculus_identity_defects(g, std::vector<double>(g.size(), 1.7), prm);
  for (const auto& e : c.entries()) CHECK(e.residual == 0.0);
}

TEST_CASE("Bochner balance at p = 2, a = 0 on random profiles") {
  const auto g = SphereGrid::make(3, 256);
  CalculusParams prm;
  prm.a = 0.0;
  std::mt19937_64 rng(99);
  for (int i = 0; i < 5; ++i) {
    const auto rep = calculus_identity_defects(g, random_profile(g, rng), prm);
    for (const auto& e : rep.entries())
      if (e.id.rfind("calculus.bochner", 0) == 0) CHECK(e.residual <= 1e-8);
  }
}

TEST_CASE("a corrupted identity is detected") {
  // Dropping the curvature term from the Bochner balance leaves an O(1) defect.
  const auto g = SphereGrid::make(3, 128);
  const auto v = sample(g, [](double t) { return 2 + std::cos(t); });
  const auto F = frame_fields(g, v, {1, 1, 2, 0});
  std::vector<double> lhs(g.size()), rhs(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    lhs[j] = F.divX[j] * F.divX[j];
    rhs[j] = F.XX[j];
  }
  const double gap = quadrature(g, lhs) - quadrature(g, rhs);
  std::vector<double> ric(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) ric[j] = 2 * F.grad2[j];
  CHECK(gap == doctest::Approx(quadrature(g, ric)).epsilon(1e-10));
  CHECK(std::abs(gap) > 0.1);
}

TEST_CASE("residual weight sign is decisive") {
  CHECK(select_residual_weight_sign() == 1);
  const auto g = SphereGrid::make(3, 256);
  const auto v = sample(g, [](double t) { return 2 + std::cos(t); });
  const auto prm = sign_probe_params();
  CHECK(master_identity_defect(g, v, prm, +1).master <= 1e-7);
  CHECK(master_identity_defect(g, v, prm, -1).master > 1e-2);
  // at beta0 itself k + a = 0 and both signs agree
  const auto b0 = CalculusParams::at_beta0(ParamPoint{});
  CHECK(b0.k() + b0.a == doctest::Approx(0.0));
  CHECK(master_identity_defect(g, v, b0, +1).master <= 1e-7);
  const auto cst = master_identity_defect(g, std::vector<double>(g.size(), 1.3), b0, +1);
  CHECK(cst.scale == doctest::Approx(0.0));
}

TEST_CASE("calculus suite: 20 seeded profiles at N = 256") {
  CalculusSuiteOptions opt;
  const auto rep = run_calculus_suite(opt);
  require_clean(rep);
  CHECK(rep.entries().size() == 9);
  const auto again = run_calculus_suite(opt);
  REQUIRE(again.entries().size() == rep.entries().size());
  const auto a = rep.sorted(), b = again.sorted();
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].witness == b[i].witness);
  }
}

TEST_CASE("spectral decay of identity defects") {
  CalculusSuiteOptions opt;
  opt.samples = 4;
  const std::vector<std::size_t> grids{8, 16, 32, 64, 128, 256, 512};
  const auto d = calculus_defect_by_grid(opt, grids);
  CHECK(d[0] > 1e-6);  // 8 modes are under-resolved on 9 nodes
  for (std::size_t i = 1; i < d.size(); ++i) {
    INFO("N = " << grids[i] << " defect " << d[i]);
    CHECK((d[i] <= 1e-10 || d[i] * 100 <= d[i - 1]));
  }
  CHECK(d[4] <= 1e-10);
  CHECK(d[6] <= 1e-10);
}

TEST_CASE("solve_flow at (3, 2, 4) converges to the constant and matches the p = 2 limit") {
  SolveConfig cfg;
  cfg.params = point(3, R(2), R(4));
  const auto r = solve_flow(cfg);
  CHECK(r.outcome == Outcome::converged_to_constant);
  CHECK(r.distance <= 1e-6);
  CHECK(r.steps <= 1'000'000);
  CHECK(r.omega_star == doctest::Approx(std::cbrt(8.0 / 9)).epsilon(1e-12));
  for (double w : r.omega) CHECK(std::abs(w - std::cbrt(8.0 / 9)) <= 1e-6);
  CHECK(r.history.front().step == 0);
  CHECK(r.history.back().step == r.steps);

  // v = w^{-1/beta0} = w^3 nearly solves the equation for v
  const auto g = SphereGrid::make(3, 128);
  std::vector<double> v(r.omega.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::pow(r.omega[j], 3);
  const auto md = master_identity_defect(g, v, CalculusParams::at_beta0(cfg.params), 1);
  CHECK(md.absolute <= 10 * r.residual);
}

TEST_CASE("solve_flow at (3, 5/2, 6)") {
  SolveConfig cfg;
  cfg.params = point(3, R(5, 2), R(6));
  const auto r = solve_flow(cfg);
  CHECK(r.outcome == Outcome::converged_to_constant);
  CHECK(r.distance <= 1e-6);
  // constants solve w^{q-p+1} = lambda alpha^{p-2}
  CHECK(r.omega_star == doctest::Approx(std::pow(10.0 / 27 * std::sqrt(5.0 / 9), 1 / 4.5)).epsilon(1e-12));
}

TEST_CASE("p = 2 limit equals lambda^{1/(q-1)} off the default point") {
  SolveConfig cfg;
  cfg.params = point(3, R(2), R(7, 2));
  cfg.N = 32;
  const auto r = solve_flow(cfg);
  CHECK(r.outcome == Outcome::converged_to_constant);
  for (double w : r.omega) CHECK(std::abs(w - std::pow(24.0 / 25, 1 / 2.5)) <= 1e-6);
}

TEST_CASE("zero perturbation converges in zero steps") {
  SolveConfig cfg;
  cfg.delta = 0;
  const auto r = solve_flow(cfg);
  CHECK(r.outcome == Outcome::converged_to_constant);
  CHECK(r.steps == 0);
}

TEST_CASE("the plain flow does not reach the constant") {
  SolveConfig cfg;
  cfg.N = 32;
  cfg.max_steps = 20000;
  cfg.flow = FlowKind::plain;
  const auto r = solve_flow(cfg);
  CHECK(r.outcome != Outcome::converged_to_constant);
}

TEST_CASE("solve_flow guards the window and validates its config") {
  SolveConfig cfg;
  cfg.params = point(3, R(2), R(5));
  CHECK_THROWS_AS(solve_flow(cfg), OutOfWindow);
  cfg.exploratory = true;
  cfg.N = 32;
  cfg.max_steps = 2000;
  const auto r = solve_flow(cfg);
  CHECK(r.exploratory);
  SolveConfig bad;
  bad.tol = 0;
  CHECK_THROWS_AS(solve_flow(bad), std::invalid_argument);
}

TEST_CASE("sweep regimes agree with an exact sign oracle") {
  SweepSpec spec;
  spec.solve = false;
  const auto rows = sweep(spec);
  CHECK(rows.size() == 30);
  for (const auto& row : rows) {
    // lambda = alpha (n + 1 - alpha q), alpha = p / (q + 1 - p); edges at lambda = 0 and the Sobolev exponent
    const mpq_class p = row.p.raw(), q = row.q.raw(), n = 3;
    INFO("p = " << row.p.to_string() << " q = " << row.q.to_string());
    if (q <= p - 1) {
      CHECK(row.regime == "inadmissible");
      continue;
    }
    const mpq_class al = p / (q + 1 - p);
    const mpq_class lam = al * (n + 1 - al * q);
    const mpq_class crit = (n * p - n + p) / (n - p);
    std::string expect;
    if (sgn(lam) < 0) expect = "lambda_negative";
    else if (sgn(lam) == 0) expect = "lambda_zero";
    else if (q < crit) expect = "subcritical_window";
    else if (q == crit) expect = "sobolev_critical";
    else expect = "supercritical";
    CHECK(row.regime == expect);
    CHECK(row.lambda == Rational(lam).to_string());
    CHECK(row.outcome == "not_attempted");
  }
}

TEST_CASE("sweep rows from the examples") {
  SweepSpec spec;
  spec.p_min = spec.p_max = R(2);
  spec.q_min = R(3, 2);
  spec.q_max = R(5);
  spec.q_step = R(1, 2);
  spec.exploratory_max_steps = 500;
  const auto rows = sweep(spec);
  for (const auto& r : rows) {
    if (r.q == R(4)) {
      CHECK(r.regime == "subcritical_window");
      CHECK(r.outcome == "converged_to_constant");
    }
    if (r.q == R(3, 2)) {
      CHECK(r.regime == "lambda_negative");
      CHECK(r.lambda == "-8");
      CHECK(r.outcome == "not_attempted");
    }
    if (r.q == R(5)) {
      CHECK(r.regime == "sobolev_critical");
      CHECK(r.outcome.rfind("exploratory:", 0) == 0);
    }
  }
  const auto csv = sweep_csv(rows);
  CHECK(csv.rfind("p,q,lambda,regime,outcome,final_residual\n", 0) == 0);
  CHECK(csv == sweep_csv(sweep(spec)));
  spec.q_min = R(7);
  CHECK(sweep_csv(sweep(spec)) == "p,q,lambda,regime,outcome,final_residual\n");
}

TEST_CASE("profile and convergence CSV headers") {
  SolveConfig cfg;
  cfg.N = 16;
  cfg.delta = 0;
  const auto r = solve_flow(cfg);
  CHECK(profile_csv(r).rfind("theta,omega\n", 0) == 0);
  CHECK(convergence_csv(r).rfind("step,residual_sup,dist_to_constant\n", 0) == 0);
  CHECK(format_real(2.0 / 3) == "0.666666666667");
}
