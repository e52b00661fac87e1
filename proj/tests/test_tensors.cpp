#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "plap/tensors.hpp"

using namespace plap;

namespace {

Rational R(long a, long b = 1) { return Rational(mpz_class(a), mpz_class(b)); }

FramePoint simple_point() {
  FramePoint fp;
  fp.d = 2;
  fp.v = R(1);
  fp.grad = {R(1), R(0)};
  fp.hess = {R(1), R(0), R(0), R(1)};
  fp.alpha = R(1);
  fp.beta = R(1);
  fp.p = R(2);
  return fp;
}

void require_clean(const CheckReport& r) {
  for (const auto& e : r.entries()) {
    INFO(e.id << ": " << e.witness);
    CHECK(e.status != CheckStatus::fail);
  }
}

}  // namespace

TEST_CASE("build_tensors on the hand-computed point") {
  const auto t = build_tensors(simple_point());
  // p = 2: X = s Q^2 H with Q^2 = 2, so divX = 2 s Q^2 trace(H)/... evaluated at s = 1/Q^2
  const std::vector<Rational> at{R(2), R(1, 2)};  // (p, s) with s = Q^{p-4} = 1/2
  CHECK(t.divX.evaluate(at) == R(2));
  CHECK(t.f.constant_value() == R(0));
}

TEST_CASE("zero gradient: X, L and f vanish") {
  auto fp = simple_point();
  fp.grad = {R(0), R(0)};
  fp.hess = {R(0), R(0), R(0), R(0)};
  const auto t = build_tensors(fp);
  CHECK(t.X.is_zero());
  CHECK(t.L.is_zero());
  CHECK(t.f.is_zero());
  require_clean(check_decomposition(fp));
  require_clean(check_algebraic_identities(fp));
}

TEST_CASE("p = 2 collapses N3 to the identity") {
  auto fp = simple_point();
  fp.eps = R(1, 6);
  fp.M = R(3, 2);
  const auto t = build_tensors(fp);
  CHECK((t.N3 - TensorValue::identity(2)).is_zero());
  CHECK((t.F + TensorValue::constant(fp.M) * t.L - t.N4 - t.N2).is_zero());
}

TEST_CASE("N3 eigenvalue at p = 3/2") {
  auto fp = simple_point();
  fp.p = R(3, 2);
  const auto t = build_tensors(fp);
  // 1 + (p-2) beta^2 |grad|^2 / Q^2 = 1 - 1/2 * 1/2
  const std::vector<Rational> g{R(1), R(0)};
  CHECK(t.N3(0, 0).constant_value() == R(3, 4));
  CHECK(t.N3(1, 1).constant_value() == R(1));
  require_clean(check_decomposition(fp));
}

TEST_CASE("kernel trace at d = 3, eps = 1/6") {
  std::mt19937_64 rng(11);
  auto fp = random_frame_point(rng, 3);
  fp.eps = R(1, 6);
  const auto t = build_tensors(fp);
  const auto tr = (t.F + TensorValue::constant(fp.M) * t.L).trace();
  CHECK((tr - t.divX * TensorValue::constant(R(1, 2))).is_zero());
  require_clean(check_kernel_trace(fp));
}

TEST_CASE("random d = 3 point with p = 5/2 passes every decomposition residual") {
  std::mt19937_64 rng(3);
  auto fp = random_frame_point(rng, 3);
  fp.p = R(5, 2);
  require_clean(check_decomposition(fp));
  require_clean(check_algebraic_identities(fp));
}

TEST_CASE("a perturbed tensor is caught") {
  std::mt19937_64 rng(5);
  auto fp = random_frame_point(rng, 3);
  while (fp.grad_norm2().is_zero()) fp = random_frame_point(rng, 3);
  auto t = build_tensors(fp);
  // transposing N1 breaks N1 = N3 N4 unless H g is parallel to g
  auto transposed = t.N1.transpose();
  const bool parallel = (t.N1 - transposed).is_zero();
  if (!parallel) CHECK(!(transposed - t.N3 * t.N4).is_zero());
}

TEST_CASE("tensor suite: 100 random points per dimension, numeric p") {
  TensorSuiteOptions opts;
  const auto r = run_tensor_suite(opts);
  require_clean(r);
  CHECK(r.entries().size() >= 3 * 12);
}

TEST_CASE("tensor suite with p as an indeterminate") {
  TensorSuiteOptions opts;
  opts.symbolic_p = true;
  opts.samples = 20;
  require_clean(run_tensor_suite(opts));
}

TEST_CASE("Jacobi eigenvalues agree with Eigen") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t d = 1; d <= 6; ++d) {
    for (int k = 0; k < 50; ++k) {
      Eigen::MatrixXd m(d, d);
      std::vector<double> flat(d * d);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) m(i, j) = m(j, i) = u(rng);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) flat[i * d + j] = m(i, j);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      const auto ours = jacobi_eigenvalues(flat, d);
      for (std::size_t i = 0; i < d; ++i) CHECK(ours[i] == doctest::Approx(es.eigenvalues()(i)).epsilon(1e-10));
    }
  }
}

TEST_CASE("trace inequality examples") {
  const auto s = trace_inequality_sample({1, 0, 0, 2}, {0, 1, 1, 0}, 2);
  CHECK(s.lhs == doctest::Approx(5.0));
  CHECK(s.rhs == doctest::Approx(32.0));
  const auto scalar = trace_inequality_sample({3}, {2}, 1);
  CHECK(scalar.lhs == doctest::Approx(scalar.rhs));
  const auto ident = trace_inequality_sample({1, 0, 0, 1}, {1, 2, 2, 4}, 2);  // A = I, B rank one
  CHECK(ident.lhs * 2 == doctest::Approx(ident.rhs));
}

TEST_CASE("trace inequality holds on 10^4 samples per dimension 2..6") {
  const auto r = check_trace_inequality({2, 3, 4, 5, 6}, 10000, 0x4D41545249ULL);
  require_clean(r);
  CHECK(r.entries().size() == 5);
}
