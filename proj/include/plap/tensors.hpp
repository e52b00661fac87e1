#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "plap/multipoly.hpp"
#include "plap/report.hpp"

namespace plap {

/// Pointwise jet data in an orthonormal frame. The power Q^{p-4} is the formal symbol s,
/// so Q^{p-2} = s Q^2, Q^{2p-4} = s^2 Q^4 and Q^{2p-6} = s^2 Q^2.
struct FramePoint {
  std::size_t d = 2;
  Rational v{1};
  std::vector<Rational> grad;  ///< v_i
  std::vector<Rational> hess;  ///< v_ij, row-major, symmetric
  Rational alpha{1}, beta{1}, p{2}, eps{0}, M{0};
  /// Treat p as an indeterminate; the numeric value is ignored.
  bool symbolic_p = false;

  void validate() const;  ///< throws std::invalid_argument
  Rational grad_norm2() const;
  Rational Q2() const;  ///< alpha^2 v^2 + beta^2 |grad v|^2
  const Rational& H(std::size_t i, std::size_t j) const { return hess[i * d + j]; }
};

/// Square matrix of polynomials over {p, s}.
class TensorValue {
 public:
  TensorValue() = default;
  explicit TensorValue(std::size_t d);

  static const std::vector<std::string>& variables();
  static MultiPoly constant(const Rational& c) { return MultiPoly(variables(), c); }
  static MultiPoly symbol(const std::string& name) { return MultiPoly::variable(variables(), name); }
  static TensorValue identity(std::size_t d);

  std::size_t dim() const { return d_; }
  MultiPoly& operator()(std::size_t i, std::size_t j) { return entries_[i * d_ + j]; }
  const MultiPoly& operator()(std::size_t i, std::size_t j) const { return entries_[i * d_ + j]; }

  TensorValue& operator+=(const TensorValue& rhs);
  TensorValue& operator-=(const TensorValue& rhs);
  friend TensorValue operator+(TensorValue a, const TensorValue& b) { return a += b; }
  friend TensorValue operator-(TensorValue a, const TensorValue& b) { return a -= b; }
  friend TensorValue operator*(const TensorValue& a, const TensorValue& b);
  friend TensorValue operator*(const MultiPoly& c, const TensorValue& a);

  MultiPoly trace() const;
  TensorValue transpose() const;
  bool is_zero() const;
  /// First nonzero entry as "(i,j): poly", empty when zero.
  std::string first_nonzero() const;

 private:
  std::size_t d_ = 0;
  std::vector<MultiPoly> entries_;
};

/// Mixed contraction A^i_j B^j_i = trace(AB).
MultiPoly contract(const TensorValue& a, const TensorValue& b);

struct FrameTensors {
  TensorValue X;             ///< X^i_j = (Q^{p-2} v_i)_j, expanded with the chain rule
  std::vector<MultiPoly> Xvec;  ///< X^i = Q^{p-2} v_i
  TensorValue E, F, L;
  TensorValue N1, N2, N3, N4;
  MultiPoly f;     ///< v v_j v_i v_ji - |grad v|^4
  MultiPoly divX;  ///< X^i_i
  MultiPoly p, s, Q2;
};

FrameTensors build_tensors(const FramePoint& fp);

/// Contraction identities for E, F, L and the Q^{p-2} v_i v_j X_ij expansion at one point.
CheckReport check_algebraic_identities(const FramePoint& fp, const std::string& suffix = "");
/// F + ML = N1 + N2 = N3 N4 + N2 with the closed-form inverse of N3.
CheckReport check_decomposition(const FramePoint& fp, const std::string& suffix = "");
/// trace(F + ML) = d eps divX, trace L = trace E = 0.
CheckReport check_kernel_trace(const FramePoint& fp, const std::string& suffix = "");

/// Entries uniform with numerator in [-8, 8] and denominator in {1, 2, 4}; v in [1/2, 4].
FramePoint random_frame_point(std::mt19937_64& rng, std::size_t d);

struct TensorSuiteOptions {
  std::vector<std::size_t> dims{2, 3, 4};
  int samples = 100;
  std::uint64_t seed = 0x54454E53ULL;
  bool symbolic_p = false;
};

/// Aggregates the pointwise checks over random FramePoints: one entry per identity and dimension.
CheckReport run_tensor_suite(const TensorSuiteOptions& options);

// --- float trace inequality ---------------------------------------------------

/// Eigenvalues (ascending) of a symmetric row-major matrix by cyclic Jacobi rotations.
std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t d);

struct TraceInequalitySample {
  double lhs = 0, rhs = 0, slack = 0;  ///< slack = (rhs - lhs) / max(|lhs|, |rhs|, 1)
};

/// trace(AB (AB)^T) against d (lmax/lmin)^2 trace((AB)^2) for A SPD, B symmetric.
TraceInequalitySample trace_inequality_sample(const std::vector<double>& A, const std::vector<double>& B, std::size_t d);

/// dims in {1..6}; per-sample RNG streams derived from (seed, dim, index).
CheckReport check_trace_inequality(const std::vector<std::size_t>& dims, int samples, std::uint64_t seed,
                               double tol = 1e-12);

}  // namespace plap
