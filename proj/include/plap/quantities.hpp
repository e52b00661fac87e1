#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "plap/ratfunc.hpp"
#include "plap/report.hpp"

namespace plap {

/// Parameter point violates 1 < p < n, q > p - 1 or n >= 3.
class InadmissibleParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A quantity that only exists inside the subcritical window was requested outside it.
class OutOfWindow : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// q + 1 - p = 0: the exponent alpha is undefined.
class DegenerateExponent : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Leading coefficient of g vanishes at the point, so beta0 is not determined.
class DegenerateQuadratic : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// (n, p, q): sphere S^n, exponents of the quasilinear equation.
struct ParamPoint {
  long n = 3;
  Rational p{2};
  Rational q{4};

  /// Throws InadmissibleParams naming the violated bound.
  void validate() const;
  std::string to_string() const;
};

enum class Regime { lambda_negative, lambda_zero, subcritical_window, sobolev_critical, supercritical };

std::string_view to_string(Regime r);

/// Lower window edge (n+1)(p-1)/(n+1-p), where lambda changes sign.
Rational lambda_zero_exponent(const ParamPoint& pt);
/// Upper window edge (np-n+p)/(n-p), the Sobolev critical exponent.
Rational sobolev_exponent(const ParamPoint& pt);

Regime classify_regime(const ParamPoint& pt);

/// Closed forms shared by the symbolic suite and the numeric evaluator.
///
/// Every quantity lives over the fixed variable list {n, p, q, beta, a, e2}, where
/// e2 stands for n^2 eps^2 before it is eliminated. In numeric mode n, p, q are
/// constants and results are constant rational functions.
class ExprBuilder {
 public:
  static const std::vector<std::string>& variables();

  static ExprBuilder symbolic();
  static ExprBuilder with_fixed_n(long n);
  static ExprBuilder at(const ParamPoint& pt);

  RationalFunction cst(const Rational& c) const { return RationalFunction(variables(), c); }
  const RationalFunction& n() const { return n_; }
  const RationalFunction& p() const { return p_; }
  const RationalFunction& q() const { return q_; }
  RationalFunction beta() const { return sym("beta"); }
  RationalFunction a() const { return sym("a"); }
  RationalFunction e2() const { return sym("e2"); }

  RationalFunction gap() const;  ///< q + 1 - p
  RationalFunction alpha() const;
  RationalFunction lambda() const;
  RationalFunction k(const RationalFunction& beta) const;

  /// Closed form of n^2 eps^2 that makes the gradient-squared coefficient vanish.
  RationalFunction n2eps2() const;
  RationalFunction eps2() const;
  /// Surviving factor n/(n-1+n^2 eps^2) after eps is fixed, written lambda(q+1-p)/(n-1).
  RationalFunction weight_factor_closed() const;

  /// t as first obtained from the vanishing first coefficient.
  RationalFunction t_raw() const;
  /// Simplified t = (n+1)/alpha.
  RationalFunction t() const;

  /// Coefficients of g(beta) = A beta^2 + B beta + C as displayed after substitution.
  RationalFunction g_A() const;
  RationalFunction g_B() const;
  RationalFunction g_C() const;
  RationalFunction beta0() const;
  RationalFunction g_at(const RationalFunction& beta) const;

  /// M = [beta lambda p/alpha^2 + n a/D] / [2n/D] with a = t beta, eps fixed.
  RationalFunction M(const RationalFunction& beta) const;

  // Coefficients of the master identity (free beta, a, e2; D = n-1+e2):
  //   K1 int v^{a-1} Q^{p-2}|grad v|^2 div X, K2 int v^a |grad v|^2 Q^{2p-4},
  //   K3 int v^{a-1} Q^{p-2} v_i v_j X_ij, K4 int v^{a-2}|grad v|^4 Q^{2p-4},
  //   K5 int v^a F.F
  RationalFunction D() const;
  RationalFunction master_K1() const;
  RationalFunction master_K2() const;
  RationalFunction master_K3() const;
  RationalFunction master_K4() const;
  RationalFunction master_K5() const;

  // Completed-square form: C1 div-X term, C2 gradient-squared term,
  // C3 = K5 weight of (F+ML).(F+ML), C4 quartic term.
  RationalFunction crucial_C1() const;
  RationalFunction crucial_C2() const;
  RationalFunction crucial_C4() const;

  /// Eliminates e2 by its closed form and a by t*beta.
  RationalFunction fix_parameters(const RationalFunction& f) const;

 private:
  ExprBuilder(RationalFunction n, RationalFunction p, RationalFunction q)
      : n_(std::move(n)), p_(std::move(p)), q_(std::move(q)) {}
  RationalFunction sym(const std::string& name) const { return RationalFunction::variable(variables(), name); }

  RationalFunction n_, p_, q_;
};

/// (alpha, lambda, k(beta)) at a point.
struct BasicParams {
  Rational alpha;
  Rational lambda;
  RationalFunction k_of_beta;
};

BasicParams derive_basic(const ParamPoint& pt);

struct Eps2Result {
  Rational eps2;
  Rational weight_factor;  ///< n/(n-1+n^2 eps^2) = lambda (q+1-p)/(n-1)
};

Eps2Result eps2_of(const ParamPoint& pt);

Rational t_of(const ParamPoint& pt);

struct QuadraticCoefficients {
  Rational A, B, C;
};

QuadraticCoefficients g_quadratic(const ParamPoint& pt);
Rational beta0_of(const ParamPoint& pt);
Rational M_of(const ParamPoint& pt, const Rational& beta);
double omega_star(const ParamPoint& pt);

struct DerivedParams {
  Rational alpha, lambda, eps2, t, beta0, a, k, M;
  QuadraticCoefficients g;
  double omega_star = 0.0;
  Regime regime = Regime::subcritical_window;
};

/// All derived quantities; throws OutOfWindow outside the subcritical window.
DerivedParams derive_params(const ParamPoint& pt);

/// Sampling region for inequality checks (documented seed in the suite options).
struct WindowSampler {
  std::uint64_t seed = 0x4C494F55ULL;
  long n_min = 3, n_max = 8;
  long denominator = 64;
};

ParamPoint sample_window_point(std::mt19937_64& rng, const WindowSampler& region);

struct CertificationOptions {
  bool symbolic_n = true;
  std::vector<long> fixed_n{3, 4, 5, 6, 7, 8};  ///< used when symbolic_n is false
  int positivity_samples = 1000;
  WindowSampler sampler;
};

CheckReport check_window_margin(const ExprBuilder& b, const std::string& suffix);
CheckReport check_t_identity(const ExprBuilder& b, const std::string& suffix);
CheckReport check_discriminant(const ExprBuilder& b, const std::string& suffix);
CheckReport check_coefficients(const ExprBuilder& b, const std::string& suffix);
CheckReport check_sampled_positivity(const CertificationOptions& options);

/// Full certification of the parameter choices that collapse the crucial identity.
CheckReport run_certification(const CertificationOptions& options);

}  // namespace plap
