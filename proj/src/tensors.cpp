#include "plap/tensors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "plap/ratfunc.hpp"

namespace plap {

void FramePoint::validate() const {
  if (d < 1) throw std::invalid_argument("frame dimension must be positive");
  if (grad.size() != d) throw std::invalid_argument("gradient length differs from d");
  if (hess.size() != d * d) throw std::invalid_argument("hessian is not d x d");
  if (v.sign() <= 0) throw std::invalid_argument("v must be positive");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      if (H(i, j) != H(j, i)) throw std::invalid_argument("hessian is not symmetric");
  if (Q2().sign() <= 0) throw std::invalid_argument("Q^2 must be positive");
}

Rational FramePoint::grad_norm2() const {
  Rational out(0);
  for (const auto& g : grad) out += g * g;
  return out;
}

Rational FramePoint::Q2() const { return alpha * alpha * v * v + beta * beta * grad_norm2(); }

// ---------------------------------------------------------------------------

TensorValue::TensorValue(std::size_t d) : d_(d), entries_(d * d, MultiPoly(variables())) {}

const std::vector<std::string>& TensorValue::variables() {
  static const std::vector<std::string> vars{"p", "s"};
  return vars;
}

TensorValue TensorValue::identity(std::size_t d) {
  TensorValue out(d);
  for (std::size_t i = 0; i < d; ++i) out(i, i) = constant(Rational(1));
  return out;
}

TensorValue& TensorValue::operator+=(const TensorValue& rhs) {
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += rhs.entries_[k];
  return *this;
}

TensorValue& TensorValue::operator-=(const TensorValue& rhs) {
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= rhs.entries_[k];
  return *this;
}

TensorValue operator*(const TensorValue& a, const TensorValue& b) {
  TensorValue out(a.d_);
  for (std::size_t i = 0; i < a.d_; ++i)
    for (std::size_t j = 0; j < a.d_; ++j)
      for (std::size_t k = 0; k < a.d_; ++k) out(i, j) += a(i, k) * b(k, j);
  return out;
}

TensorValue operator*(const MultiPoly& c, const TensorValue& a) {
  TensorValue out(a.d_);
  for (std::size_t k = 0; k < a.entries_.size(); ++k) out.entries_[k] = c * a.entries_[k];
  return out;
}

MultiPoly TensorValue::trace() const {
  MultiPoly out(variables());
  for (std::size_t i = 0; i < d_; ++i) out += (*this)(i, i);
  return out;
}

TensorValue TensorValue::transpose() const {
  TensorValue out(d_);
  for (std::size_t i = 0; i < d_; ++i)
    for (std::size_t j = 0; j < d_; ++j) out(i, j) = (*this)(j, i);
  return out;
}

bool TensorValue::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.is_zero(); });
}

std::string TensorValue::first_nonzero() const {
  for (std::size_t i = 0; i < d_; ++i)
    for (std::size_t j = 0; j < d_; ++j)
      if (!(*this)(i, j).is_zero())
        return "(" + std::to_string(i) + "," + std::to_string(j) + "): " + (*this)(i, j).to_string();
  return {};
}

MultiPoly contract(const TensorValue& a, const TensorValue& b) {
  MultiPoly out(TensorValue::variables());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) out += a(i, j) * b(j, i);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

MultiPoly C(const Rational& c) { return TensorValue::constant(c); }

TensorValue outer(const std::vector<Rational>& x, const std::vector<Rational>& y) {
  TensorValue out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out(i, j) = C(x[i] * y[j]);
  return out;
}

TensorValue hessian(const FramePoint& fp) {
  TensorValue out(fp.d);
  for (std::size_t i = 0; i < fp.d; ++i)
    for (std::size_t j = 0; j < fp.d; ++j) out(i, j) = C(fp.H(i, j));
  return out;
}

std::vector<Rational> hess_grad(const FramePoint& fp) {
  std::vector<Rational> out(fp.d, Rational(0));
  for (std::size_t i = 0; i < fp.d; ++i)
    for (std::size_t j = 0; j < fp.d; ++j) out[i] += fp.H(i, j) * fp.grad[j];
  return out;
}

Rational dot(const std::vector<Rational>& x, const std::vector<Rational>& y) {
  Rational out(0);
  for (std::size_t i = 0; i < x.size(); ++i) out += x[i] * y[i];
  return out;
}

MultiPoly p_of(const FramePoint& fp) { return fp.symbolic_p ? TensorValue::symbol("p") : C(fp.p); }

CheckEntry poly_entry(const std::string& id, const std::string& ref, const MultiPoly& residual) {
  return exact_zero_entry(id, ref, RationalFunction(residual));
}

CheckEntry tensor_entry(const std::string& id, const std::string& ref, const TensorValue& residual) {
  CheckEntry e{id, ref, CheckStatus::exact_zero, "0", 0.0};
  if (!residual.is_zero()) {
    e.status = CheckStatus::fail;
    e.witness = residual.first_nonzero();
  }
  return e;
}

std::string tagged(const std::string& id, const std::string& suffix) { return suffix.empty() ? id : id + "@" + suffix; }

/// Orthogonal basis of the complement of g, by exact Gram-Schmidt on the unit vectors.
std::vector<std::vector<Rational>> orthogonal_complement(const std::vector<Rational>& g) {
  const std::size_t d = g.size();
  std::vector<std::vector<Rational>> basis{g};
  for (std::size_t k = 0; k < d && basis.size() < d; ++k) {
    std::vector<Rational> w(d, Rational(0));
    w[k] = Rational(1);
    for (const auto& b : basis) {
      const Rational c = dot(w, b) / dot(b, b);
      for (std::size_t i = 0; i < d; ++i) w[i] -= c * b[i];
    }
    if (dot(w, w).sign() > 0) basis.push_back(std::move(w));
  }
  basis.erase(basis.begin());
  return basis;
}

std::vector<MultiPoly> apply(const TensorValue& m, const std::vector<Rational>& x) {
  std::vector<MultiPoly> out(m.dim(), C(0));
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out[i] += m(i, j) * C(x[j]);
  return out;
}

}  // namespace

FrameTensors build_tensors(const FramePoint& fp) {
  fp.validate();
  const std::size_t d = fp.d;
  FrameTensors t;
  t.p = p_of(fp);
  t.s = TensorValue::symbol("s");
  const Rational q2 = fp.Q2();
  t.Q2 = C(q2);
  const Rational g2 = fp.grad_norm2();
  const auto hg = hess_grad(fp);
  const auto pm2 = t.p - C(2);
  const auto sQ2 = t.s * C(q2);  // Q^{p-2}
  const auto H = hessian(fp);
  const auto I = TensorValue::identity(d);

  t.Xvec.resize(d, C(0));
  for (std::size_t i = 0; i < d; ++i) t.Xvec[i] = sQ2 * C(fp.grad[i]);

  // X^i_j = Q^{p-2} v_ij + (p-2) Q^{p-4} (alpha^2 v v_j + beta^2 v_l v_lj) v_i
  std::vector<Rational> dq(d);
  for (std::size_t j = 0; j < d; ++j) dq[j] = fp.alpha * fp.alpha * fp.v * fp.grad[j] + fp.beta * fp.beta * hg[j];
  t.X = sQ2 * H + (pm2 * t.s) * outer(fp.grad, dq);
  t.divX = t.X.trace();

  const auto dinv = Rational(1) / Rational(static_cast<long>(d));
  t.E = t.X - (t.divX * C(dinv)) * I;
  t.F = t.E + (t.divX * C(fp.eps)) * I;
  t.L = sQ2 * (outer(fp.grad, fp.grad) - C(g2 / Rational(static_cast<long>(d)))* I);
  t.L = C(Rational(1) / fp.v) * t.L;

  t.f = C(fp.v * dot(fp.grad, hg) - g2 * g2);

  // F + ML = N1 + N2 with N1 = N3 N4
  t.N4 = sQ2 * H;
  t.N3 = I + (pm2 * C(fp.beta * fp.beta / q2)) * outer(fp.grad, fp.grad);
  t.N1 = t.s * (C(q2) * H + (pm2 * C(fp.beta * fp.beta)) * outer(fp.grad, hg));
  t.N2 = (pm2 * t.s * C(fp.alpha * fp.alpha * fp.v)) * outer(fp.grad, fp.grad) +
         (t.divX * C(fp.eps - dinv)) * I + C(fp.M) * t.L;
  return t;
}

CheckReport check_algebraic_identities(const FramePoint& fp, const std::string& suffix) {
  CheckReport r;
  const auto t = build_tensors(fp);
  const std::size_t d = fp.d;
  const Rational dd(static_cast<long>(d));
  const Rational g2 = fp.grad_norm2();
  const auto tr2 = t.divX * t.divX;
  const auto XX = contract(t.X, t.X);

  r.add(poly_entry(tagged("tensor.EE_contraction", suffix), "E.E = X.X - (trace X)^2/n",
                   contract(t.E, t.E) - XX + tr2 * C(Rational(1) / dd)));
  r.add(poly_entry(tagged("tensor.FF_contraction", suffix), "F.F = X.X + (n eps^2 - 1/n)(trace X)^2",
                   contract(t.F, t.F) - XX - tr2 * C(dd * fp.eps * fp.eps - Rational(1) / dd)));
  const auto s2 = t.s * t.s;
  r.add(poly_entry(tagged("tensor.LL_norm", suffix), "|L|^2 = (n-1)/n Q^{2p-4} v^-2 |grad v|^4",
                   contract(t.L, t.L) -
                       s2 * C(fp.Q2() * fp.Q2() * (dd - Rational(1)) / dd * g2 * g2 / (fp.v * fp.v))));
  r.add(poly_entry(tagged("tensor.FL_equals_EL", suffix), "F.L = E.L", contract(t.F, t.L) - contract(t.E, t.L)));

  // Q^{p-2} v_i v_j X_ij = (p-1) Q^{2p-4} v_ji v_i v_j - (p-2) alpha^2 v Q^{2p-6} f
  MultiPoly lhs = C(0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) lhs += t.X(i, j) * C(fp.grad[i] * fp.grad[j]);
  lhs = lhs * (t.s * t.Q2);
  const auto hg = hess_grad(fp);
  const auto rhs = (t.p - C(1)) * s2 * C(fp.Q2() * fp.Q2() * dot(fp.grad, hg)) -
                   (t.p - C(2)) * s2 * C(fp.alpha * fp.alpha * fp.v * fp.Q2()) * t.f;
  r.add(poly_entry(tagged("tensor.XVV_expansion", suffix),
                   "Q^{p-2} v_i v_j X_ij = (p-1) Q^{2p-4} v_ij v_i v_j - (p-2) alpha^2 v Q^{2p-6} f", lhs - rhs));

  // Chain rule through the polynomial jet v(x) = v + g.x + x^T H x / 2 at x = 0.
  std::vector<std::string> xs;
  for (std::size_t i = 0; i < d; ++i) xs.push_back("x" + std::to_string(i));
  MultiPoly vj(xs, fp.v);
  std::vector<MultiPoly> gj(d, MultiPoly(xs));
  for (std::size_t i = 0; i < d; ++i) {
    const auto xi = MultiPoly::variable(xs, xs[i]);
    vj += xi * fp.grad[i];
    gj[i] += MultiPoly(xs, fp.grad[i]);
    for (std::size_t j = 0; j < d; ++j) {
      const auto xj = MultiPoly::variable(xs, xs[j]);
      vj += xi * xj * (fp.H(i, j) / Rational(2));
      gj[i] += xj * fp.H(i, j);
    }
  }
  MultiPoly q2jet = vj * vj * (fp.alpha * fp.alpha);
  for (const auto& g : gj) q2jet += g * g * (fp.beta * fp.beta);
  const std::vector<Rational> origin(d, Rational(0));
  std::vector<Rational> dq(d);
  for (std::size_t j = 0; j < d; ++j) dq[j] = q2jet.derivative(j).evaluate(origin);
  // (Q^{p-2} v_i)_j = Q^{p-2} v_ij + (p-2)/2 Q^{p-4} (Q^2)_j v_i
  const TensorValue Xjet = (t.s * t.Q2) * hessian(fp) + ((t.p - C(2)) * t.s * C(Rational(1, 2))) * outer(fp.grad, dq);
  r.add(tensor_entry(tagged("tensor.X_chain_rule", suffix),
                     "X^i_j from differentiating the jet of Q^2 matches the expanded covariant derivative",
                     t.X - Xjet));
  return r;
}

CheckReport check_decomposition(const FramePoint& fp, const std::string& suffix) {
  CheckReport r;
  const auto t = build_tensors(fp);
  const std::size_t d = fp.d;
  const auto I = TensorValue::identity(d);
  const auto pm2 = t.p - C(2);
  const Rational b2 = fp.beta * fp.beta, g2 = fp.grad_norm2();

  r.add(tensor_entry(tagged("decomp.sum", suffix), "F + ML = N1 + N2", t.F + C(fp.M) * t.L - t.N1 - t.N2));
  r.add(tensor_entry(tagged("decomp.product", suffix), "N1 = N3 N4", t.N1 - t.N3 * t.N4));

  // den N3^{-1} = den I - (p-2) beta^2 v v^T, den = alpha^2 v^2 + (p-1) beta^2 |grad v|^2
  const auto den = C(fp.alpha * fp.alpha * fp.v * fp.v) + (t.p - C(1)) * C(b2 * g2);
  const TensorValue scaled_inv = den * I - (pm2 * C(b2)) * outer(fp.grad, fp.grad);
  r.add(tensor_entry(tagged("decomp.inverse", suffix), "N3 times the closed-form inverse is the identity",
                     t.N3 * scaled_inv - den * I));
  const auto sym = scaled_inv * t.N2;
  r.add(tensor_entry(tagged("decomp.inverse_N2_symmetric", suffix), "N3^{-1} N2 is symmetric", sym - sym.transpose()));

  // eigenpairs: g with mu, and the orthogonal complement of g with 1
  TensorValue eig(d);
  const auto mu = C(1) + pm2 * C(b2 * g2 / fp.Q2());
  if (g2.sign() > 0) {
    const auto ng = apply(t.N3, fp.grad);
    for (std::size_t i = 0; i < d; ++i) eig(0, i) = ng[i] - mu * C(fp.grad[i]);
    const auto comp = orthogonal_complement(fp.grad);
    for (std::size_t k = 0; k < comp.size(); ++k) {
      const auto nw = apply(t.N3, comp[k]);
      for (std::size_t i = 0; i < d; ++i) eig(k + 1 < d ? k + 1 : 0, i) += nw[i] - C(comp[k][i]);
    }
  } else {
    eig = t.N3 - I;
  }
  r.add(tensor_entry(tagged("decomp.N3_eigenpairs", suffix),
                     "N3 has eigenvalue 1 on the complement of grad v and 1 + (p-2) beta^2 |grad v|^2/Q^2 on grad v", eig));

  // mu Q^2 = alpha^2 v^2 + (p-1) beta^2 |grad v|^2, positive for p > 1
  if (fp.symbolic_p) {
    r.add(poly_entry(tagged("decomp.N3_eigenvalue_form", suffix), "Q^2 mu = alpha^2 v^2 + (p-1) beta^2 |grad v|^2",
                     mu * t.Q2 - den));
  } else {
    const Rational muv = mu.constant_value();
    CheckEntry e{tagged("decomp.N3_positive", suffix), "N3 is positive definite for p > 1",
                 muv.sign() > 0 ? CheckStatus::pass : CheckStatus::fail, "mu = " + muv.to_string(), 0.0};
    r.add(std::move(e));
  }
  return r;
}

CheckReport check_kernel_trace(const FramePoint& fp, const std::string& suffix) {
  CheckReport r;
  const auto t = build_tensors(fp);
  const Rational dd(static_cast<long>(fp.d));
  r.add(poly_entry(tagged("kernel.L_tracefree", suffix), "trace L = 0", t.L.trace()));
  r.add(poly_entry(tagged("kernel.E_tracefree", suffix), "trace E = 0", t.E.trace()));
  r.add(poly_entry(tagged("kernel.trace", suffix), "trace(F + ML) = n eps div X, so F + ML = 0 forces div X = 0",
                   (t.F + C(fp.M) * t.L).trace() - t.divX * C(dd * fp.eps)));
  return r;
}

// ---------------------------------------------------------------------------

FramePoint random_frame_point(std::mt19937_64& rng, std::size_t d) {
  std::uniform_int_distribution<long> num(-8, 8);
  std::uniform_int_distribution<int> den_pick(0, 2);
  auto entry = [&] {
    static constexpr long dens[] = {1, 2, 4};
    return Rational(mpz_class(num(rng)), mpz_class(dens[den_pick(rng)]));
  };
  auto nonzero = [&] {
    for (;;) {
      const Rational x = entry();
      if (!x.is_zero()) return x;
    }
  };
  FramePoint fp;
  fp.d = d;
  fp.v = Rational(mpz_class(std::uniform_int_distribution<long>(2, 16)(rng)), mpz_class(4));
  fp.grad.resize(d);
  for (auto& g : fp.grad) g = entry();
  fp.hess.assign(d * d, Rational(0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) fp.hess[i * d + j] = fp.hess[j * d + i] = entry();
  fp.alpha = nonzero();
  fp.beta = nonzero();
  // p in (1, 4]
  fp.p = Rational(mpz_class(std::uniform_int_distribution<long>(5, 16)(rng)), mpz_class(4));
  fp.eps = entry();
  fp.M = entry();
  return fp;
}

CheckReport run_tensor_suite(const TensorSuiteOptions& options) {
  CheckReport out;
  for (std::size_t d : options.dims) {
    // id -> (aggregated entry, count)
    std::map<std::string, CheckEntry> agg;
    for (int k = 0; k < options.samples; ++k) {
      std::seed_seq seq{options.seed, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(k)};
      std::mt19937_64 rng(seq);
      FramePoint fp = random_frame_point(rng, d);
      fp.symbolic_p = options.symbolic_p;
      CheckReport r;
      r.merge(check_algebraic_identities(fp));
      r.merge(check_decomposition(fp));
      r.merge(check_kernel_trace(fp));
      for (const auto& e : r.entries()) {
        auto [it, fresh] = agg.try_emplace(e.id, e);
        CheckEntry& a = it->second;
        if (fresh) continue;
        if (a.status == CheckStatus::fail) continue;
        if (e.status == CheckStatus::fail) {
          a.status = CheckStatus::fail;
          a.witness = "sample " + std::to_string(k) + ": " + e.witness;
        } else if (e.status == CheckStatus::pass) {
          a.status = CheckStatus::pass;
        }
      }
    }
    for (auto& [id, e] : agg) {
      e.id = id + "@d=" + std::to_string(d);
      if (e.status != CheckStatus::fail) e.witness = "holds at " + std::to_string(options.samples) + " frame points";
      out.add(e);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t d) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) (i == j ? diag : off) += a[i * d + j] * a[i * d + j];
    if (off <= 1e-30 * std::max(diag, 1e-300)) break;
    for (std::size_t pi = 0; pi < d; ++pi) {
      for (std::size_t qi = pi + 1; qi < d; ++qi) {
        const double apq = a[pi * d + qi];
        if (apq == 0.0) continue;
        const double theta = (a[qi * d + qi] - a[pi * d + pi]) / (2.0 * apq);
        const double tt = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(tt * tt + 1.0), s = tt * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a[k * d + pi], akq = a[k * d + qi];
          a[k * d + pi] = c * akp - s * akq;
          a[k * d + qi] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a[pi * d + k], aqk = a[qi * d + k];
          a[pi * d + k] = c * apk - s * aqk;
          a[qi * d + k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(d);
  for (std::size_t i = 0; i < d; ++i) ev[i] = a[i * d + i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

TraceInequalitySample trace_inequality_sample(const std::vector<double>& A, const std::vector<double>& B, std::size_t d) {
  std::vector<double> AB(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t j = 0; j < d; ++j) AB[i * d + j] += A[i * d + k] * B[k * d + j];
  double lhs = 0.0, tr2 = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      lhs += AB[i * d + j] * AB[i * d + j];
      tr2 += AB[i * d + j] * AB[j * d + i];
    }
  const auto ev = jacobi_eigenvalues(A, d);
  const double ratio = ev.back() / ev.front();
  TraceInequalitySample out;
  out.lhs = lhs;
  out.rhs = static_cast<double>(d) * ratio * ratio * tr2;
  out.slack = (out.rhs - out.lhs) / std::max({std::abs(out.lhs), std::abs(out.rhs), 1.0});
  return out;
}

CheckReport check_trace_inequality(const std::vector<std::size_t>& dims, int samples, std::uint64_t seed, double tol) {
  CheckReport report;
  for (std::size_t d : dims) {
    if (d < 1 || d > 6) throw std::invalid_argument("trace inequality dimensions must lie in 1..6");
    int violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    std::string witness;
    for (int k = 0; k < samples; ++k) {
      std::seed_seq seq{seed, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(k)};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      std::vector<double> R(d * d), A(d * d, 0.0), B(d * d);
      for (auto& x : R) x = u(rng);
      // A = R R^T + delta I, delta spread over decades so conditioning varies
      const double delta = std::pow(10.0, -3.0 * (u(rng) + 1.0) / 2.0);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          for (std::size_t m = 0; m < d; ++m) A[i * d + j] += R[i * d + m] * R[j * d + m];
          if (i == j) A[i * d + j] += delta;
        }
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) B[i * d + j] = B[j * d + i] = u(rng);
      const auto s = trace_inequality_sample(A, B, d);
      if (s.slack < worst) worst = s.slack;
      if (s.slack < -tol && violations++ == 0) witness = "sample " + std::to_string(k) + " slack " + std::to_string(s.slack);
    }
    CheckEntry e{"matrix.trace_inequality@d=" + std::to_string(d),
                 "trace(AB(AB)^T) <= n (lmax/lmin)^2 trace((AB)^2) for A positive definite, B symmetric",
                 violations == 0 ? CheckStatus::pass : CheckStatus::fail, {}, worst};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", worst);
    e.witness = violations == 0 ? std::to_string(samples) + " samples, minimum relative slack " + buf
                                : std::to_string(violations) + " violations, first at " + witness;
    report.add(std::move(e));
  }
  return report;
}

}  // namespace plap
