#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dwpf/error.hpp"

namespace dwpf {

using cplx = std::complex<double>;

enum class BracketMode { Elliptic, Trigonometric, Rational };

constexpr std::string_view to_string(BracketMode m) {
  switch (m) {
    case BracketMode::Elliptic: return "elliptic";
    case BracketMode::Trigonometric: return "trig";
    case BracketMode::Rational: return "rational";
  }
  return "?";
}

// Evaluation context for [w]. Construct through the factories; they validate.
class BracketContext {
 public:
  static BracketContext trigonometric(cplx gamma) {
    BracketContext c;
    c.mode_ = BracketMode::Trigonometric;
    c.gamma_ = gamma;
    c.validate();
    return c;
  }

  static BracketContext elliptic(cplx gamma, cplx tau, double series_tol = 1e-18, int max_terms = 64) {
    BracketContext c;
    c.mode_ = BracketMode::Elliptic;
    c.gamma_ = gamma;
    c.tau_ = tau;
    c.series_tol_ = series_tol;
    c.max_terms_ = max_terms;
    c.validate();
    c.nome_ = std::exp(cplx(0.0, std::numbers::pi) * tau);
    return c;
  }

  static BracketContext rational() {
    BracketContext c;
    c.mode_ = BracketMode::Rational;
    c.gamma_ = 1.0;
    return c;
  }

  BracketMode mode() const noexcept { return mode_; }
  cplx gamma() const noexcept { return gamma_; }
  cplx tau() const noexcept { return tau_; }
  cplx nome() const noexcept { return nome_; }  // q = e^{iπτ}
  double series_tol() const noexcept { return series_tol_; }
  int max_terms() const noexcept { return max_terms_; }

  bool is_elliptic() const noexcept { return mode_ == BracketMode::Elliptic; }

  // Shift w -> w + period with [w + period] = -[w]; rational mode has none.
  cplx half_period() const {
    if (mode_ == BracketMode::Rational)
      throw Error(ErrorKind::InvalidContext, "rational mode has no period");
    return std::numbers::pi / gamma_;
  }

 private:
  BracketContext() = default;

  void validate() const {
    auto finite = [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); };
    if (!finite(gamma_) || gamma_ == cplx(0.0))
      throw Error(ErrorKind::InvalidContext, "gamma must be finite and nonzero");
    if (mode_ == BracketMode::Elliptic) {
      if (!finite(tau_) || !(tau_.imag() > 0.0))
        throw Error(ErrorKind::InvalidContext, "elliptic mode needs Im(tau) > 0");
      if (!(series_tol_ > 0.0)) throw Error(ErrorKind::InvalidContext, "series_tol must be > 0");
      if (max_terms_ < 1) throw Error(ErrorKind::InvalidContext, "max_terms must be >= 1");
    }
  }

  BracketMode mode_ = BracketMode::Trigonometric;
  cplx gamma_{1.0, 0.0};
  cplx tau_{0.0, 1.0};
  cplx nome_{0.0, 0.0};
  double series_tol_ = 1e-18;
  int max_terms_ = 64;
};

namespace detail {

// e^{-iπτ/4} θ1(u;τ)/2 = Σ_{n≥0} (-1)^n q^{n(n+1)} sin((2n+1)u); the q^{1/4} cancels.
// Stops once the bound |q|^{n(n+1)} e^{(2n+1)|Im u|} on the next term drops below tol·|sum|.
inline cplx theta_bracket(const BracketContext& ctx, cplx u) {
  if (u == cplx(0.0)) return 0.0;
  const cplx q = ctx.nome();
  const cplx q2 = q * q;
  const double log_aq = std::log(std::abs(q));
  const double im = std::abs(u.imag());
  const double log_tol = std::log(ctx.series_tol());

  cplx sum = std::sin(u);
  cplx qpow = 1.0;  // q^{n(n+1)}
  cplx q2n = q2;    // q^{2n}
  for (int n = 1;; ++n) {
    const double log_bound = double(n) * double(n + 1) * log_aq + double(2 * n + 1) * im;
    if (log_bound < log_tol + std::log(std::abs(sum))) return sum;
    if (n >= ctx.max_terms())
      throw Error(ErrorKind::SeriesDivergence,
                  "theta series did not converge within max_terms=" + std::to_string(ctx.max_terms()));
    qpow *= q2n;
    q2n *= q2;
    const cplx term = qpow * std::sin(double(2 * n + 1) * u);
    sum += (n % 2 == 0) ? term : -term;
  }
}

}  // namespace detail

// The bracket [w]: sin(γw), e^{-iπτ/4}θ1(γw;τ)/2, or w.
inline cplx bracket(const BracketContext& ctx, cplx w) {
  switch (ctx.mode()) {
    case BracketMode::Trigonometric: return std::sin(ctx.gamma() * w);
    case BracketMode::Rational: return w;
    case BracketMode::Elliptic: return detail::theta_bracket(ctx, ctx.gamma() * w);
  }
  return 0.0;
}

inline cplx bracket_product(const BracketContext& ctx, std::span<const cplx> ws) {
  cplx p = 1.0;
  for (cplx w : ws) p *= bracket(ctx, w);
  return p;
}

inline cplx bracket_product(const BracketContext& ctx, std::initializer_list<cplx> ws) {
  return bracket_product(ctx, std::span<const cplx>(ws.begin(), ws.size()));
}

// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(std::size_t dim = 1) : dim_(dim), a_(dim * dim, cplx(0.0)) {
    if (dim == 0) throw Error(ErrorKind::InvalidContext, "matrix dim must be >= 1");
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }
  cplx& operator()(std::size_t r, std::size_t c) { return a_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return a_[r * dim_ + c]; }
  std::span<const cplx> entries() const noexcept { return a_; }

  ComplexMatrix operator*(const ComplexMatrix& o) const {
    ComplexMatrix r(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t k = 0; k < dim_; ++k) {
        const cplx aik = (*this)(i, k);
        if (aik == cplx(0.0)) continue;
        for (std::size_t j = 0; j < dim_; ++j) r(i, j) += aik * o(k, j);
      }
    return r;
  }

  ComplexMatrix operator-(const ComplexMatrix& o) const {
    ComplexMatrix r(dim_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (const cplx& v : a_) n += (v != cplx(0.0));
    return n;
  }

 private:
  std::size_t dim_;
  std::vector<cplx> a_;
};

// LU with partial pivoting. Returns exactly 0 once a pivot column is numerically null.
inline cplx determinant(ComplexMatrix m) {
  const std::size_t n = m.dim();
  cplx det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(m(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      const double v = std::abs(m(r, k));
      if (v > best) { best = v; piv = r; }
    }
    if (best < 1e-300) return 0.0;
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(k, c), m(piv, c));
      det = -det;
    }
    const cplx pk = m(k, k);
    det *= pk;
    for (std::size_t r = k + 1; r < n; ++r) {
      const cplx f = m(r, k) / pk;
      if (f == cplx(0.0)) continue;
      for (std::size_t c = k + 1; c < n; ++c) m(r, c) -= f * m(k, c);
    }
  }
  return det;
}

// max-norm of (a - b) relative to max-norm of a
inline double relative_max_residual(const ComplexMatrix& a, const ComplexMatrix& b) {
  const double den = a.max_abs();
  const double num = (a - b).max_abs();
  return den > 0.0 ? num / den : num;
}

}  // namespace dwpf
