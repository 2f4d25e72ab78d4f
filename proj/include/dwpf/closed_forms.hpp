#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dwpf/models.hpp"
#include "dwpf/permutations.hpp"

namespace dwpf {

namespace detail {

// Dense L x L table of precomputed brackets.
struct Table {
  int n = 0;
  std::vector<cplx> v;
  explicit Table(int n_) : n(n_), v(std::size_t(n_ * n_), cplx(1.0)) {}
  cplx& operator()(int a, int b) { return v[std::size_t(a * n + b)]; }
  cplx operator()(int a, int b) const { return v[std::size_t(a * n + b)]; }
};

template <class F>
Table make_table(int L, F&& f) {
  Table t(L);
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b) t(a, b) = f(a, b);
  return t;
}

inline cplx unit_power(const ModelParams& p) { return std::pow(p.br(1.0), p.size()); }

inline void require_entries_nonzero(const ModelParams& p, bool reflecting) {
  if (p.allow_special) return;
  const int L = p.size();
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      const std::string tag = std::to_string(i + 1) + "," + std::to_string(j + 1);
      require_bracket(p, p.x[i] - p.y[j], guard::kGeneric, ErrorKind::GenericPositionViolation, "[x-y] at " + tag);
      require_bracket(p, p.x[i] - p.y[j] + 1.0, guard::kGeneric, ErrorKind::GenericPositionViolation,
                      "[x-y+1] at " + tag);
      if (reflecting) {
        require_bracket(p, p.x[i] + p.y[j], guard::kGeneric, ErrorKind::GenericPositionViolation,
                        "[x+y] at " + tag);
        require_bracket(p, p.x[i] + p.y[j] + 1.0, guard::kGeneric, ErrorKind::GenericPositionViolation,
                        "[x+y+1] at " + tag);
      }
    }
}

inline PartitionValue finish_sum(const SumResult& s, cplx factor, Method m) {
  const cplx value = factor * s.sum;
  return {value, m, positive_scale(std::abs(factor) * s.max_term, value), s.terms};
}

}  // namespace detail

// ---------------- six-vertex ----------------

inline PartitionValue izergin_determinant(const ModelParams& p) {
  require_sizes(p);
  require_six_vertex_mode(p, "izergin_determinant");
  require_distinct_x(p);
  require_distinct_y(p);
  detail::require_entries_nonzero(p, false);
  const int L = p.size();
  ComplexMatrix M{std::size_t(L)};
  cplx pref = detail::unit_power(p);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      const cplx e = p.br(p.x[i] - p.y[j] + 1.0) * p.br(p.x[i] - p.y[j]);
      pref *= e;
      M(std::size_t(i), std::size_t(j)) = 1.0 / e;
    }
  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j) pref /= p.br(p.x[i] - p.x[j]) * p.br(p.y[j] - p.y[i]);
  const cplx value = pref * determinant(std::move(M));
  return {value, Method::Izergin, detail::positive_scale(0.0, value)};
}

inline PartitionValue symmetrized_sum(const ModelParams& p, const Parallelism& par = {}) {
  require_sizes(p);
  require_distinct_x(p);
  const int L = p.size();
  const auto T1 = detail::make_table(L, [&](int a, int j) { return p.br(p.x[a] - p.y[j]); });
  const auto T2 = detail::make_table(L, [&](int a, int i) { return p.br(p.x[a] - p.y[i] + 1.0); });
  const auto Q = detail::make_table(L, [&](int a, int b) {
    return a == b ? cplx(1.0) : p.br(p.x[a] - p.x[b] + 1.0) / p.br(p.x[a] - p.x[b]);
  });
  const auto s = permutation_sum(
      L,
      [&](std::span<const int> s_, int) {
        cplx t = 1.0;
        for (int i = 0; i < L; ++i)
          for (int j = i + 1; j < L; ++j) t *= T1(s_[i], j) * T2(s_[j], i) * Q(s_[i], s_[j]);
        return t;
      },
      par);
  return detail::finish_sum(s, detail::unit_power(p), Method::SymmetrizedSum);
}

inline PartitionValue antisym_sum(const ModelParams& p, const Parallelism& par = {}) {
  require_sizes(p);
  require_distinct_x(p);
  const int L = p.size();
  const auto T1 = detail::make_table(L, [&](int a, int j) { return p.br(p.x[a] - p.y[j]); });
  const auto T2 = detail::make_table(L, [&](int a, int i) { return p.br(p.x[a] - p.y[i] + 1.0); });
  const auto V = detail::make_table(L, [&](int a, int b) { return p.br(p.x[a] - p.x[b] + 1.0); });
  const auto s = permutation_sum(
      L,
      [&](std::span<const int> s_, int sign) {
        cplx t = double(sign);
        for (int i = 0; i < L; ++i)
          for (int j = i + 1; j < L; ++j) t *= T1(s_[i], j) * T2(s_[j], i) * V(s_[i], s_[j]);
        return t;
      },
      par);
  cplx f = detail::unit_power(p);
  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j) f /= p.br(p.x[i] - p.x[j]);
  return detail::finish_sum(s, f, Method::AntisymSum);
}

inline PartitionValue lagrange_sum(const ModelParams& p, const Parallelism& par = {}) {
  require_sizes(p);
  require_distinct_y(p);
  const int L = p.size();
  const auto Y1 = detail::make_table(L, [&](int i, int b) { return p.br(p.x[i] - p.y[b]); });
  const auto Y2 = detail::make_table(L, [&](int i, int b) { return p.br(p.x[i] - p.y[b] + 1.0); });
  const auto QY = detail::make_table(L, [&](int a, int b) {
    return a == b ? cplx(1.0) : p.br(p.y[a] - p.y[b] + 1.0) / p.br(p.y[a] - p.y[b]);
  });
  const auto s = permutation_sum(
      L,
      [&](std::span<const int> s_, int) {
        cplx t = 1.0;
        for (int i = 0; i < L; ++i)
          for (int j = i + 1; j < L; ++j) t *= Y1(i, s_[j]) * Y2(j, s_[i]) * QY(s_[i], s_[j]);
        return t;
      },
      par);
  return detail::finish_sum(s, detail::unit_power(p), Method::LagrangeSum);
}

// ---------------- reflecting end ----------------

// ∏_i [κ-y_i, 2x_i][z+κ+y_i, z+(2i-L-2)] / [z+κ+x_i, z+(L-i)], i 1-based; z-brackets dropped if z absent.
inline cplx tfk_prefactor(const ModelParams& p) {
  const cplx k = p.kappa_or_throw();
  const int L = p.size();
  cplx f = 1.0;
  for (int i = 1; i <= L; ++i) {
    const cplx xi = p.x[std::size_t(i - 1)], yi = p.y[std::size_t(i - 1)];
    require_zbracket(p, k + xi, ErrorKind::BoundaryPole, "[z+kappa+x" + std::to_string(i) + "]");
    require_zbracket(p, double(L - i), ErrorKind::DynamicalPole, "[z+" + std::to_string(L - i) + "]");
    f *= p.br(k - yi) * p.br(2.0 * xi) * p.zbr(k + yi) * p.zbr(double(2 * i - L - 2)) /
         (p.zbr(k + xi) * p.zbr(double(L - i)));
  }
  return f;
}

inline PartitionValue tfk_determinant(const ModelParams& p) {
  require_sizes(p);
  require_distinct_x(p);
  require_distinct_y(p);
  require_reflecting_generic(p);
  detail::require_entries_nonzero(p, true);
  const int L = p.size();
  cplx pref = tfk_prefactor(p) * detail::unit_power(p);
  ComplexMatrix M{std::size_t(L)};
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      const cplx e = p.br(p.x[i] - p.y[j] + 1.0) * p.br(p.x[i] - p.y[j]) * p.br(p.x[i] + p.y[j] + 1.0) *
                     p.br(p.x[i] + p.y[j]);
      pref *= e;
      M(std::size_t(i), std::size_t(j)) = 1.0 / e;
    }
  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j)
      pref /= p.br(p.x[i] + p.x[j] + 1.0) * p.br(p.x[i] - p.x[j]) * p.br(p.y[j] + p.y[i]) * p.br(p.y[j] - p.y[i]);
  const cplx value = pref * determinant(std::move(M));
  return {value, Method::TfkDeterminant, detail::positive_scale(0.0, value)};
}

// The two terms of m_n(x_1..x_n), n = xs.size(), against y_1..y_n of p.
inline std::pair<cplx, cplx> m_n_terms(const ModelParams& p, std::span<const cplx> xs) {
  const cplx k = p.kappa_or_throw();
  const int n = int(xs.size());
  const cplx xn = xs[std::size_t(n - 1)], yn = p.y[std::size_t(n - 1)];
  const double dn = double(n);
  const cplx den = p.br(k + yn) * p.br(2.0 * xn + 1.0) * p.zbr(k - yn) * p.zbr(dn);
  cplx t1 = p.br(k + xn) * p.br(xn + yn + 1.0) * p.zbr(k - xn) * p.zbr(dn + xn - yn) / den;
  cplx t2 = ((n - 1) % 2 == 0 ? 1.0 : -1.0) * p.br(k - xn - 1.0) * p.br(xn - yn) * p.zbr(k + xn + 1.0) *
            p.zbr(dn - 1.0 - xn - yn) / den;
  for (int j = 0; j < n - 1; ++j) {
    const cplx xj = xs[std::size_t(j)], yj = p.y[std::size_t(j)];
    t1 *= p.br(xn - yj + 1.0) * p.br(xn + yj + 1.0) * p.br(xj - xn + 1.0) * p.br(xj + xn);
    t2 *= p.br(xn - yj) * p.br(xn + yj) * p.br(xn - xj + 1.0) * p.br(xn + xj + 2.0);
  }
  return {t1, t2};
}

inline PartitionValue refl_symmetrized_sum(const ModelParams& p, const Parallelism& par = {}) {
  require_sizes(p);
  require_distinct_x(p);
  require_reflecting_generic(p);
  const cplx k = p.kappa_or_throw();
  const int L = p.size();
  for (int i = 0; i < L; ++i) {
    require_bracket(p, 2.0 * p.x[i] + 1.0, guard::kPole, ErrorKind::ReflectionPole,
                    "[2x" + std::to_string(i + 1) + "+1]");
    require_zbracket(p, double(i + 1), ErrorKind::DynamicalPole, "[z+" + std::to_string(i + 1) + "]");
  }
  const cplx pre = tfk_prefactor(p) * detail::unit_power(p);

  // Column n (0-based) of A1/A2 is the leading factor of m_{n+1} with x_{σ(n+1)} = x_a.
  const auto A1 = detail::make_table(L, [&](int a, int n) {
    const cplx xa = p.x[a], yn = p.y[n];
    const double dn = double(n + 1);
    return p.br(k + xa) * p.br(xa + yn + 1.0) * p.zbr(k - xa) * p.zbr(dn + xa - yn) /
           (p.br(k + yn) * p.br(2.0 * xa + 1.0) * p.zbr(k - yn) * p.zbr(dn));
  });
  const auto A2 = detail::make_table(L, [&](int a, int n) {
    const cplx xa = p.x[a], yn = p.y[n];
    const double dn = double(n + 1);
    return (n % 2 == 0 ? 1.0 : -1.0) * p.br(k - xa - 1.0) * p.br(xa - yn) * p.zbr(k + xa + 1.0) *
           p.zbr(dn - 1.0 - xa - yn) / (p.br(k + yn) * p.br(2.0 * xa + 1.0) * p.zbr(k - yn) * p.zbr(dn));
  });
  const auto P1 = detail::make_table(L, [&](int a, int j) { return p.br(p.x[a] - p.y[j] + 1.0) * p.br(p.x[a] + p.y[j] + 1.0); });
  const auto P2 = detail::make_table(L, [&](int a, int j) { return p.br(p.x[a] - p.y[j]) * p.br(p.x[a] + p.y[j]); });
  const auto X1 = detail::make_table(L, [&](int b, int a) { return p.br(p.x[b] - p.x[a] + 1.0) * p.br(p.x[b] + p.x[a]); });
  const auto X2 = detail::make_table(L, [&](int a, int b) { return p.br(p.x[a] - p.x[b] + 1.0) * p.br(p.x[a] + p.x[b] + 2.0); });
  const auto C = detail::make_table(L, [&](int a, int j) { return p.br(p.x[a] - p.y[j]) * p.br(p.x[a] + p.y[j] + 1.0); });
  const auto E = detail::make_table(L, [&](int a, int b) {
    return a == b ? cplx(1.0) : 1.0 / (p.br(p.x[a] - p.x[b]) * p.br(p.x[a] + p.x[b] + 1.0));
  });

  const auto s = permutation_sum(
      L,
      [&](std::span<const int> sg, int) {
        cplx t = 1.0;
        for (int n = 0; n < L; ++n) {
          const int a = sg[n];
          cplx t1 = A1(a, n), t2 = A2(a, n);
          for (int j = 0; j < n; ++j) {
            t1 *= P1(a, j) * X1(sg[j], a);
            t2 *= P2(a, j) * X2(a, sg[j]);
          }
          t *= t1 + t2;
        }
        for (int i = 0; i < L; ++i)
          for (int j = i + 1; j < L; ++j) t *= C(sg[i], j) * E(sg[i], sg[j]);
        return t;
      },
      par);
  return detail::finish_sum(s, pre, Method::ReflSymmetrizedSum);
}

namespace detail {

inline SumResult z_ell_sum(const ModelParams& p, const Parallelism& par) {
  const int L = p.size();
  const auto H = make_table(L, [&](int a, int i) {  // [z+i+x_a-y_i]/[z+i], i 1-based
    return p.zbr(double(i + 1) + p.x[a] - p.y[i]) / p.zbr(double(i + 1));
  });
  const auto T1 = make_table(L, [&](int a, int j) { return p.br(p.x[a] - p.y[j]); });
  const auto T2 = make_table(L, [&](int a, int i) { return p.br(p.x[a] - p.y[i] + 1.0); });
  const auto Q = make_table(L, [&](int a, int b) {
    return a == b ? cplx(1.0) : p.br(p.x[a] - p.x[b] + 1.0) / p.br(p.x[a] - p.x[b]);
  });
  return permutation_sum(
      L,
      [&](std::span<const int> s_, int) {
        cplx t = 1.0;
        for (int i = 0; i < L; ++i) {
          t *= H(s_[i], i);
          for (int j = i + 1; j < L; ++j) t *= T1(s_[i], j) * T2(s_[j], i) * Q(s_[i], s_[j]);
        }
        return t;
      },
      par);
}

inline void require_z_ell_poles(const ModelParams& p) {
  for (int i = 1; i <= p.size(); ++i)
    require_zbracket(p, double(i), ErrorKind::DynamicalPole, "[z+" + std::to_string(i) + "]");
}

inline ModelParams reflected(const ModelParams& p, std::uint32_t mask) {
  ModelParams q = p;
  for (int i = 0; i < p.size(); ++i)
    if ((mask >> i) & 1U) q.x[std::size_t(i)] = -p.x[std::size_t(i)] - 1.0;
  return q;
}

}  // namespace detail

inline PartitionValue z_ell(const ModelParams& p, const Parallelism& par = {}) {
  require_sizes(p);
  require_distinct_x(p);
  detail::require_z_ell_poles(p);
  return detail::finish_sum(detail::z_ell_sum(p, par), detail::unit_power(p), Method::ZEll);
}

namespace detail {

// Σ_r over the crossing group. signed_form: pull ∏[2x_i+1] and [κ+y_i] out with sgn(r).
inline PartitionValue crossing_sum_impl(const ModelParams& p, const Parallelism& par, bool signed_form) {
  require_sizes(p);
  require_distinct_x(p);
  require_reflecting_generic(p);
  require_z_ell_poles(p);
  const cplx k = p.kappa_or_throw();
  const int L = p.size();
  for (int i = 0; i < L; ++i)
    require_bracket(p, 2.0 * p.x[i] + 1.0, guard::kPole, ErrorKind::ReflectionPole,
                    "[2x" + std::to_string(i + 1) + "+1]");
  cplx outer = tfk_prefactor(p);
  if (signed_form)
    for (int i = 0; i < L; ++i) outer /= p.br(k + p.y[i]) * p.br(2.0 * p.x[i] + 1.0);

  const Parallelism inner{1, par.serial_max_L};
  const auto s = reflection_sum(
      L,
      [&](std::uint32_t mask, int sign) {
        const ModelParams q = reflected(p, mask);
        cplx f = signed_form ? cplx(double(sign)) : cplx(1.0);
        for (int i = 0; i < L; ++i) {
          f *= q.br(k + q.x[i]) * q.zbr(k - q.x[i]) / q.zbr(k - q.y[i]);
          if (!signed_form) f /= q.br(k + q.y[i]) * q.br(2.0 * q.x[i] + 1.0);
          for (int j = i + 1; j < L; ++j) f *= q.br(q.x[i] + q.x[j]) / q.br(q.x[i] + q.x[j] + 1.0);
          for (int j = 0; j < L; ++j) f *= q.br(q.x[i] + q.y[j] + 1.0);
        }
        const SumResult z = z_ell_sum(q, inner);
        const cplx zf = unit_power(q);
        // fold the magnitude of the largest inner summand into this term's scale
        return std::pair<cplx, double>{f * zf * z.sum, std::abs(f * zf) * z.max_term};
      },
      par);
  return finish_sum(s, outer, Method::CrossingSymmetrizedSum);
}

}  // namespace detail

inline PartitionValue crossing_symmetrized_sum(const ModelParams& p, const Parallelism& par = {}) {
  return detail::crossing_sum_impl(p, par, false);
}

// Same value, written with sgn(r) and ∏[κ+y_i, 2x_i+1] taken outside the sum.
inline PartitionValue crossing_symmetrized_sum_signed(const ModelParams& p, const Parallelism& par = {}) {
  return detail::crossing_sum_impl(p, par, true);
}

// Crossing-symmetric renormalisation: Z times prod_i [z+kappa+x_i]/[2x_i] (z dropped: 1/[2x_i]).
inline cplx renormalized(const ModelParams& p, cplx value) {
  const cplx k = p.kappa_or_throw();
  for (cplx xi : p.x) value *= p.zbr(k + xi) / p.br(2.0 * xi);
  return value;
}

inline PartitionValue six_vertex_refl_formula(const ModelParams& p, const Parallelism& par = {}) {
  require_sizes(p);
  require_six_vertex_mode(p, "six_vertex_refl_formula");
  if (p.z) throw Error(ErrorKind::InvalidContext, "six_vertex_refl_formula needs z absent");
  require_distinct_x(p);
  require_reflecting_generic(p);
  const cplx k = p.kappa_or_throw();
  const int L = p.size();
  const SixVertexWeights w(p.ctx);
  auto kp = [&](cplx v) { return p.br(k + v); };
  auto km = [&](cplx v) { return p.br(k - v); };
  cplx outer = 1.0;
  for (int i = 0; i < L; ++i) {
    const cplx a2 = w.a(2.0 * p.x[i]);
    if (std::abs(a2) < guard::kPole) throw Error(ErrorKind::ReflectionPole, "guard [2x+1] violated");
    outer *= km(p.y[i]) * w.b(2.0 * p.x[i]) / (kp(p.y[i]) * a2);
  }
  const auto s = reflection_sum(
      L,
      [&](std::uint32_t mask, int sign) {
        const ModelParams q = detail::reflected(p, mask);
        cplx f = double(sign);
        for (int i = 0; i < L; ++i) {
          f *= kp(q.x[i]);
          for (int j = i + 1; j < L; ++j) f *= w.b(q.x[i] + q.x[j]) / w.a(q.x[i] + q.x[j]);
          for (int j = 0; j < L; ++j) f *= w.a(q.x[i] + q.y[j]);
        }
        const PartitionValue z = izergin_determinant(q);
        return std::pair<cplx, double>{f * z.value, std::abs(f) * z.scale};
      },
      par);
  return detail::finish_sum(s, outer, Method::SixVertexReflFormula);
}

}  // namespace dwpf
