#pragma once

#include <bit>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "dwpf/closed_forms.hpp"

namespace dwpf {

struct CoeffSet {
  cplx m0{0.0};
  std::vector<cplx> mi;  // M_1..M_L
  cplx x0{0.0};
  ModelParams context;
};

struct Eigenvalues {
  cplx up_A{0.0}, up_Dtilde{0.0}, down_A{0.0};
};

// Λ^↑_A, Λ^↑_D̃, Λ^↓_A at spectral parameter x for the size-L problem in p.
inline Eigenvalues eigenvalues(const ModelParams& p, cplx x) {
  const cplx k = p.kappa_or_throw();
  const double L = double(p.size());
  cplx plus = 1.0, minus = 1.0;  // ∏[x-y+1, x+y+1], ∏[x-y, x+y]
  for (cplx yj : p.y) {
    plus *= p.br(x - yj + 1.0) * p.br(x + yj + 1.0);
    minus *= p.br(x - yj) * p.br(x + yj);
  }
  const cplx b1 = p.br(1.0), b2x = p.br(2.0 * x), b2x1 = p.br(2.0 * x + 1.0);
  Eigenvalues e;
  e.up_A = p.br(k + x) * p.zbr(k - x) / p.zbr(k + x) * plus;
  e.up_Dtilde = p.br(k - x - 1.0) * b2x * p.zbr(k + x + 1.0) * p.zbr(-L) /
                (b2x1 * p.zbr(k + x) * p.zbr(-(L - 1.0))) * minus;
  e.down_A = p.br(k - x) * b1 * p.zbr(L - 1.0 - 2.0 * x) / (b2x1 * p.zbr(L - 1.0)) * plus +
             p.br(k + x + 1.0) * b2x * p.zbr(k - x - 1.0) * p.zbr(L) / (b2x1 * p.zbr(k + x) * p.zbr(L - 1.0)) * minus;
  return e;
}

inline CoeffSet coeffs_6v(const ModelParams& p, cplx x0) {
  require_sizes(p);
  const int L = p.size();
  for (int i = 0; i < L; ++i)
    require_bracket(p, p.x[i] - x0, guard::kPole, ErrorKind::PoleAtEvaluation,
                    "[x" + std::to_string(i + 1) + "-x0]");
  CoeffSet c{0.0, {}, x0, p};
  cplx first = 1.0, second = 1.0;
  for (int j = 0; j < L; ++j) {
    first *= p.br(x0 - p.y[j]);
    second *= p.br(x0 - p.y[j] + 1.0) * p.br(p.x[j] - x0 + 1.0) / p.br(p.x[j] - x0);
  }
  c.m0 = first - second;
  for (int i = 0; i < L; ++i) {
    cplx m = p.br(1.0) / p.br(p.x[i] - x0);
    for (int j = 0; j < L; ++j) {
      m *= p.br(p.x[i] - p.y[j] + 1.0);
      if (j != i) m *= p.br(p.x[j] - p.x[i] + 1.0) / p.br(p.x[j] - p.x[i]);
    }
    c.mi.push_back(m);
  }
  return c;
}

inline CoeffSet coeffs_refl(const ModelParams& p, cplx x0) {
  require_sizes(p);
  const cplx k = p.kappa_or_throw();
  const int L = p.size();
  const double Ld = double(L);
  require_bracket(p, 2.0 * x0 + 1.0, guard::kPole, ErrorKind::PoleAtEvaluation, "[2x0+1]");
  require_zbracket(p, k + x0, ErrorKind::BoundaryPole, "[z+kappa+x0]");
  for (int i = 0; i < L; ++i) {
    const std::string n = std::to_string(i + 1);
    require_bracket(p, p.x[i] - x0, guard::kPole, ErrorKind::PoleAtEvaluation, "[x0-x" + n + "]");
    require_bracket(p, x0 + p.x[i] + 1.0, guard::kPole, ErrorKind::PoleAtEvaluation, "[x0+x" + n + "+1]");
    require_bracket(p, 2.0 * p.x[i] + 1.0, guard::kPole, ErrorKind::PoleAtEvaluation, "[2x" + n + "+1]");
    require_zbracket(p, k + p.x[i], ErrorKind::BoundaryPole, "[z+kappa+x" + n + "]");
  }
  require_zbracket(p, Ld - 1.0, ErrorKind::DynamicalPole, "[z+(L-1)]");
  require_zbracket(p, -(Ld - 1.0), ErrorKind::DynamicalPole, "[z-(L-1)]");
  require_zbracket(p, -Ld, ErrorKind::DynamicalPole, "[z-L]");

  CoeffSet c{0.0, {}, x0, p};
  const Eigenvalues e0 = eigenvalues(p, x0);
  cplx prod = 1.0;
  for (int j = 0; j < L; ++j) {
    const cplx xj = p.x[j];
    prod *= p.br(xj - x0 + 1.0) * p.br(x0 + xj) / (p.br(xj - x0) * p.br(x0 + xj + 1.0));
  }
  c.m0 = e0.down_A - e0.up_A * prod;
  const cplx b1 = p.br(1.0);
  for (int i = 0; i < L; ++i) {
    const cplx xi = p.x[i];
    const Eigenvalues ei = eigenvalues(p, xi);
    cplx t1 = -ei.up_A * b1 * p.br(2.0 * xi) * p.zbr(Ld - 1.0 + xi - x0) /
              (p.br(x0 - xi) * p.br(2.0 * xi + 1.0) * p.zbr(Ld - 1.0));
    cplx t2 = ei.up_Dtilde * b1 * p.zbr(Ld - 2.0 - x0 - xi) * p.zbr(-(Ld - 1.0)) /
              (p.br(x0 + xi + 1.0) * p.zbr(Ld - 1.0) * p.zbr(-Ld));
    for (int j = 0; j < L; ++j) {
      if (j == i) continue;
      const cplx xj = p.x[j];
      t1 *= p.br(xj - xi + 1.0) * p.br(xi + xj) / (p.br(xj - xi) * p.br(xi + xj + 1.0));
      t2 *= p.br(xi - xj + 1.0) * p.br(xi + xj + 2.0) / (p.br(xi - xj) * p.br(xi + xj + 1.0));
    }
    c.mi.push_back(t1 + t2);
  }
  return c;
}

using Evaluator = std::function<cplx(const ModelParams&)>;

enum class CoeffKind { SixVertex, Reflecting };

// p_plus.x = (x0, x1..xL), p_plus.y = (y1..yL). Returns |Σ M_ν F(x̂_ν)| / max_ν |M_ν F(x̂_ν)|.
inline double functional_residual(const ModelParams& p_plus, const Evaluator& F,
                                  CoeffKind kind = CoeffKind::SixVertex) {
  const int L = int(p_plus.y.size());
  if (int(p_plus.x.size()) != L + 1 || L < 1)
    throw Error(ErrorKind::InvalidContext, "functional_residual needs |x| = |y| + 1");
  ModelParams p = p_plus;
  const cplx x0 = p_plus.x.front();
  p.x.erase(p.x.begin());
  const CoeffSet c = kind == CoeffKind::SixVertex ? coeffs_6v(p, x0) : coeffs_refl(p, x0);

  cplx sum = 0.0;
  double big = 0.0;
  for (int nu = 0; nu <= L; ++nu) {
    ModelParams q = p_plus;
    q.x.erase(q.x.begin() + nu);
    const cplx m = nu == 0 ? c.m0 : c.mi[std::size_t(nu - 1)];
    const cplx t = m * F(q);
    sum += t;
    big = std::max(big, std::abs(t));
  }
  return big > 0.0 ? std::abs(sum) / big : 0.0;
}

// ---------------- recurrences ----------------

enum class KorepinVariant { X1EqY1, XLEqY1Minus1, XLEqYL, ReflPlus, ReflMinus };

constexpr std::string_view to_string(KorepinVariant v) {
  switch (v) {
    case KorepinVariant::X1EqY1: return "x1=y1";
    case KorepinVariant::XLEqY1Minus1: return "xL=y1-1";
    case KorepinVariant::XLEqYL: return "xL=yL";
    case KorepinVariant::ReflPlus: return "xL=+yL";
    case KorepinVariant::ReflMinus: return "xL=-yL";
  }
  return "?";
}

// p with the variant's specialisation substituted (guard bypass flag set).
inline ModelParams specialize(const ModelParams& p, KorepinVariant v) {
  ModelParams q = p;
  q.allow_special = true;
  const std::size_t L = p.x.size();
  switch (v) {
    case KorepinVariant::X1EqY1: q.x[0] = p.y[0]; break;
    case KorepinVariant::XLEqY1Minus1: q.x[L - 1] = p.y[0] - 1.0; break;
    case KorepinVariant::XLEqYL:
    case KorepinVariant::ReflPlus: q.x[L - 1] = p.y[L - 1]; break;
    case KorepinVariant::ReflMinus: q.x[L - 1] = -p.y[L - 1]; break;
  }
  return q;
}

// The size L-1 problem the specialised value reduces to.
inline ModelParams reduced(const ModelParams& p, KorepinVariant v) {
  ModelParams q = p;
  switch (v) {
    case KorepinVariant::X1EqY1:
      q.x.erase(q.x.begin());
      q.y.erase(q.y.begin());
      break;
    case KorepinVariant::XLEqY1Minus1:
      q.x.pop_back();
      q.y.erase(q.y.begin());
      break;
    default:
      q.x.pop_back();
      q.y.pop_back();
  }
  return q;
}

// Proportionality factor Z_L(specialised) / Z_{L-1}(reduced). Reads only the unspecialised entries of p.
inline cplx korepin_factor(const ModelParams& p, KorepinVariant v) {
  require_sizes(p);
  const int L = p.size();
  if (L < 2) throw Error(ErrorKind::InvalidContext, "korepin_factor needs L >= 2");
  const auto& x = p.x;
  const auto& y = p.y;
  const cplx b1 = p.br(1.0);
  cplx f = b1;
  switch (v) {
    case KorepinVariant::X1EqY1:
      for (int i = 1; i < L; ++i) f *= p.br(x[i] - y[0] + 1.0) * p.br(y[0] - y[i] + 1.0);
      return f;
    case KorepinVariant::XLEqY1Minus1:
      for (int i = 0; i < L - 1; ++i) f *= p.br(x[i] - y[0]);
      for (int i = 1; i < L; ++i) f *= p.br(y[0] - 1.0 - y[i]);
      return f;
    case KorepinVariant::XLEqYL:
      for (int i = 0; i < L - 1; ++i) f *= p.br(x[i] - y[L - 1] + 1.0) * p.br(y[L - 1] - y[i] + 1.0);
      return f;
    case KorepinVariant::ReflPlus:
    case KorepinVariant::ReflMinus: {
      const double s = v == KorepinVariant::ReflPlus ? 1.0 : -1.0;
      const KWeights kw{p.ctx, p.kappa_or_throw()};
      const cplx yl = s * y[L - 1];
      const double Lm1 = double(L - 1);
      require_zbracket(p, s * Lm1, ErrorKind::DynamicalPole, "[z±(L-1)]");
      f *= (s > 0 ? kw.k_minus(yl, p.z) : kw.k_plus(yl, p.z)) * p.br(2.0 * yl) * p.zbr(s * Lm1 - 1.0) /
           p.zbr(s * Lm1);
      for (int i = 1; i < L; ++i) {
        const cplx xi = x[std::size_t(i - 1)], yi = y[std::size_t(i - 1)];
        const double h = s * double(2 * i - L - 1);
        require_zbracket(p, h, ErrorKind::DynamicalPole, "[z±(2i-L-1)]");
        f *= p.br(xi - yl + 1.0) * p.br(xi + yl) * p.br(yl + yi + 1.0) * p.br(yl - yi + 1.0) * p.zbr(h - 1.0) /
             p.zbr(h);
      }
      return f;
    }
  }
  return f;
}

// ---------------- recipe ----------------

// Bottom-up reconstruction from F_1 = [1]. k_order[n-1] is the y-index eliminated at size n;
// the active y-set at size n is {k_order[0..n-1]}. Default: identity (k = n).
inline PartitionValue recipe_build(const ModelParams& p, std::optional<std::vector<int>> k_order = std::nullopt) {
  require_sizes(p);
  require_distinct_x(p);
  const int L = p.size();
  if (L > 20) throw Error(ErrorKind::SizeLimit, "recipe_build needs L <= 20");
  std::vector<int> ord(static_cast<std::size_t>(L));
  std::iota(ord.begin(), ord.end(), 0);
  if (k_order) {
    if (int(k_order->size()) != L) throw Error(ErrorKind::InvalidContext, "k_order must have length L");
    std::vector<int> chk = *k_order;
    std::sort(chk.begin(), chk.end());
    if (chk != ord) throw Error(ErrorKind::InvalidContext, "k_order must be a permutation of 0..L-1");
    ord = *k_order;
  }

  const auto XY1 = detail::make_table(L, [&](int a, int t) { return p.br(p.x[a] - p.y[t] + 1.0); });
  const auto XY = detail::make_table(L, [&](int a, int t) { return p.br(p.x[a] - p.y[t]); });
  const auto Q = detail::make_table(L, [&](int a, int b) {
    return a == b ? cplx(1.0) : p.br(p.x[a] - p.x[b] + 1.0) / p.br(p.x[a] - p.x[b]);
  });
  const cplx b1 = p.br(1.0);

  const std::size_t N = std::size_t(1) << L;
  std::vector<cplx> F(N, 0.0);  // caller-local memo over x-subsets
  F[0] = 1.0;
  double top_scale = 0.0;
  std::vector<std::uint32_t> masks(N);
  std::iota(masks.begin(), masks.end(), 0U);
  std::stable_sort(masks.begin(), masks.end(),
                   [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
  for (std::uint32_t S : masks) {
    const int n = std::popcount(S);
    if (n == 0) continue;
    const int k = ord[std::size_t(n - 1)];
    cplx total = 0.0;
    for (int j = 0; j < L; ++j) {
      if (!((S >> j) & 1U)) continue;
      cplx t = b1 * F[S & ~(1U << j)];
      for (int tt = 0; tt < n - 1; ++tt) t *= XY1(j, ord[std::size_t(tt)]);
      for (int i = 0; i < L; ++i)
        if (i != j && ((S >> i) & 1U)) t *= XY(i, k) * Q(i, j);
      total += t;
      if (n == L) top_scale = std::max(top_scale, std::abs(t));
    }
    F[S] = total;
  }
  const cplx value = F[N - 1];
  return {value, Method::Recipe, detail::positive_scale(top_scale, value)};
}

// ---------------- special zeroes ----------------

// Pairs (x1, x2) forced to be zeroes; pattern 0 is the six-vertex one, 1..3 its crossing images.
inline std::pair<cplx, cplx> special_zero_point(cplx yk, int pattern) {
  switch (pattern) {
    case 0: return {yk - 1.0, yk};
    case 1: return {-yk, yk};
    case 2: return {yk - 1.0, -yk - 1.0};
    case 3: return {-yk, -yk - 1.0};
    default: throw Error(ErrorKind::InvalidContext, "zero pattern must be 0..3");
  }
}

// |F| at (x1, x2) = special zero for y_k (k 0-based), relative to |F| at the generic point p.
// At the zero every summand vanishes on its own, so the local max-summand is rounding noise.
// `offset` shifts x2 off the zero for negative controls.
inline double special_zero_check(const ModelParams& p, int k, Family family = Family::SixVertex, int pattern = 0,
                                 cplx offset = 0.0) {
  require_sizes(p);
  if (p.size() < 2) throw Error(ErrorKind::InvalidContext, "special_zero_check needs L >= 2");
  auto F = [family](const ModelParams& q) {
    return family == Family::SixVertex ? symmetrized_sum(q) : refl_symmetrized_sum(q);
  };
  ModelParams q = p;
  const auto [a, b] = special_zero_point(p.y[std::size_t(k)], pattern);
  q.x[0] = a;
  q.x[1] = b + offset;
  q.allow_special = true;
  const PartitionValue v = F(q);
  const PartitionValue ref = F(p);
  return std::abs(v.value) / std::max(std::abs(ref.value), 1e-300);
}

}  // namespace dwpf
