#pragma once

#include <array>
#include <optional>

#include "dwpf/params.hpp"

namespace dwpf {

// Vertex basis index for one line: horizontal 0 = →, 1 = ←; vertical 0 = ↑, 1 = ↓.
// Two-line basis index is 2*first + second, i.e. {↑↑, ↑↓, ↓↑, ↓↓} for (0,1,2,3).
struct SixVertexWeights {
  BracketContext ctx;
  cplx a_scale{1.0}, b_scale{1.0}, c_scale{1.0};  // perturbation hooks for negative controls

  explicit SixVertexWeights(BracketContext c) : ctx(c) {}
  cplx a(cplx w) const { return a_scale * bracket(ctx, w + 1.0); }
  cplx b(cplx w) const { return b_scale * bracket(ctx, w); }
  cplx c(cplx /*w*/) const { return c_scale * bracket(ctx, 1.0); }
};

// s = +1 or -1 selects the ± weight. Absent z drops every bracket containing z.
struct DynamicalWeights {
  BracketContext ctx;

  explicit DynamicalWeights(BracketContext c) : ctx(c) {}
  cplx a(int /*s*/, cplx w, std::optional<cplx> /*z*/) const { return bracket(ctx, w + 1.0); }
  cplx b(int s, cplx w, std::optional<cplx> z) const {
    if (!z) return bracket(ctx, w);
    return bracket(ctx, w) * bracket(ctx, *z - double(s)) / bracket(ctx, *z);
  }
  cplx c(int s, cplx w, std::optional<cplx> z) const {
    if (!z) return bracket(ctx, 1.0);
    return bracket(ctx, 1.0) * bracket(ctx, *z + double(s) * w) / bracket(ctx, *z);
  }
};

struct KWeights {
  BracketContext ctx;
  cplx kappa;

  cplx k_plus(cplx x, std::optional<cplx> z) const {
    if (!z) return bracket(ctx, kappa + x);
    return bracket(ctx, kappa + x) * bracket(ctx, *z + kappa - x) / bracket(ctx, *z + kappa + x);
  }
  cplx k_minus(cplx x, std::optional<cplx> /*z*/) const { return bracket(ctx, kappa - x); }
};

// 4x4 R-matrix, R(out, in).
struct RMatrix {
  std::array<cplx, 16> m{};

  cplx& operator()(int r, int c) { return m[std::size_t(4 * r + c)]; }
  const cplx& operator()(int r, int c) const { return m[std::size_t(4 * r + c)]; }

  ComplexMatrix to_matrix() const {
    ComplexMatrix out(4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) out(std::size_t(r), std::size_t(c)) = (*this)(r, c);
    return out;
  }

  static RMatrix from_entries(cplx a_up, cplx b_upper, cplx c_upper, cplx c_lower, cplx b_lower, cplx a_down) {
    RMatrix r;
    r(0, 0) = a_up;
    r(1, 1) = b_upper;
    r(1, 2) = c_upper;
    r(2, 1) = c_lower;
    r(2, 2) = b_lower;
    r(3, 3) = a_down;
    return r;
  }
};

inline RMatrix r_matrix(const SixVertexWeights& wt, cplx w) {
  const cplx a = wt.a(w), b = wt.b(w), c = wt.c(w);
  return RMatrix::from_entries(a, b, c, c, b, a);
}

inline RMatrix r_matrix(const BracketContext& ctx, cplx w) { return r_matrix(SixVertexWeights(ctx), w); }

// Layout (a+, b+|c-, c+|b-, a-).
inline RMatrix dyn_r_matrix(const BracketContext& ctx, cplx w, std::optional<cplx> z) {
  if (z && std::abs(bracket(ctx, *z)) < guard::kPole)
    throw Error(ErrorKind::DynamicalPole, "guard [z] violated");
  const DynamicalWeights d(ctx);
  return RMatrix::from_entries(d.a(+1, w, z), d.b(+1, w, z), d.c(-1, w, z), d.c(+1, w, z), d.b(-1, w, z),
                               d.a(-1, w, z));
}

inline ComplexMatrix k_matrix(const BracketContext& ctx, cplx x, std::optional<cplx> z, cplx kappa) {
  if (z && std::abs(bracket(ctx, *z + kappa + x)) < guard::kPole)
    throw Error(ErrorKind::BoundaryPole, "guard [z+kappa+x] violated");
  const KWeights k{ctx, kappa};
  ComplexMatrix m(2);
  m(0, 0) = k.k_plus(x, z);
  m(1, 1) = k.k_minus(x, z);
  return m;
}

namespace detail {

// Embeds an operator on lines (i, j) of three lines into the 8-dim space (index 4b0+2b1+b2).
// rfn(bits) returns the RMatrix to use given the current basis bits (for dynamical shifts).
template <class RFn>
ComplexMatrix embed3(int i, int j, RFn&& rfn) {
  ComplexMatrix M(8);
  for (int st = 0; st < 8; ++st) {
    const std::array<int, 3> bits{(st >> 2) & 1, (st >> 1) & 1, st & 1};
    const RMatrix R = rfn(bits);
    const int col = 2 * bits[std::size_t(i)] + bits[std::size_t(j)];
    for (int row = 0; row < 4; ++row) {
      const cplx w = R(row, col);
      if (w == cplx(0.0)) continue;
      auto nb = bits;
      nb[std::size_t(i)] = row >> 1;
      nb[std::size_t(j)] = row & 1;
      M(std::size_t((nb[0] << 2) | (nb[1] << 1) | nb[2]), std::size_t(st)) += w;
    }
  }
  return M;
}

inline ComplexMatrix embed3_fixed(int i, int j, const RMatrix& R) {
  return embed3(i, j, [&](const std::array<int, 3>&) { return R; });
}

inline int height_of(int bit) { return bit == 0 ? +1 : -1; }  // ↑ = +1, ↓ = -1

}  // namespace detail

template <class Weights>
double ybe_residual(const Weights& wt, cplx xi, cplx xj, cplx xk) {
  const auto R12 = detail::embed3_fixed(0, 1, r_matrix(wt, xi - xj));
  const auto R13 = detail::embed3_fixed(0, 2, r_matrix(wt, xi - xk));
  const auto R23 = detail::embed3_fixed(1, 2, r_matrix(wt, xj - xk));
  return relative_max_residual(R12 * R13 * R23, R23 * R13 * R12);
}

inline double ybe_residual(const BracketContext& ctx, cplx xi, cplx xj, cplx xk) {
  return ybe_residual(SixVertexWeights(ctx), xi, xj, xk);
}

// Calibrated sign s in "evaluate at z + s*h(spin on the third line)"; see README.
inline constexpr int kDynamicalShift = -1;

// R12(z+s h3) R13(z) R23(z+s h1) = R23(z) R13(z+s h2) R12(z).
inline double dyn_ybe_residual(const BracketContext& ctx, cplx xi, cplx xj, cplx xk, std::optional<cplx> z,
                               int shift = kDynamicalShift) {
  auto shifted = [&](cplx w, int line) {
    return [&ctx, w, z, shift, line](const std::array<int, 3>& bits) {
      std::optional<cplx> zz = z;
      if (zz && line >= 0) *zz += double(shift * detail::height_of(bits[std::size_t(line)]));
      return dyn_r_matrix(ctx, w, zz);
    };
  };
  const auto lhs = detail::embed3(0, 1, shifted(xi - xj, 2)) * detail::embed3(0, 2, shifted(xi - xk, -1)) *
                   detail::embed3(1, 2, shifted(xj - xk, 0));
  const auto rhs = detail::embed3(1, 2, shifted(xj - xk, -1)) * detail::embed3(0, 2, shifted(xi - xk, 1)) *
                   detail::embed3(0, 1, shifted(xi - xj, -1));
  return relative_max_residual(lhs, rhs);
}

// R12(u-v) K1(u) R21(u+v) K2(v) = K2(v) R12(u+v) K1(u) R21(u-v), all at height z.
// kappa_second (if set) replaces kappa in the K(v) factors only: a negative-control hook.
inline double reflection_residual(const BracketContext& ctx, cplx u, cplx v, std::optional<cplx> z, cplx kappa,
                                  std::optional<cplx> kappa_second = std::nullopt) {
  auto as4 = [](const RMatrix& R) { return R.to_matrix(); };
  auto swap_lines = [](const RMatrix& R) {  // P R P
    static constexpr std::array<int, 4> perm{0, 2, 1, 3};
    RMatrix out;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) out(perm[std::size_t(r)], perm[std::size_t(c)]) = R(r, c);
    return out.to_matrix();
  };
  auto kron_left = [](const ComplexMatrix& k) {  // K ⊗ 1
    ComplexMatrix m(4);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) m(std::size_t(2 * a + b), std::size_t(2 * a + b)) = k(std::size_t(a), std::size_t(a));
    return m;
  };
  auto kron_right = [](const ComplexMatrix& k) {  // 1 ⊗ K
    ComplexMatrix m(4);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) m(std::size_t(2 * a + b), std::size_t(2 * a + b)) = k(std::size_t(b), std::size_t(b));
    return m;
  };
  const RMatrix Rm = dyn_r_matrix(ctx, u - v, z), Rp = dyn_r_matrix(ctx, u + v, z);
  const auto K1 = kron_left(k_matrix(ctx, u, z, kappa));
  const auto K2 = kron_right(k_matrix(ctx, v, z, kappa_second.value_or(kappa)));
  const auto lhs = as4(Rm) * K1 * swap_lines(Rp) * K2;
  const auto rhs = K2 * as4(Rp) * K1 * swap_lines(Rm);
  return relative_max_residual(lhs, rhs);
}

}  // namespace dwpf
