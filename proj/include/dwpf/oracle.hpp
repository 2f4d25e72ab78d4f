#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <vector>

#include "dwpf/models.hpp"

namespace dwpf {

inline constexpr int kMaxEnumerateL = 4;
inline constexpr int kMaxCountL = 5;
inline constexpr int kMaxContractL = 12;
inline constexpr int kMaxReflContractL = 8;

namespace detail {

enum class Arrow : std::uint8_t { Right, Left, Up, Down };

// Depth-first walk over every domain-wall configuration, row-major from the top-left vertex.
// Row r carries x_r, column j carries y_j; on_config(weight) fires once per full configuration.
template <class WeightFn, class OnConfig>
void walk_dw_configs(int L, WeightFn&& weight, OnConfig&& on_config) {
  std::vector<Arrow> above(std::size_t(L), Arrow::Down);  // arrows on the edges above the current row
  auto rec = [&](auto&& self, int r, int j, Arrow left, cplx acc) -> void {
    if (r == L) {
      on_config(acc);
      return;
    }
    const Arrow top = above[std::size_t(j)];
    for (Arrow bottom : {Arrow::Up, Arrow::Down}) {
      if (r == L - 1 && bottom != Arrow::Up) continue;
      for (Arrow right : {Arrow::Right, Arrow::Left}) {
        if (j == L - 1 && right != Arrow::Right) continue;
        const int in = (left == Arrow::Right) + (right == Arrow::Left) + (top == Arrow::Down) + (bottom == Arrow::Up);
        if (in != 2) continue;
        char type;
        if (left == right && top == bottom)
          type = ((left == Arrow::Right) == (top == Arrow::Up)) ? 'a' : 'b';
        else if (left != right && top != bottom)
          type = 'c';
        else
          continue;
        const cplx w = weight(type, r, j);
        const Arrow saved = above[std::size_t(j)];
        above[std::size_t(j)] = bottom;
        if (j + 1 < L)
          self(self, r, j + 1, right, acc * w);
        else
          self(self, r + 1, 0, Arrow::Left, acc * w);
        above[std::size_t(j)] = saved;
      }
    }
  };
  rec(rec, 0, 0, Arrow::Left, cplx(1.0));
}

}  // namespace detail

inline std::uint64_t count_dw_configs(int L) {
  if (L < 1 || L > kMaxCountL)
    throw Error(ErrorKind::SizeLimit, "count_dw_configs needs 1 <= L <= " + std::to_string(kMaxCountL));
  std::uint64_t n = 0;
  detail::walk_dw_configs(L, [](char, int, int) { return cplx(1.0); }, [&](cplx) { ++n; });
  return n;
}

inline PartitionValue dwpf_enumerate(const ModelParams& p, const SixVertexWeights& wt) {
  require_sizes(p);
  require_six_vertex_mode(p, "dwpf_enumerate");
  const int L = p.size();
  if (L > kMaxEnumerateL)
    throw Error(ErrorKind::SizeLimit, "dwpf_enumerate needs L <= " + std::to_string(kMaxEnumerateL));
  PartitionValue out{0.0, Method::Enumerate, 0.0};
  detail::walk_dw_configs(
      L,
      [&](char type, int r, int j) {
        const cplx w = p.x[std::size_t(r)] - p.y[std::size_t(j)];
        return type == 'a' ? wt.a(w) : type == 'b' ? wt.b(w) : wt.c(w);
      },
      [&](cplx w) {
        out.value += w;
        out.scale = std::max(out.scale, std::abs(w));
        ++out.terms;
      });
  out.scale = detail::positive_scale(out.scale, out.value);
  return out;
}

inline PartitionValue dwpf_enumerate(const ModelParams& p) { return dwpf_enumerate(p, SixVertexWeights(p.ctx)); }

namespace detail {

inline SpinState all_up(int L) { return SpinState((std::uint64_t(1) << L) - 1); }
inline int v_index(SpinState s, int j) { return 1 - int((s >> j) & 1U); }  // R-matrix vertical index at site j
inline SpinState with_v(SpinState s, int j, int v) {
  return v == 0 ? (s | (SpinState(1) << j)) : (s & ~(SpinState(1) << j));
}
// (#down - #up) among sites 0..j-1: the height offset picked up crossing them left to right.
inline int prefix_offset(SpinState s, int j) {
  const SpinState mask = (SpinState(1) << j) - 1;
  return j - 2 * std::popcount(s & mask);
}

}  // namespace detail

// <↓…↓| B(x_1)…B(x_L) |↑…↑> with B(x) = <→| R_{aL}(x-y_L) … R_{a1}(x-y_1) |←>.
inline PartitionValue dwpf_contract(const ModelParams& p, const SixVertexWeights& wt) {
  require_sizes(p);
  require_six_vertex_mode(p, "dwpf_contract");
  const int L = p.size();
  if (L > kMaxContractL)
    throw Error(ErrorKind::SizeLimit, "dwpf_contract needs L <= " + std::to_string(kMaxContractL));
  const std::size_t N = std::size_t(1) << L;
  std::vector<cplx> v(N, 0.0);
  v[detail::all_up(L)] = 1.0;
  std::array<std::vector<cplx>, 2> cur, nxt;
  for (int i = L - 1; i >= 0; --i) {
    cur[0].assign(N, 0.0);
    cur[1] = v;  // auxiliary line enters pointing left
    for (int j = 0; j < L; ++j) {
      const RMatrix R = r_matrix(wt, p.x[std::size_t(i)] - p.y[std::size_t(j)]);
      nxt[0].assign(N, 0.0);
      nxt[1].assign(N, 0.0);
      for (int aux = 0; aux < 2; ++aux)
        for (SpinState s = 0; s < N; ++s) {
          const cplx amp = cur[std::size_t(aux)][s];
          if (amp == cplx(0.0)) continue;
          const int col = 2 * aux + detail::v_index(s, j);
          for (int row = 0; row < 4; ++row) {
            const cplx w = R(row, col);
            if (w == cplx(0.0)) continue;
            nxt[std::size_t(row >> 1)][detail::with_v(s, j, row & 1)] += amp * w;
          }
        }
      std::swap(cur, nxt);
    }
    v = cur[0];  // and leaves pointing right
  }
  const cplx value = v[0];
  return {value, Method::Contract, detail::positive_scale(0.0, value)};
}

inline PartitionValue dwpf_contract(const ModelParams& p) { return dwpf_contract(p, SixVertexWeights(p.ctx)); }

// Reflecting-end lattice: product of double-row operators 𝓑(x_1)…𝓑(x_L) on |↑…↑>, projected on <↓…↓|.
// Face heights: start at z on the wall and change by +1 across a ↓ (or →) edge, -1 across ↑ (or ←).
// Upper-row vertex (x_i - y_j) uses its north-west face; lower-row vertex (x_i + y_j, rotated)
// uses its south-west face; the K weight sits at height z. Absent z drops all z-dependence.
inline PartitionValue refl_contract(const ModelParams& p) {
  require_sizes(p);
  const int L = p.size();
  if (L > kMaxReflContractL)
    throw Error(ErrorKind::SizeLimit, "refl_contract needs L <= " + std::to_string(kMaxReflContractL));
  const cplx kappa = p.kappa_or_throw();
  const std::size_t N = std::size_t(1) << L;
  const int W = 2 * L + 1;

  auto z_at = [&](int off) -> std::optional<cplx> {
    if (!p.z) return std::nullopt;
    return *p.z + double(off);
  };
  // R-matrices per column and reachable height offset (|off| <= j, off ≡ j mod 2).
  auto row_cache = [&](cplx xi, int sgn) {
    std::vector<RMatrix> cache(std::size_t(L * W));
    for (int j = 0; j < L; ++j)
      for (int off = -j; off <= j; off += 2)
        cache[std::size_t(j * W + off + L)] = dyn_r_matrix(p.ctx, xi + double(sgn) * p.y[std::size_t(j)], z_at(off));
    return cache;
  };

  std::vector<cplx> v(N, 0.0);
  v[detail::all_up(L)] = 1.0;
  std::array<std::vector<cplx>, 2> cur, nxt;
  for (int i = L - 1; i >= 0; --i) {
    const cplx xi = p.x[std::size_t(i)];
    const auto Rlow = row_cache(xi, +1);
    const auto Rup = row_cache(xi, -1);
    const ComplexMatrix K = k_matrix(p.ctx, xi, p.z, kappa);

    // lower row, right to left; aux = arrow on the horizontal edge (0 →, 1 ←)
    cur[0] = v;
    cur[1].assign(N, 0.0);
    for (int j = L - 1; j >= 0; --j) {
      nxt[0].assign(N, 0.0);
      nxt[1].assign(N, 0.0);
      for (int aux = 0; aux < 2; ++aux)
        for (SpinState s = 0; s < N; ++s) {
          const cplx amp = cur[std::size_t(aux)][s];
          if (amp == cplx(0.0)) continue;
          const RMatrix& R = Rlow[std::size_t(j * W + detail::prefix_offset(s, j) + L)];
          const int col = 2 * detail::v_index(s, j) + (1 - aux);
          for (int row = 0; row < 4; ++row) {
            const cplx w = R(row, col);
            if (w == cplx(0.0)) continue;
            nxt[std::size_t(1 - (row & 1))][detail::with_v(s, j, row >> 1)] += amp * w;
          }
        }
      std::swap(cur, nxt);
    }

    // wall: k+ when the line runs along its orientation (←), then the line turns back (→)
    std::array<std::vector<cplx>, 2> turned;
    turned[0] = std::move(cur[1]);
    turned[1] = std::move(cur[0]);
    for (auto& a : turned[0]) a *= K(0, 0);
    for (auto& a : turned[1]) a *= K(1, 1);
    cur = std::move(turned);

    // upper row, left to right
    for (int j = 0; j < L; ++j) {
      nxt[0].assign(N, 0.0);
      nxt[1].assign(N, 0.0);
      for (int aux = 0; aux < 2; ++aux)
        for (SpinState s = 0; s < N; ++s) {
          const cplx amp = cur[std::size_t(aux)][s];
          if (amp == cplx(0.0)) continue;
          const RMatrix& R = Rup[std::size_t(j * W + detail::prefix_offset(s, j) + L)];
          const int col = 2 * aux + detail::v_index(s, j);
          for (int row = 0; row < 4; ++row) {
            const cplx w = R(row, col);
            if (w == cplx(0.0)) continue;
            nxt[std::size_t(row >> 1)][detail::with_v(s, j, row & 1)] += amp * w;
          }
        }
      std::swap(cur, nxt);
    }
    v = cur[0];
  }
  const cplx value = v[0];
  return {value, Method::ReflContract, detail::positive_scale(0.0, value)};
}

}  // namespace dwpf
