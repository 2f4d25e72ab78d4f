#pragma once

#include <functional>
#include <vector>

#include "dwpf/dwpf.hpp"

namespace testutil {

using dwpf::cplx;

// Relative least-squares residual ||A c - b|| / ||b|| for basis functions phi_k sampled at ts.
inline double lstsq_residual(const std::vector<cplx>& ts, const std::vector<cplx>& b,
                             const std::function<cplx(int, cplx)>& phi, int nbasis) {
  const std::size_t n = std::size_t(nbasis), m = ts.size();
  // normal equations, solved by Gaussian elimination with partial pivoting
  std::vector<std::vector<cplx>> N(n, std::vector<cplx>(n + 1, 0.0));
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t i = 0; i < n; ++i) {
      const cplx ai = std::conj(phi(int(i), ts[s]));
      for (std::size_t j = 0; j < n; ++j) N[i][j] += ai * phi(int(j), ts[s]);
      N[i][n] += ai * b[s];
    }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(N[r][k]) > std::abs(N[piv][k])) piv = r;
    std::swap(N[k], N[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == k) continue;
      const cplx f = N[r][k] / N[k][k];
      for (std::size_t c = k; c <= n; ++c) N[r][c] -= f * N[k][c];
    }
  }
  double num = 0.0, den = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    cplx fit = 0.0;
    for (std::size_t i = 0; i < n; ++i) fit += N[i][n] / N[i][i] * phi(int(i), ts[s]);
    num += std::norm(fit - b[s]);
    den += std::norm(b[s]);
  }
  return std::sqrt(num / den);
}

}  // namespace testutil
