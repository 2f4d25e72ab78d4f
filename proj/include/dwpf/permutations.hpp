#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dwpf/numerics.hpp"

namespace dwpf {

inline constexpr int kMaxPermutationSize = 12;
inline constexpr int kMaxReflectionSize = 24;

inline std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= std::uint64_t(k);
  return f;
}

namespace detail {
inline void check_perm_size(int L) {
  if (L < 1 || L > kMaxPermutationSize)
    throw Error(ErrorKind::SizeLimit, "permutation size L=" + std::to_string(L) + " outside 1.." +
                                          std::to_string(kMaxPermutationSize));
}
inline void check_refl_size(int L) {
  if (L < 1 || L > kMaxReflectionSize)
    throw Error(ErrorKind::SizeLimit, "reflection size L=" + std::to_string(L) + " outside 1.." +
                                          std::to_string(kMaxReflectionSize));
}
}  // namespace detail

// Heap's algorithm; visit(std::span<const int> perm, int sign).
template <class Visitor>
void for_each_permutation(int L, Visitor&& visit) {
  detail::check_perm_size(L);
  std::vector<int> p(L), c(L, 0);
  std::iota(p.begin(), p.end(), 0);
  int sign = 1;
  visit(std::span<const int>(p), sign);
  int i = 1;
  while (i < L) {
    if (c[i] < i) {
      if (i % 2 == 0)
        std::swap(p[0], p[i]);
      else
        std::swap(p[c[i]], p[i]);
      sign = -sign;
      visit(std::span<const int>(p), sign);
      ++c[i];
      i = 1;
    } else {
      c[i] = 0;
      ++i;
    }
  }
}

// Lexicographic rank -> permutation (factorial number system).
inline std::vector<int> unrank_permutation(int L, std::uint64_t rank) {
  detail::check_perm_size(L);
  std::vector<int> pool(L), out;
  std::iota(pool.begin(), pool.end(), 0);
  out.reserve(L);
  for (int k = L; k >= 1; --k) {
    const std::uint64_t f = factorial(k - 1);
    const auto idx = std::size_t(rank / f);
    rank %= f;
    out.push_back(pool[idx]);
    pool.erase(pool.begin() + std::ptrdiff_t(idx));
  }
  return out;
}

inline int permutation_sign(std::span<const int> p) {
  int inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) inv += (p[i] > p[j]);
  return (inv % 2 == 0) ? 1 : -1;
}

// Visits lexicographic ranks [start, start+count); sign tracked through next_permutation.
template <class Visitor>
void for_each_permutation_chunk(int L, std::uint64_t start, std::uint64_t count, Visitor&& visit) {
  detail::check_perm_size(L);
  const std::uint64_t total = factorial(L);
  if (start >= total || count == 0) return;
  count = std::min(count, total - start);
  std::vector<int> p = unrank_permutation(L, start);
  int sign = permutation_sign(p);
  for (std::uint64_t n = 0;; ++n) {
    visit(std::span<const int>(p), sign);
    if (n + 1 == count) break;
    // next_permutation by hand so the sign change is known: one swap + a suffix reversal.
    int i = L - 2;
    while (p[i] >= p[i + 1]) --i;
    int j = L - 1;
    while (p[j] <= p[i]) --j;
    std::swap(p[i], p[j]);
    std::reverse(p.begin() + i + 1, p.end());
    const int m = L - 1 - i;  // reversed suffix length
    if ((1 + m / 2) % 2 == 1) sign = -sign;
  }
}

// visit(std::uint32_t mask, int sign); bit i set means site i is flipped.
template <class Visitor>
void for_each_reflection_chunk(int L, std::uint64_t start, std::uint64_t count, Visitor&& visit) {
  detail::check_refl_size(L);
  const std::uint64_t total = std::uint64_t(1) << L;
  const std::uint64_t end = std::min(total, start + count);
  for (std::uint64_t m = start; m < end; ++m) {
    const auto mask = std::uint32_t(m);
    visit(mask, (std::popcount(mask) % 2 == 0) ? 1 : -1);
  }
}

template <class Visitor>
void for_each_reflection(int L, Visitor&& visit) {
  for_each_reflection_chunk(L, 0, std::uint64_t(1) << L, std::forward<Visitor>(visit));
}

// Threading knobs for the big sums. threads == 0 means hardware concurrency.
struct Parallelism {
  unsigned threads = 0;
  int serial_max_L = 7;  // permutation sums with L <= this run serially via Heap's algorithm

  unsigned resolved_threads() const {
    if (threads > 0) return threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
  }
};

struct SumResult {
  cplx sum{0.0};
  double max_term = 0.0;
  std::uint64_t terms = 0;

  void add(cplx t) {
    sum += t;
    max_term = std::max(max_term, std::abs(t));
    ++terms;
  }
  // term with an externally known magnitude (e.g. an inner sum's largest summand)
  void add(const std::pair<cplx, double>& t) {
    sum += t.first;
    max_term = std::max(max_term, t.second);
    ++terms;
  }
  void merge(const SumResult& o) {
    sum += o.sum;
    max_term = std::max(max_term, o.max_term);
    terms += o.terms;
  }
};

inline constexpr std::uint64_t kSumChunks = 256;

namespace detail {

// Runs chunk_fn(c) for c in [0, chunks) on up to `threads` workers, then reduces in chunk order.
template <class ChunkFn>
SumResult run_chunks(std::uint64_t chunks, unsigned threads, ChunkFn&& chunk_fn) {
  std::vector<SumResult> parts(chunks);
  threads = unsigned(std::min<std::uint64_t>(threads, chunks));
  if (threads <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) parts[c] = chunk_fn(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) parts[c] = chunk_fn(c);
      });
  }
  SumResult total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace detail

// Σ_σ term(σ, sign). Chunk boundaries depend only on L, so the result is independent of thread count.
template <class TermFn>
SumResult permutation_sum(int L, TermFn&& term, const Parallelism& par = {}) {
  detail::check_perm_size(L);
  if (L <= par.serial_max_L) {
    SumResult r;
    for_each_permutation(L, [&](std::span<const int> p, int s) { r.add(term(p, s)); });
    return r;
  }
  const std::uint64_t total = factorial(L);
  const std::uint64_t chunks = std::min(kSumChunks, total);
  return detail::run_chunks(chunks, par.resolved_threads(), [&](std::uint64_t c) {
    const std::uint64_t b = total * c / chunks, e = total * (c + 1) / chunks;
    SumResult r;
    for_each_permutation_chunk(L, b, e - b, [&](std::span<const int> p, int s) { r.add(term(p, s)); });
    return r;
  });
}

template <class TermFn>
SumResult reflection_sum(int L, TermFn&& term, const Parallelism& par = {}) {
  detail::check_refl_size(L);
  const std::uint64_t total = std::uint64_t(1) << L;
  if (total <= 64) {
    SumResult r;
    for_each_reflection(L, [&](std::uint32_t m, int s) { r.add(term(m, s)); });
    return r;
  }
  const std::uint64_t chunks = std::min<std::uint64_t>(64, total);
  return detail::run_chunks(chunks, par.resolved_threads(), [&](std::uint64_t c) {
    const std::uint64_t b = total * c / chunks, e = total * (c + 1) / chunks;
    SumResult r;
    for_each_reflection_chunk(L, b, e - b, [&](std::uint32_t m, int s) { r.add(term(m, s)); });
    return r;
  });
}

}  // namespace dwpf
