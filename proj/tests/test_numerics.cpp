#include <gtest/gtest.h>

#include <numbers>
#include <set>

#include "dwpf/dwpf.hpp"

using namespace dwpf;

namespace {

// Independent product-form oracle for the elliptic bracket.
cplx product_bracket(cplx gamma, cplx tau, cplx w) {
  const cplx q = std::exp(cplx(0.0, std::numbers::pi) * tau);
  const cplx u = gamma * w;
  cplx v = std::sin(u);
  cplx q2n = 1.0;
  for (int n = 1; n < 200; ++n) {
    q2n *= q * q;
    v *= (1.0 - q2n) * (1.0 - 2.0 * q2n * std::cos(2.0 * u) + q2n * q2n);
    if (std::abs(q2n) < 1e-20) break;
  }
  return v;
}

cplx cofactor_det(const ComplexMatrix& m) {
  const std::size_t n = m.dim();
  if (n == 1) return m(0, 0);
  cplx d = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    ComplexMatrix minor(n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t k = 0, kk = 0; k < n; ++k)
        if (k != c) minor(r - 1, kk++) = m(r, k);
    d += (c % 2 == 0 ? 1.0 : -1.0) * m(0, c) * cofactor_det(minor);
  }
  return d;
}

}  // namespace

TEST(Bracket, TrigAndRational) {
  const auto t = BracketContext::trigonometric(0.7);
  EXPECT_NEAR(std::abs(bracket(t, cplx(0.3, 0.1)) - std::sin(0.7 * cplx(0.3, 0.1))), 0.0, 1e-15);
  EXPECT_EQ(bracket(BracketContext::rational(), cplx(0.3, 0.1)), cplx(0.3, 0.1));
}

TEST(Bracket, EllipticMatchesProductFormula) {
  Rng rng(11);
  for (cplx tau : {cplx(0.1, 0.3), cplx(0.0, 0.7), cplx(-0.2, 2.0)}) {
    const auto e = BracketContext::elliptic(0.6, tau);
    for (int k = 0; k < 20; ++k) {
      const cplx w = rng.spectral();
      const cplx a = bracket(e, w), b = product_bracket(0.6, tau, w);
      EXPECT_LT(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(b))) << "tau=" << tau << " w=" << w;
    }
  }
}

TEST(Bracket, OddAndQuasiPeriodic) {
  const cplx gamma = 0.6, tau{0.1, 0.7};
  const auto e = BracketContext::elliptic(gamma, tau);
  Rng rng(12);
  for (int k = 0; k < 20; ++k) {
    const cplx w = rng.spectral();
    const cplx v = bracket(e, w);
    EXPECT_LT(std::abs(bracket(e, -w) + v), 1e-14);
    EXPECT_LT(std::abs(bracket(e, w + e.half_period()) + v), 1e-12);
    // [w + πτ/γ] = -q^{-1} e^{-2iγw} [w]
    const cplx shifted = bracket(e, w + std::numbers::pi * tau / gamma);
    const cplx expect = -v * std::exp(cplx(0.0, -2.0) * gamma * w) / e.nome();
    EXPECT_LT(std::abs(shifted - expect), 1e-11 * std::abs(expect));
  }
  EXPECT_THROW(BracketContext::rational().half_period(), Error);
}

TEST(Bracket, EllipticDegeneratesToTrig) {
  const auto e = BracketContext::elliptic(0.7, cplx(0.0, 20.0));
  const auto t = BracketContext::trigonometric(0.7);
  Rng rng(13);
  for (int k = 0; k < 20; ++k) {
    const cplx w = rng.spectral();
    EXPECT_LT(relative_residual(bracket(e, w), bracket(t, w)), 1e-10);
  }
}

TEST(Bracket, BadContextsThrow) {
  EXPECT_THROW(BracketContext::elliptic(0.6, cplx(0.1, 0.0)), Error);
  EXPECT_THROW(BracketContext::elliptic(0.6, cplx(0.1, -1.0)), Error);
  EXPECT_THROW(BracketContext::trigonometric(0.0), Error);
  try {
    bracket(BracketContext::elliptic(0.6, cplx(0.0, 0.001), 1e-18, 2), 0.5);
    FAIL() << "expected a series divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SeriesDivergence);
  }
}

TEST(Bracket, Product) {
  const auto t = BracketContext::trigonometric(0.7);
  EXPECT_LT(std::abs(bracket_product(t, {0.2, 0.5}) - bracket(t, 0.2) * bracket(t, 0.5)), 1e-16);
}

TEST(Determinant, MatchesCofactorExpansion) {
  Rng rng(21);
  for (std::size_t n = 1; n <= 6; ++n) {
    ComplexMatrix m(n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) m(r, c) = rng.spectral() * 3.0;
    const cplx a = determinant(m), b = cofactor_det(m);
    EXPECT_LT(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(b))) << "n=" << n;
  }
  EXPECT_EQ(determinant(ComplexMatrix::identity(4)), cplx(1.0));
  ComplexMatrix sing(3);
  for (std::size_t c = 0; c < 3; ++c) sing(0, c) = sing(1, c) = double(c + 1);
  EXPECT_EQ(determinant(sing), cplx(0.0));
}

TEST(Permutations, HeapVisitsEachOnceWithSign) {
  for (int L = 1; L <= 6; ++L) {
    std::set<std::vector<int>> seen;
    for_each_permutation(L, [&](std::span<const int> p, int s) {
      EXPECT_EQ(s, permutation_sign(p));
      seen.emplace(p.begin(), p.end());
    });
    EXPECT_EQ(seen.size(), factorial(L));
  }
  EXPECT_THROW(for_each_permutation(kMaxPermutationSize + 1, [](std::span<const int>, int) {}), Error);
}

TEST(Permutations, ChunksAreLexicographic) {
  const int L = 5;
  std::uint64_t rank = 0;
  for (std::uint64_t start = 0; start < factorial(L); start += 17)
    for_each_permutation_chunk(L, start, 17, [&](std::span<const int> p, int s) {
      EXPECT_EQ(std::vector<int>(p.begin(), p.end()), unrank_permutation(L, rank));
      EXPECT_EQ(s, permutation_sign(p));
      ++rank;
    });
  EXPECT_EQ(rank, factorial(L));
}

TEST(Permutations, ParallelSumIsThreadIndependent) {
  const int L = 8;
  auto term = [](std::span<const int> p, int s) {
    cplx t = double(s);
    for (std::size_t i = 0; i < p.size(); ++i) t *= cplx(1.0 + 0.1 * p[i], 0.01 * double(i));
    return t;
  };
  const auto one = permutation_sum(L, term, Parallelism{1, 0});
  for (unsigned th : {2U, 3U, 8U}) {
    const auto many = permutation_sum(L, term, Parallelism{th, 0});
    EXPECT_EQ(one.sum, many.sum);
    EXPECT_EQ(many.terms, factorial(L));
  }
  const auto serial = permutation_sum(L, term, Parallelism{1, 12});
  EXPECT_LT(std::abs(serial.sum - one.sum), 1e-12 * one.max_term);
}

TEST(Permutations, ReflectionSumCountsAndSigns) {
  const auto r = reflection_sum(10, [](std::uint32_t, int s) { return cplx(double(s)); }, Parallelism{4});
  EXPECT_EQ(r.terms, 1024U);
  EXPECT_EQ(r.sum, cplx(0.0));
}

TEST(Draws, DeterministicAndSeparated) {
  Rng a(5), b(5);
  const auto ctx = BracketContext::trigonometric(0.7);
  const auto p = random_params(a, ctx, 4), q = random_params(b, ctx, 4);
  EXPECT_EQ(p.x, q.x);
  EXPECT_EQ(p.y, q.y);
  EXPECT_TRUE(well_separated(p, Family::SixVertex, guard::kDrawMargin));
  for (cplx v : p.x) {
    EXPECT_LE(std::abs(v.real()), 1.5);
    EXPECT_LE(std::abs(v.imag()), 0.2);
  }
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
}
