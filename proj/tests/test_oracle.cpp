#include <gtest/gtest.h>

#include <numeric>

#include "dwpf/dwpf.hpp"
#include "fit_util.hpp"

using namespace dwpf;

namespace {
const BracketContext kTrig = BracketContext::trigonometric(0.7);
const BracketContext kEll = BracketContext::elliptic(0.6, cplx(0.1, 0.7));
const DrawOptions kRefl{Family::Reflecting, true};
}  // namespace

TEST(Configurations, CountsAreAlternatingSignMatrices) {
  const std::uint64_t expect[] = {1, 2, 7, 42, 429};
  for (int L = 1; L <= kMaxCountL; ++L) EXPECT_EQ(count_dw_configs(L), expect[L - 1]);
  EXPECT_THROW(count_dw_configs(kMaxCountL + 1), Error);
}

TEST(Oracle, SingleSiteIsC) {
  Rng rng(1);
  const auto p = random_params(rng, kTrig, 1);
  EXPECT_EQ(dwpf_enumerate(p).value, bracket(kTrig, 1.0));
  EXPECT_LT(std::abs(dwpf_contract(p).value - bracket(kTrig, 1.0)), 1e-15);
}

TEST(Oracle, EnumerationMatchesContraction) {
  Rng rng(2);
  for (const auto& ctx : {kTrig, BracketContext::rational()})
    for (int L = 1; L <= 4; ++L)
      for (int d = 0; d < 50; ++d) {
        const auto p = random_params(rng, ctx, L);
        EXPECT_LT(relative_residual(dwpf_enumerate(p), dwpf_contract(p)), 1e-10) << "L=" << L;
      }
}

TEST(Oracle, WeightHooksReachBothOracles) {
  Rng rng(3);
  const auto p = random_params(rng, kTrig, 3);
  SixVertexWeights w(kTrig);
  w.a_scale = 1.01;
  EXPECT_LT(relative_residual(dwpf_enumerate(p, w), dwpf_contract(p, w)), 1e-12);
  EXPECT_GT(relative_residual(dwpf_contract(p, w), dwpf_contract(p)), 1e-4);
}

TEST(Oracle, DoublySymmetric) {
  Rng rng(4);
  for (int d = 0; d < 10; ++d) {
    const auto p = random_params(rng, kTrig, 5);
    const cplx z = dwpf_contract(p).value;
    std::vector<int> perm(5);
    std::iota(perm.begin(), perm.end(), 0);
    for (int s = 0; s < 5; ++s) {
      std::next_permutation(perm.begin(), perm.end());
      ModelParams q = p;
      for (int i = 0; i < 5; ++i) q.x[std::size_t(i)] = p.x[std::size_t(perm[std::size_t(i)])];
      EXPECT_LT(relative_residual(dwpf_contract(q).value, z), 1e-10);
      q = p;
      for (int i = 0; i < 5; ++i) q.y[std::size_t(i)] = p.y[std::size_t(perm[std::size_t(i)])];
      EXPECT_LT(relative_residual(dwpf_contract(q).value, z), 1e-10);
    }
  }
}

TEST(Oracle, Duality) {
  Rng rng(5);
  for (int L = 1; L <= 5; ++L) {
    const auto p = random_params(rng, kTrig, L);
    ModelParams q = p;
    for (std::size_t i = 0; i < p.x.size(); ++i) {
      q.x[i] = p.y[i] - 1.0;
      q.y[i] = p.x[i];
    }
    EXPECT_LT(relative_residual(dwpf_contract(q), dwpf_contract(p)), 1e-10);
  }
}

TEST(Oracle, TrigPolynomialDegree) {
  Rng rng(6);
  const double g = 0.7;
  for (int L = 1; L <= 4; ++L) {
    const auto p = random_params(rng, kTrig, L);
    std::vector<cplx> ts, zs;
    for (int s = 0; s < 2 * L; ++s) {
      ModelParams q = p;
      q.x[0] = cplx(-1.2 + 2.4 * s / (2 * L), 0.05 * s);
      q.allow_special = true;
      ts.push_back(q.x[0]);
      zs.push_back(dwpf_contract(q).value);
    }
    auto phi = [&](int k, cplx x) { return std::exp(cplx(0.0, g) * x * double(2 * k - (L - 1))); };
    EXPECT_LT(testutil::lstsq_residual(ts, zs, phi, L), 1e-8) << "L=" << L;
    if (L >= 2) {
      EXPECT_GT(testutil::lstsq_residual(ts, zs, phi, L - 1), 1e-4) << "L=" << L;
    }
  }
}

TEST(Oracle, SizeLimits) {
  Rng rng(7);
  for (auto [fn, L] : std::vector<std::pair<int, int>>{{0, kMaxEnumerateL + 1}, {1, kMaxContractL + 1}, {2, kMaxReflContractL + 1}}) {
    const auto p = random_params(rng, kTrig, L, fn == 2 ? kRefl : DrawOptions{});
    try {
      if (fn == 0) dwpf_enumerate(p);
      if (fn == 1) dwpf_contract(p);
      if (fn == 2) refl_contract(p);
      FAIL() << "no size error for fn " << fn;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::SizeLimit);
    }
  }
}

TEST(ReflContract, SingleSiteHandValue) {
  Rng rng(8);
  for (int d = 0; d < 10; ++d) {
    const auto p = random_params(rng, kEll, 1, kRefl);
    const cplx x = p.x[0], y = p.y[0], z = *p.z, k = *p.kappa;
    auto b = [](cplx w) { return bracket(kEll, w); };
    const cplx hand = b(1.0) * b(k - y) * b(2.0 * x) * b(z + k + y) * b(z - 1.0) / (b(z + k + x) * b(z));
    EXPECT_LT(relative_residual(refl_contract(p).value, hand), 1e-12);
  }
}

TEST(ReflContract, MatchesDeterminantAndIsDoublySymmetric) {
  Rng rng(9);
  for (int L = 2; L <= 4; ++L) {
    const auto p = random_params(rng, kEll, L, kRefl);
    const auto z = refl_contract(p);
    EXPECT_LT(relative_residual(z, tfk_determinant(p)), 1e-9);
    ModelParams q = p;
    std::reverse(q.x.begin(), q.x.end());
    std::rotate(q.y.begin(), q.y.begin() + 1, q.y.end());
    EXPECT_LT(relative_residual(refl_contract(q), z), 1e-9);
  }
}

TEST(ReflContract, RenormalizedCrossingSymmetry) {
  Rng rng(10);
  for (int L = 1; L <= 3; ++L)
    for (int d = 0; d < 5; ++d) {
      const auto p = random_params(rng, kEll, L, kRefl);
      const cplx base = renormalized(p, refl_contract(p).value);
      for (int i = 0; i < L; ++i) {
        ModelParams q = p;
        q.x[std::size_t(i)] = -q.x[std::size_t(i)] - 1.0;
        EXPECT_LT(relative_residual(renormalized(q, refl_contract(q).value), base), 1e-9);
      }
    }
  // the raw value is not crossing symmetric
  const auto p = random_params(rng, kEll, 2, kRefl);
  ModelParams q = p;
  q.x[0] = -q.x[0] - 1.0;
  EXPECT_GT(relative_residual(refl_contract(q), refl_contract(p)), 1e-4);
}

TEST(ReflContract, NeedsKappa) {
  Rng rng(11);
  auto p = random_params(rng, kEll, 2, kRefl);
  p.kappa.reset();
  try {
    refl_contract(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingParameter);
  }
}
