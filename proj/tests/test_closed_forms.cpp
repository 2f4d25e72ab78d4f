#include <gtest/gtest.h>

#include "dwpf/dwpf.hpp"
#include "fit_util.hpp"

using namespace dwpf;

namespace {
const BracketContext kTrig = BracketContext::trigonometric(0.7);
const BracketContext kEll = BracketContext::elliptic(0.6, cplx(0.1, 0.7));
const DrawOptions kRefl{Family::Reflecting, true};
const DrawOptions kDrop{Family::Reflecting, false};
}  // namespace

TEST(SixVertex, SingleSite) {
  ModelParams p;
  p.ctx = BracketContext::trigonometric(1.0);
  p.x = {0.3};
  p.y = {0.1};
  for (const auto& v : {izergin_determinant(p), symmetrized_sum(p), antisym_sum(p), lagrange_sum(p)})
    EXPECT_NEAR(std::abs(v.value - std::sin(1.0)), 0.0, 1e-15);
}

TEST(SixVertex, FiveWayAgreement) {
  Rng rng(1);
  for (const auto& ctx : {kTrig, BracketContext::rational()})
    for (int L = 2; L <= 7; ++L)
      for (int d = 0; d < 5; ++d) {
        const auto p = random_params(rng, ctx, L);
        const auto ref = dwpf_contract(p);
        EXPECT_LT(relative_residual(izergin_determinant(p), ref), 1e-8);
        EXPECT_LT(relative_residual(symmetrized_sum(p), ref), 1e-8);
        EXPECT_LT(relative_residual(antisym_sum(p), ref), 1e-8);
        EXPECT_LT(relative_residual(lagrange_sum(p), ref), 1e-8);
      }
}

TEST(SixVertex, ParallelSumsMatchSerial) {
  Rng rng(2);
  const auto p = random_params(rng, kTrig, 8);
  const auto serial = symmetrized_sum(p, Parallelism{1, 12});
  const auto one = symmetrized_sum(p, Parallelism{1, 0});
  const auto four = symmetrized_sum(p, Parallelism{4, 0});
  EXPECT_EQ(one.value, four.value);
  EXPECT_LT(relative_residual(serial, four), 1e-12);
  EXPECT_LT(relative_residual(four, izergin_determinant(p)), 1e-8);
}

TEST(SixVertex, RemovablePoleIsApproachedSmoothly) {
  Rng rng(3);
  const auto p = random_params(rng, kTrig, 3);
  ModelParams at = p;
  at.x[0] = at.x[1];
  at.allow_special = true;
  const cplx limit = dwpf_contract(at).value;
  double prev = 1e300;
  for (double eps : {1e-3, 1e-5}) {
    ModelParams q = p;
    q.x[0] = q.x[1] + eps;
    const double diff = relative_residual(symmetrized_sum(q).value, limit);
    EXPECT_LT(diff, prev);
    prev = diff;
  }
  EXPECT_LT(prev, 1e-4);
  at.allow_special = false;
  try {
    izergin_determinant(at);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GenericPositionViolation);
  }
}

TEST(SixVertex, GuardsAndLimits) {
  Rng rng(4);
  auto p = random_params(rng, kTrig, 3);
  p.x[1] = p.x[2];
  EXPECT_THROW(symmetrized_sum(p), Error);
  const auto big = random_params(rng, kTrig, kMaxPermutationSize + 1);
  try {
    antisym_sum(big);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SizeLimit);
  }
}

TEST(Reflecting, FourWayAgreementElliptic) {
  Rng rng(5);
  for (cplx tau : {cplx(0.0, 0.3), cplx(0.1, 0.7), cplx(-0.3, 2.0)}) {
    const auto ctx = BracketContext::elliptic(0.6, tau);
    for (int L = 1; L <= 4; ++L) {
      const auto p = random_params(rng, ctx, L, kRefl);
      const auto t = tfk_determinant(p);
      if (L <= 3) {
        EXPECT_LT(relative_residual(refl_contract(p), t), 1e-8);
      }
      EXPECT_LT(relative_residual(refl_symmetrized_sum(p), t), 1e-8);
      EXPECT_LT(relative_residual(crossing_symmetrized_sum(p), t), 1e-8);
      EXPECT_LT(relative_residual(crossing_symmetrized_sum_signed(p), t), 1e-8);
    }
  }
}

TEST(Reflecting, SingleSiteDeterminant) {
  Rng rng(6);
  const auto p = random_params(rng, kEll, 1, kRefl);
  const cplx x = p.x[0], y = p.y[0], z = *p.z, k = *p.kappa;
  auto b = [](cplx w) { return bracket(kEll, w); };
  const cplx hand = b(1.0) * b(k - y) * b(2.0 * x) * b(z + k + y) * b(z - 1.0) / (b(z + k + x) * b(z));
  EXPECT_LT(relative_residual(tfk_determinant(p).value, hand), 1e-12);
}

TEST(Reflecting, KappaZIndependenceOfCrossingSum) {
  Rng rng(7);
  const auto base = random_params(rng, kEll, 3, kRefl);
  for (int d = 0; d < 3; ++d) {
    ModelParams p = base;
    do {
      p.kappa = rng.spectral();
      p.z = rng.spectral();
    } while (!well_separated(p, Family::Reflecting, guard::kDrawMargin));
    EXPECT_LT(relative_residual(crossing_symmetrized_sum(p), tfk_determinant(p)), 1e-8);
  }
}

TEST(Reflecting, MnCrossingExchangesTerms) {
  Rng rng(8);
  for (int n = 1; n <= 4; ++n) {
    const auto p = random_params(rng, kEll, n, kRefl);
    std::vector<cplx> xs = p.x, xc = p.x;
    xc.back() = -xc.back() - 1.0;
    const auto [a1, a2] = m_n_terms(p, xs);
    const auto [b1, b2] = m_n_terms(p, xc);
    EXPECT_LT(relative_residual(b1, a2), 1e-10) << "n=" << n;
    EXPECT_LT(relative_residual(b2, a1), 1e-10) << "n=" << n;
  }
}

TEST(Reflecting, TrigLimitFormula) {
  Rng rng(9);
  for (const auto& ctx : {kTrig, BracketContext::rational()})
    for (int L = 1; L <= 5; ++L) {
      const auto p = random_params(rng, ctx, L, kDrop);
      const auto t = tfk_determinant(p);
      EXPECT_LT(relative_residual(six_vertex_refl_formula(p), t), 1e-9);
      EXPECT_LT(relative_residual(refl_symmetrized_sum(p), t), 1e-9);
      if (L <= 4) {
        EXPECT_LT(relative_residual(refl_contract(p), t), 1e-9);
      }
    }
}

TEST(Reflecting, TrigLimitFormulaRejectsEllipticOrZ) {
  Rng rng(10);
  EXPECT_THROW(six_vertex_refl_formula(random_params(rng, kEll, 2, kDrop)), Error);
  EXPECT_THROW(six_vertex_refl_formula(random_params(rng, kTrig, 2, kRefl)), Error);
}

// Renormalised value is a trig polynomial of degree 2(L-1) in x_1: 2L-1 basis functions suffice, 2L-2 do not.
TEST(Reflecting, DegreeDoubling) {
  Rng rng(11);
  const double g = 0.7;
  for (int L = 1; L <= 4; ++L) {
    const auto p = random_params(rng, kTrig, L, kRefl);
    std::vector<cplx> ts, vs;
    for (int s = 0; s < 4 * L; ++s) {
      ModelParams q = p;
      q.x[0] = cplx(-1.3 + 2.6 * s / (4 * L), 0.1 - 0.03 * s);
      q.allow_special = true;
      ts.push_back(q.x[0]);
      vs.push_back(renormalized(q, tfk_determinant(q).value));
    }
    auto phi = [&](int k, cplx x) { return std::exp(cplx(0.0, g) * x * double(2 * k - 2 * (L - 1))); };
    EXPECT_LT(testutil::lstsq_residual(ts, vs, phi, 2 * L - 1), 1e-7) << "L=" << L;
    if (L >= 2) {
      auto phi_short = [&](int k, cplx x) { return std::exp(cplx(0.0, g) * x * double(2 * k - 2 * (L - 1) + 1)); };
      EXPECT_GT(testutil::lstsq_residual(ts, vs, phi_short, 2 * L - 2), 1e-4) << "L=" << L;
    }
  }
}

TEST(Reflecting, MissingKappaOrPole) {
  Rng rng(12);
  auto p = random_params(rng, kEll, 2, kRefl);
  auto q = p;
  q.kappa.reset();
  EXPECT_THROW(tfk_determinant(q), Error);
  q = p;
  q.z = -*p.kappa - p.x[0];  // [z + kappa + x_1] = 0
  try {
    tfk_determinant(q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.is_numeric_guard());
  }
}
