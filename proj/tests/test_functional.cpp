#include <gtest/gtest.h>

#include <algorithm>

#include "dwpf/dwpf.hpp"

using namespace dwpf;

namespace {
const BracketContext kTrig = BracketContext::trigonometric(0.7);
const BracketContext kEll = BracketContext::elliptic(0.6, cplx(0.1, 0.7));
const DrawOptions kRefl{Family::Reflecting, true};
const DrawOptions kDrop{Family::Reflecting, false};

ModelParams with_x0(Rng& rng, ModelParams p, Family fam) {
  p.x.insert(p.x.begin(), random_extra_x(rng, p, fam));
  return p;
}

cplx iz(const ModelParams& q) { return izergin_determinant(q).value; }
cplx sym(const ModelParams& q) { return symmetrized_sum(q).value; }
cplx con(const ModelParams& q) { return dwpf_contract(q).value; }
cplx tfk(const ModelParams& q) { return tfk_determinant(q).value; }
}  // namespace

TEST(Functional, SixVertexSolutions) {
  Rng rng(1);
  for (const auto& ctx : {kTrig, BracketContext::rational()})
    for (int L = 1; L <= 6; ++L)
      for (int d = 0; d < 20; ++d) {
        const auto p = with_x0(rng, random_params(rng, ctx, L), Family::SixVertex);
        for (const Evaluator& F : {Evaluator(iz), Evaluator(sym), Evaluator(con)})
          EXPECT_LT(functional_residual(p, F), 1e-9) << "L=" << L;
      }
}

TEST(Functional, PerturbedWeightsFail) {
  Rng rng(2);
  SixVertexWeights w(kTrig);
  w.a_scale = 1.01;
  for (int L = 2; L <= 4; ++L) {
    const auto p = with_x0(rng, random_params(rng, kTrig, L), Family::SixVertex);
    EXPECT_GT(functional_residual(p, [&](const ModelParams& q) { return dwpf_contract(q, w).value; }), 1e-4);
  }
}

TEST(Functional, NonSymmetricTrialFails) {
  Rng rng(3);
  for (int L = 2; L <= 4; ++L) {
    const auto p = with_x0(rng, random_params(rng, kTrig, L), Family::SixVertex);
    EXPECT_GT(functional_residual(p, [](const ModelParams& q) { return iz(q) * (1.0 + 0.5 * q.br(q.x[0])); }), 1e-3);
  }
}

TEST(Functional, ReflectingSolutions) {
  Rng rng(4);
  for (int L = 1; L <= 4; ++L)
    for (int d = 0; d < 5; ++d) {
      const auto p = with_x0(rng, random_params(rng, kEll, L, kRefl), Family::Reflecting);
      EXPECT_LT(functional_residual(p, tfk, CoeffKind::Reflecting), 1e-8);
      EXPECT_LT(functional_residual(
                    p, [](const ModelParams& q) { return refl_symmetrized_sum(q).value; }, CoeffKind::Reflecting),
                1e-8);
      const auto t = with_x0(rng, random_params(rng, kTrig, L, kDrop), Family::Reflecting);
      EXPECT_LT(functional_residual(t, tfk, CoeffKind::Reflecting), 1e-8);
    }
}

TEST(Functional, ReflectingCoefficientsRejectSixVertexSolution) {
  Rng rng(5);
  const auto p = with_x0(rng, random_params(rng, kEll, 3, kRefl), Family::Reflecting);
  EXPECT_GT(functional_residual(p, tfk, CoeffKind::SixVertex), 1e-4);
}

TEST(Functional, ArityChecked) {
  Rng rng(6);
  const auto p = random_params(rng, kTrig, 3);
  EXPECT_THROW(functional_residual(p, iz), Error);
}

TEST(Korepin, SixVertexVariants) {
  Rng rng(7);
  for (int L = 2; L <= 4; ++L)
    for (KorepinVariant v : {KorepinVariant::X1EqY1, KorepinVariant::XLEqY1Minus1, KorepinVariant::XLEqYL})
      for (int d = 0; d < 5; ++d) {
        const auto p = random_params(rng, kTrig, L);
        const auto sp = specialize(p, v);
        const cplx f = korepin_factor(sp, v);
        EXPECT_LT(relative_residual(dwpf_contract(sp).value, f * dwpf_contract(reduced(p, v)).value), 1e-9)
            << to_string(v) << " L=" << L;
        // the recipe is consistent with the same reduction
        EXPECT_LT(relative_residual(dwpf_contract(sp).value, f * recipe_build(reduced(p, v)).value), 1e-9);
      }
}

TEST(Korepin, ReflectingBothSigns) {
  Rng rng(8);
  for (int L = 2; L <= 3; ++L)
    for (KorepinVariant v : {KorepinVariant::ReflPlus, KorepinVariant::ReflMinus})
      for (int d = 0; d < 5; ++d) {
        const auto p = random_params(rng, kEll, L, kRefl);
        const auto sp = specialize(p, v);
        const cplx rhs = korepin_factor(sp, v) * tfk_determinant(reduced(p, v)).value;
        EXPECT_LT(relative_residual(refl_contract(sp).value, rhs), 1e-8) << to_string(v) << " L=" << L;
        EXPECT_LT(relative_residual(crossing_symmetrized_sum(sp).value, rhs), 1e-8);
      }
}

TEST(Korepin, NeedsTwoSites) {
  Rng rng(9);
  EXPECT_THROW(korepin_factor(random_params(rng, kTrig, 1), KorepinVariant::X1EqY1), Error);
}

TEST(Recipe, SingleSiteAndAgreement) {
  Rng rng(10);
  ModelParams one;
  one.ctx = kTrig;
  one.x = {0.2};
  one.y = {-0.4};
  EXPECT_LT(std::abs(recipe_build(one).value - bracket(kTrig, 1.0)), 1e-15);
  for (const auto& ctx : {kTrig, BracketContext::rational()})
    for (int L = 1; L <= 6; ++L)
      for (int d = 0; d < 5; ++d) {
        const auto p = random_params(rng, ctx, L);
        EXPECT_LT(relative_residual(recipe_build(p), izergin_determinant(p)), 1e-9);
      }
}

TEST(Recipe, KOrderInvariance) {
  Rng rng(11);
  for (int L = 2; L <= 6; ++L) {
    const auto p = random_params(rng, kTrig, L);
    const auto ref = recipe_build(p);
    std::vector<int> ord(static_cast<std::size_t>(L));
    std::iota(ord.begin(), ord.end(), 0);
    for (int s = 0; s < 5; ++s) {
      std::next_permutation(ord.begin(), ord.end());
      EXPECT_LT(relative_residual(recipe_build(p, ord), ref), 1e-10);
    }
  }
  const auto p = random_params(rng, kTrig, 3);
  EXPECT_THROW(recipe_build(p, std::vector<int>{0, 0, 1}), Error);
}

TEST(SpecialZeroes, SixVertex) {
  Rng rng(12);
  for (int L = 2; L <= 4; ++L)
    for (int d = 0; d < 5; ++d) {
      const auto p = random_params(rng, kTrig, L);
      for (int k = 0; k < L; ++k) EXPECT_LT(special_zero_check(p, k), 1e-9) << "L=" << L << " k=" << k;
    }
}

TEST(SpecialZeroes, ReflectingCrossingImages) {
  Rng rng(13);
  for (int L = 2; L <= 3; ++L) {
    const auto p = random_params(rng, kEll, L, kRefl);
    for (int pattern = 0; pattern < 4; ++pattern)
      for (int k = 0; k < L; ++k) EXPECT_LT(special_zero_check(p, k, Family::Reflecting, pattern), 1e-9);
  }
}

TEST(SpecialZeroes, OffTheZeroIsNotSmall) {
  Rng rng(14);
  for (int L = 2; L <= 3; ++L)
    for (int d = 0; d < 5; ++d) {
      const auto p = random_params(rng, kTrig, L);
      EXPECT_GT(special_zero_check(p, L - 1, Family::SixVertex, 0, 0.1), 1e-3);
    }
}

// Any F = G(z) - G(rotated z) solves the cyclic equation; G is arbitrary.
TEST(Cyclic, DifferenceSolution) {
  auto G = [](const std::vector<cplx>& z) {
    cplx g = 0.3;
    for (std::size_t i = 0; i < z.size(); ++i) g = g * std::sin(z[i] + double(i)) + z[i] * z[i];
    return g;
  };
  auto F = [&](std::vector<cplx> z) {
    std::vector<cplx> r = z;
    std::rotate(r.begin(), r.begin() + 1, r.end());
    return G(z) - G(r);
  };
  Rng rng(15);
  for (int n = 2; n <= 5; ++n) {
    std::vector<cplx> z;
    for (int i = 0; i < n; ++i) z.push_back(rng.spectral());
    cplx sum = 0.0;
    double big = 0.0;
    for (int j = 0; j < n; ++j) {
      std::vector<cplx> s = z;
      std::rotate(s.begin(), s.begin() + j, s.end());
      const cplx t = F(s);
      sum += t;
      big = std::max(big, std::abs(t));
    }
    EXPECT_LT(std::abs(sum), 1e-13 * big);
  }
}
