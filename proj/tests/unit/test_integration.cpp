// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rhoq/integration.hpp"

using namespace rhoq;
using oracle::cpp_int;
using oracle::Rational;

namespace {

const RhoQParams kOne = RhoQParams::from_offsets(5, 0, 0, 20);
const RhoQParams kParams = RhoQParams::from_offsets(5, 1, 2, 16);

}  // namespace

TEST(Integration, UndeformedAverageOfX) {
  // At rho = q = 1 the level-N approximant of x is (p^N - 1)/2 exactly.
  const auto f = make_monomial_x(1, 5, 20);
  for (int n = 1; n <= 7; ++n) {
    const PadicNumber a = volkenborn_approximant(*f, kOne, n);
    const cpp_int pn = oracle::power(5, n);
    EXPECT_TRUE(agrees_to(a, oracle::to_padic(Rational(pn - 1, 2), 5, 20), a.abs_precision())) << n;
  }
  const auto seq = volkenborn_integral(*f, kOne, {1, 10}, 8);
  ASSERT_TRUE(seq.converged());
  EXPECT_TRUE(agrees_to(*seq.limit(), oracle::to_padic(Rational(-1, 2), 5, 20), 8));
}

TEST(Integration, FaulhaberForSquares) {
  // (1/p^N) sum_{x<p^N} x^2 = (p^N - 1)(2 p^N - 1)/6, tending to B_2 = 1/6.
  const auto f = make_monomial_x(2, 5, 20);
  for (int n = 1; n <= 7; ++n) {
    const PadicNumber a = volkenborn_approximant(*f, kOne, n);
    const cpp_int pn = oracle::power(5, n);
    EXPECT_TRUE(agrees_to(a, oracle::to_padic(Rational((pn - 1) * (2 * pn - 1), 6), 5, 20), a.abs_precision()));
  }
  const auto seq = volkenborn_integral(*f, kOne, {1, 10}, 8);
  ASSERT_TRUE(seq.converged());
  EXPECT_TRUE(agrees_to(*seq.limit(), oracle::to_padic(Rational(1, 6), 5, 20), 8));
}

TEST(Integration, ConstantIntegratesToRho) {
  for (auto [kr, kq] : {std::pair{1, 2}, {3, 1}, {0, 0}}) {
    const auto params = RhoQParams::from_offsets(7, kr, kq, 14);
    const auto one = make_constant(1, 7, 14);
    for (int n = 1; n <= 5; ++n) {
      const PadicNumber a = volkenborn_approximant(*one, params, n);
      EXPECT_TRUE(agrees_to(a, params.rho(), a.abs_precision()));
    }
  }
}

TEST(Integration, ParallelAndSerialApproximantsAgree) {
  const auto f = make_rhoq_monomial(2, kParams);
  for (int n = 1; n <= 6; ++n) {
    EXPECT_EQ(volkenborn_approximant(*f, kParams, n, KernelMode::kParallel),
              volkenborn_approximant(*f, kParams, n, KernelMode::kSerial));
  }
}

TEST(Integration, GeometricBernoulliClosedForm) {
  for (i64 a : {0, 1, 2, -1}) {
    const auto seq = carlitz_bernoulli(0, a, kParams, {1, 9}, 7);
    const auto closed = carlitz_geometric_limit(a, kParams);
    ASSERT_TRUE(seq.converged()) << a;
    ASSERT_TRUE(closed.has_value());
    EXPECT_TRUE(agrees_to(*seq.limit(), *closed, 7)) << a;
  }
  // beta_{0:1} integrates rho^x, so the closed form at a = 0 is the integral of 1.
  EXPECT_TRUE(agrees_to(*carlitz_geometric_limit(0, kParams), kParams.rho(), 12));
}

TEST(Integration, DirectAndLiftedPathsAgree) {
  const auto f = make_rhoq_monomial(1, kParams);
  for (int n = 1; n <= 3; ++n) {
    for (u64 a : {0u, 3u, 11u}) {
      const Ball ball(a % ipow(5, n), n, 5);
      PrecisionBudget budget(16);
      const PadicNumber d = weighted_measure(*f, kParams, ball, 5, WeightedPath::kDirect);
      const PadicNumber l = weighted_measure(*f, kParams, ball, 5, WeightedPath::kLifted, &budget);
      EXPECT_TRUE(agrees_to(d, l, std::min(d.abs_precision(), l.abs_precision()))) << ball.to_string();
      EXPECT_GT(budget.total_loss(), 0);
    }
  }
}

TEST(Integration, FixedTotalLevelIsAdditive) {
  const auto f = make_product(make_monomial_x(1, 5, 16), make_ratio_power(kParams));
  const int total = 5;
  for (int n = 1; n < total; ++n) {
    for (u64 a : {1u, 4u}) {
      const Ball ball(a % ipow(5, n), n, 5);
      PadicNumber sum = PadicNumber::exact_zero(5);
      for (const auto& c : ball.children()) sum += weighted_measure_total(*f, kParams, c, total);
      const PadicNumber parent = weighted_measure_total(*f, kParams, ball, total);
      EXPECT_TRUE(agrees_to(sum, parent, std::min(sum.abs_precision(), parent.abs_precision())));
    }
  }
}

TEST(Integration, SplittingExpansionSumsToBracketPower) {
  for (int k = 0; k <= 3; ++k) {
    for (u64 a : {1u, 2u, 7u}) {
      for (u64 i : {0u, 1u, 3u}) {
        for (int n : {1, 2}) {
          const auto terms = splitting_expansion_terms(k, a, i, n, kParams);
          ASSERT_EQ(terms.size(), static_cast<std::size_t>(k + 1));
          PadicNumber sum = PadicNumber::exact_zero(5);
          for (const auto& t : terms) sum += t;
          const PadicNumber expected = pow(rhoq_integer(a + i * ipow(5, n), kParams), k);
          EXPECT_TRUE(agrees_to(sum, expected, std::min(sum.abs_precision(), expected.abs_precision())));
        }
      }
    }
  }
}

TEST(Integration, PolynomialWeightsScaleToDensity) {
  // [p^N] mu~_P(a + p^N Z_p) approaches (q/rho)^a P(a) one digit per level.
  const auto poly = RhoQPolynomial::monomial(2, kParams);
  const PolynomialWeights weights(poly, 10);
  for (int n = 1; n <= 5; ++n) {
    for (u64 a : {1u, 7u, 13u}) {
      const PadicNumber s = weights.scaled(a % ipow(5, n), n);
      const PadicNumber density = rhoq_power(kParams.ratio(), static_cast<i64>(a % ipow(5, n))) * poly.value_at(a % ipow(5, n));
      EXPECT_TRUE(agrees_to(s, density, n)) << "N=" << n << " a=" << a;
    }
  }
}

TEST(Integration, ExpansionPathMatchesDirectMeasure) {
  const auto poly = RhoQPolynomial::monomial(1, kParams);
  const PolynomialWeights weights(poly, 8);
  const auto f = make_rhoq_monomial(1, kParams);
  for (int n = 1; n <= 3; ++n) {
    const Ball ball(2 % ipow(5, n), n, 5);
    const PadicNumber direct = weighted_measure(*f, kParams, ball, 8, WeightedPath::kDirect);
    const PadicNumber expanded = weights.value(ball.representative(), n);
    EXPECT_TRUE(agrees_to(direct, expanded, std::min(direct.abs_precision(), expanded.abs_precision()) - 1));
  }
}

TEST(Integration, IdentityAgainstWeightedDistribution) {
  const auto poly = RhoQPolynomial::monomial(1, kParams);
  const PolynomialWeights weights(poly, 8);
  const std::vector<FunctionPtr> gs = {make_constant(1, 5, 16), make_monomial_x(1, 5, 16)};
  const auto ids = integral_against_weighted(gs, weights, {1, 6}, 5);
  ASSERT_EQ(ids.size(), gs.size());
  for (const auto& id : ids) {
    EXPECT_TRUE(agrees_to(id.lhs.last(), id.rhs.last(), 5));
  }
}

TEST(Integration, LevelBudget) {
  EXPECT_EQ(level_budget(5, 12, 4, 1'000'000'000), 8);  // 12 - 8 digits survive the division
  EXPECT_EQ(level_budget(5, 22, 4, 1000), 4);
  EXPECT_EQ(working_digits(*make_monomial_x(1, 5, 9), kParams), 9);
}

TEST(Integration, RhoOneIsTheQDeformedIntegral) {
  // With rho = 1 the approximant is (1/[p^N]_q) sum_{x<p^N} f(x) q^x, coded
  // here directly in PadicNumber arithmetic.
  const auto params = RhoQParams::from_offsets(5, 0, 3, 14);
  const auto f = make_monomial_x(2, 5, 14);
  for (int n = 1; n <= 4; ++n) {
    PadicNumber sum = PadicNumber::exact_zero(5), qx = PadicNumber::from_integer(1, 5, 14), qn_sum = sum;
    for (u64 x = 0; x < ipow(5, n); ++x) {
      sum += f->value_at(x) * qx;
      qn_sum += qx;
      qx *= params.q();
    }
    const PadicNumber expected = sum / qn_sum;
    const PadicNumber a = volkenborn_approximant(*f, params, n);
    EXPECT_TRUE(agrees_to(a, expected, std::min(a.abs_precision(), expected.abs_precision()))) << n;
  }
}
