// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rhoq/mahler.hpp"

using namespace rhoq;
using oracle::cpp_int;

namespace {

const RhoQParams kParams = RhoQParams::from_offsets(5, 1, 2, 16);
const RhoQParams kOne = RhoQParams::from_offsets(5, 0, 0, 16);

bool vanishes(const PadicNumber& x) { return x.is_zero(); }

}  // namespace

TEST(Mahler, PascalRowsMatchBinomials) {
  const auto ring = kParams.ring();
  const GaussianPascal pascal(kParams, 20, ring);
  for (int n = 0; n < 20; ++n) {
    for (int k = 0; k <= n; ++k) {
      const PadicNumber b = rhoq_binomial(static_cast<u64>(n), static_cast<u64>(k), kParams);
      EXPECT_TRUE(agrees_to(PadicNumber::from_residue(5, pascal.at(n, k), 16), b, b.abs_precision())) << n << "," << k;
    }
  }
}

TEST(Mahler, PascalIsUnitTriangular) {
  const auto ring = kParams.ring();
  const GaussianPascal pascal(kParams, 65, ring);
  EXPECT_EQ(pascal.size(), 65);
  for (int n = 0; n < 65; ++n) {
    EXPECT_EQ(pascal.at(n, n), 1u);
    EXPECT_EQ(pascal.at(n, 0), 1u);
    for (int k = n + 1; k < 65; ++k) ASSERT_EQ(pascal.at(n, k), 0u);
  }
}

TEST(Mahler, UndeformedPascalIsClassical) {
  const auto ring = kOne.ring();
  const GaussianPascal pascal(kOne, 30, ring);
  for (int n = 0; n < 30; ++n) {
    cpp_int c = 1;
    for (int k = 0; k <= n; ++k) {
      EXPECT_EQ(pascal.at(n, k), oracle::reduce(c, 5, 16));
      c = c * (n - k) / (k + 1);
    }
  }
}

TEST(Mahler, ClassicalCoefficientsAreFiniteDifferences) {
  // At rho = q = 1, a_n(x^k) = Delta^n x^k at 0 = sum_j (-1)^(n-j) C(n,j) j^k.
  for (int k = 0; k <= 6; ++k) {
    const auto series = mahler_coefficients(*make_monomial_x(k, 5, 16), 12, kOne);
    EXPECT_EQ(series.basis(), MahlerBasis::kClassical);
    for (int n = 0; n <= 12; ++n) {
      cpp_int delta = 0, c = 1;
      for (int j = 0; j <= n; ++j) {
        delta += ((n - j) % 2 ? -1 : 1) * c * oracle::power(j, static_cast<unsigned>(k));
        c = c * (n - j) / (j + 1);
      }
      const PadicNumber a = series.coefficients()[n];
      EXPECT_TRUE(agrees_to(a, PadicNumber::from_residue(5, oracle::reduce(delta, 5, 16), 16), a.abs_precision()))
          << "k=" << k << " n=" << n;
      if (n > k) EXPECT_TRUE(vanishes(a));
    }
    EXPECT_TRUE(series.tail_norm(k + 1).is_zero() || series.tail_norm(k + 1) <= Norm::power(5, -10));
  }
}

TEST(Mahler, RoundTripAtSamplePoints) {
  const std::vector<FunctionPtr> fs = {make_monomial_x(3, 5, 16), make_rhoq_monomial(2, kParams),
                                       make_ratio_power(kParams),
                                       std::make_shared<CarlitzIntegrand>(1, 1, kParams)};
  for (const auto& f : fs) {
    const auto series = mahler_coefficients(*f, 20, kParams);
    EXPECT_EQ(series.basis(), MahlerBasis::kGaussian);
    for (u64 i = 0; i <= 20; ++i) {
      const PadicNumber v = mahler_evaluate(series, i);
      EXPECT_TRUE(agrees_to(v, f->value_at(i), v.abs_precision())) << f->describe() << " at " << i;
    }
    std::vector<PadicNumber> values;
    for (u64 i = 0; i <= 20; ++i) values.push_back(f->value_at(i));
    const auto from_values = mahler_from_values(values, kParams);
    ASSERT_EQ(from_values.order(), series.order());
    for (int n = 0; n <= 20; ++n) EXPECT_EQ(from_values.coefficients()[n], series.coefficients()[n]);
  }
}

TEST(Mahler, BinomialAtLargeArguments) {
  for (u64 x : {0u, 3u, 11u, 40u}) {
    for (int n = 0; n <= 6; ++n) {
      const PadicNumber at = rhoq_binomial_at(x, n, kParams);
      const PadicNumber ref = rhoq_binomial(x, static_cast<u64>(n), kParams);
      if (ref.is_exact_zero()) {
        EXPECT_TRUE(at.is_zero());
      } else {
        EXPECT_TRUE(agrees_to(at, ref, std::min(at.abs_precision(), ref.abs_precision())));
      }
    }
  }
}

TEST(Mahler, SeriesAsIntegrand) {
  const auto series = mahler_coefficients(*make_rhoq_monomial(2, kParams), 10, kParams);
  const MahlerFunction g(series);
  const ResidueRing ring(5, g.precision());
  std::vector<u64> out(300);
  g.fill(0, 1, out, ring);
  for (u64 x = 0; x < out.size(); ++x) {
    ASSERT_EQ(out[x], g.residue_at(x, ring)) << x;
    const PadicNumber v = mahler_evaluate(series, x);
    EXPECT_TRUE(agrees_to(PadicNumber::from_residue(5, out[x], ring.digits()), v,
                          std::min(ring.digits(), v.abs_precision())));
  }
  std::vector<u64> strided(50);
  g.fill(7, 25, strided, ring);
  for (u64 i = 0; i < strided.size(); ++i) EXPECT_EQ(strided[i], g.residue_at(7 + 25 * i, ring));
  // In the classical basis a degree-2 polynomial is its own truncation at 2.
  const auto square = make_monomial_x(2, 5, 16);
  const auto f2 = truncation_polynomial(mahler_coefficients(*square, 10, kOne), 2);
  const ResidueRing small(5, 10);
  for (u64 x = 0; x < 1000; x += 37) EXPECT_EQ(f2->residue_at(x, small), square->residue_at(x, small));
}

TEST(Mahler, TruncationAndDecay) {
  const auto series = mahler_coefficients(*make_ratio_power(kParams), 24, kParams);
  const auto t0 = series.truncated(0);
  ASSERT_EQ(t0.order(), 0);
  EXPECT_EQ(t0.coefficients()[0], series.coefficients()[0]);
  EXPECT_EQ(mahler_evaluate(t0, 17), series.coefficients()[0]);
  // (q/rho)^x is locally analytic, so its coefficients decay at least like p^-floor(n/p).
  const int d = series.decay_index();
  EXPECT_GE(d, 0);
  const auto norms = series.coefficient_norms();
  for (int n = 1; n <= series.order(); ++n) EXPECT_LE(series.tail_norm(n), series.tail_norm(n - 1));
  EXPECT_EQ(series.tail_norm(0), *std::max_element(norms.begin(), norms.end()));
  // The truncation error at the sample points is bounded by the tail.
  for (int m : {2, 6, 12}) {
    const auto fm = truncation_polynomial(series, m);
    for (u64 x = 0; x <= 24; ++x) {
      const PadicNumber err = make_ratio_power(kParams)->value_at(x) - fm->value_at(x);
      if (!err.is_zero()) EXPECT_LE(err.norm(), series.tail_norm(m + 1)) << "m=" << m << " x=" << x;
    }
  }
  EXPECT_EQ(to_string(MahlerBasis::kGaussian), "gaussian");
}
