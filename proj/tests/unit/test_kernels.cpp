// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <vector>

#include "rhoq/kernels.hpp"

using namespace rhoq;

namespace {

const RhoQParams kParams = RhoQParams::from_offsets(5, 1, 2, 18);

std::vector<u64> naive(const IntegrableFunction& f, u64 start, u64 stride, u64 ratio,
                       const std::vector<u64>& checkpoints, const ResidueRing& ring) {
  std::vector<u64> out;
  u64 sum = 0, weight = 1, i = 0;
  for (u64 c : checkpoints) {
    for (; i < c; ++i) {
      sum = ring.add(sum, ring.mul(f.residue_at(start + i * stride, ring), weight));
      weight = ring.mul(weight, ratio);
    }
    out.push_back(sum);
  }
  return out;
}

}  // namespace

TEST(Kernels, ParallelSerialAndNaiveAgree) {
  const ResidueRing ring(5, 18);
  const u64 ratio = kParams.ratio().residue(18);
  const std::vector<FunctionPtr> fs = {make_monomial_x(2, 5, 18), make_rhoq_monomial(3, kParams),
                                       std::make_shared<CarlitzIntegrand>(1, 2, kParams)};
  const std::vector<u64> checkpoints = {1, 5, 25, 125, 625, 3125, 15625, 78125};
  for (const auto& f : fs) {
    for (auto [start, stride] : {std::pair<u64, u64>{0, 1}, {3, 5}, {17, 25}}) {
      const auto par = weighted_prefix_sums(*f, start, stride, ratio, checkpoints, ring);
      const auto ser = weighted_prefix_sums_serial(*f, start, stride, ratio, checkpoints, ring);
      EXPECT_EQ(par, ser) << f->describe();
      EXPECT_EQ(ser, naive(*f, start, stride, ratio, checkpoints, ring)) << f->describe();
      EXPECT_EQ(weighted_prefix_sums(KernelMode::kSerial, *f, start, stride, ratio, checkpoints, ring), ser);
    }
  }
}

TEST(Kernels, FactoredMatchesProducts) {
  const ResidueRing ring(5, 18);
  const std::vector<FunctionPtr> factors = {make_monomial_x(1, 5, 18), make_rhoq_monomial(1, kParams),
                                            make_ratio_power(kParams)};
  const std::vector<std::vector<int>> terms = {{0}, {0, 1}, {1, 1, 2}, {}, {2, 2}};
  const std::vector<u64> checkpoints = {4, 50, 1000, 40000};
  const auto par = factored_prefix_sums(factors, terms, 2, 3, checkpoints, ring);
  const auto ser = factored_prefix_sums_serial(factors, terms, 2, 3, checkpoints, ring);
  EXPECT_EQ(par, ser);
  ASSERT_EQ(par.size(), terms.size());
  // The empty product is 1, so that term counts the points.
  for (std::size_t c = 0; c < checkpoints.size(); ++c) EXPECT_EQ(par[3][c], checkpoints[c]);
  // {0, 1} against the generic kernel on the product function.
  const auto prod = make_product(factors[0], factors[1]);
  EXPECT_EQ(par[1], weighted_prefix_sums_serial(*prod, 2, 3, 1, checkpoints, ring));
}

TEST(Kernels, CheckpointValidation) {
  const ResidueRing ring(5, 10);
  const auto f = make_monomial_x(1, 5, 10);
  const std::vector<u64> bad = {5, 5};
  EXPECT_THROW(weighted_prefix_sums(*f, 0, 1, 1, bad, ring), DomainError);
  EXPECT_THROW(weighted_prefix_sums_serial(*f, 0, 1, 1, bad, ring), DomainError);
  const std::vector<FunctionPtr> factors = {f};
  const std::vector<std::vector<int>> terms = {{1}};
  const std::vector<u64> ok = {3};
  EXPECT_THROW(factored_prefix_sums(factors, terms, 0, 1, ok, ring), DomainError);
  EXPECT_GE(kernel_threads(), 1);
}
