// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rhoq/residue.hpp"

using namespace rhoq;

TEST(Residue, PrimesAndWordSize) {
  EXPECT_TRUE(is_prime(2));
  EXPECT_TRUE(is_prime(5));
  EXPECT_TRUE(is_prime(1'000'000'007));
  EXPECT_FALSE(is_prime(1));
  EXPECT_FALSE(is_prime(25));
  EXPECT_FALSE(is_prime(561));
  EXPECT_EQ(max_precision(3), 39);
  EXPECT_EQ(max_precision(5), 26);
  EXPECT_EQ(max_precision(7), 22);
  for (u64 p : {3u, 5u, 7u, 11u}) {
    const int w = max_precision(p);
    EXPECT_LT(ipow(p, w), kResidueLimit);
    EXPECT_THROW(ipow(p, w + 1), PrecisionError);
  }
}

TEST(Residue, Valuation) {
  EXPECT_EQ(valuation_of(1, 5), 0);
  EXPECT_EQ(valuation_of(250, 5), 3);
  EXPECT_EQ(valuation_of(81, 3), 4);
}

TEST(Residue, OperationsMatchBigIntegers) {
  std::mt19937_64 gen(7);
  for (u64 p : {3u, 5u, 7u}) {
    const int w = max_precision(p);
    ResidueRing ring(p, w);
    const oracle::cpp_int m = oracle::modulus(p, w);
    for (int i = 0; i < 200; ++i) {
      const u64 a = ring.reduce(gen()), b = ring.reduce(gen());
      EXPECT_EQ(ring.add(a, b), oracle::reduce(oracle::cpp_int(oracle::cpp_int(a) + b), p, w));
      EXPECT_EQ(ring.sub(a, b), oracle::reduce(oracle::cpp_int(oracle::cpp_int(a) - b), p, w));
      EXPECT_EQ(ring.mul(a, b), oracle::reduce(oracle::cpp_int(oracle::cpp_int(a) * b), p, w));
      const u64 e = gen() % 1000;
      EXPECT_EQ(ring.pow(a, e), static_cast<u64>(boost::multiprecision::powm(oracle::cpp_int(a), e, m)));
      const u64 unit = a % p == 0 ? a + 1 : a;
      EXPECT_EQ(ring.mul(ring.reduce(unit), ring.inverse(ring.reduce(unit))), 1u);
    }
  }
}

TEST(Residue, RingLaws) {
  ResidueRing ring(5, 20);
  std::mt19937_64 gen(11);
  for (int i = 0; i < 200; ++i) {
    const u64 a = ring.reduce(gen()), b = ring.reduce(gen()), c = ring.reduce(gen());
    EXPECT_EQ(ring.add(a, ring.neg(a)), 0u);
    EXPECT_EQ(ring.mul(a, ring.add(b, c)), ring.add(ring.mul(a, b), ring.mul(a, c)));
    EXPECT_EQ(ring.mul(ring.mul(a, b), c), ring.mul(a, ring.mul(b, c)));
    EXPECT_EQ(ring.sub(ring.add(a, b), b), a);
  }
  EXPECT_EQ(ring.reduce_signed(-1), ring.modulus() - 1);
}
