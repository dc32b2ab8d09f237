// SPDX-License-Identifier: Apache-2.0
//
// Arithmetic on integer residues modulo p^W. Everything above this layer
// (PadicNumber, the summation kernels) reduces to these few operations.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rhoq {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

/// Residues are kept below 2^62 so that a sum of two never wraps.
inline constexpr u64 kResidueLimit = u64{1} << 62;

class PadicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PrimeMismatch : public PadicError {
 public:
  using PadicError::PadicError;
};

/// Raised when a result would carry no significant digits (division by a
/// value indistinguishable from zero, requests beyond the residue limit).
class PrecisionError : public PadicError {
 public:
  using PadicError::PadicError;
};

class DomainError : public PadicError {
 public:
  using PadicError::PadicError;
};

bool is_prime(u64 n);

/// Largest W with p^W < 2^62.
int max_precision(u64 p);

/// p^e, throws PrecisionError if the result would reach kResidueLimit.
u64 ipow(u64 p, int e);

/// Exponent of the largest power of p dividing n (n != 0).
int valuation_of(u64 n, u64 p);

class ResidueRing {
 public:
  ResidueRing(u64 p, int digits);

  u64 prime() const { return prime_; }
  int digits() const { return digits_; }
  u64 modulus() const { return modulus_; }

  u64 reduce(u64 a) const { return a % modulus_; }
  u64 reduce_signed(i64 a) const {
    i64 m = static_cast<i64>(modulus_);
    i64 r = a % m;
    return static_cast<u64>(r < 0 ? r + m : r);
  }

  u64 add(u64 a, u64 b) const {
    u64 s = a + b;
    return s >= modulus_ ? s - modulus_ : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + modulus_ - b; }
  u64 neg(u64 a) const { return a == 0 ? 0 : modulus_ - a; }
  u64 mul(u64 a, u64 b) const {
    return static_cast<u64>(static_cast<u128>(a) * b % modulus_);
  }

  u64 pow(u64 base, u64 exponent) const;

  /// Inverse of a residue coprime to p.
  u64 inverse(u64 unit) const;

 private:
  u64 prime_;
  int digits_;
  u64 modulus_;
};

}  // namespace rhoq
