// SPDX-License-Identifier: Apache-2.0
//
// Two-parameter deformed integers [n]_{rho,q} = (rho^n - q^n)/(rho - q),
// their factorials and Gaussian binomials, and continuous powers b^x for
// b in 1 + pZ_p and x in Z_p.

#pragma once

#include <memory>
#include <shared_mutex>
#include <vector>

#include "rhoq/padic.hpp"

namespace rhoq {

class RhoQFactorials;

/// The deformation parameters. Both lie in 1 + pZ_p; the working precision
/// is the smaller of their absolute precisions.
class RhoQParams {
 public:
  RhoQParams(PadicNumber rho, PadicNumber q);

  /// rho = 1 + rho_offset*p, q = 1 + q_offset*p at `precision` digits.
  static RhoQParams from_offsets(u64 p, i64 rho_offset, i64 q_offset, int precision);

  u64 prime() const { return rho_.prime(); }
  int precision() const { return precision_; }
  const PadicNumber& rho() const { return rho_; }
  const PadicNumber& q() const { return q_; }
  /// q / rho, the weight ratio of the deformed Haar distribution.
  const PadicNumber& ratio() const { return ratio_; }
  bool degenerate() const { return (rho_ - q_).is_zero(); }

  /// Parameters (rho^(p^n), q^(p^n)).
  RhoQParams lifted(int n) const;
  RhoQParams swapped() const { return RhoQParams(q_, rho_); }
  RhoQParams with_precision(int precision) const;

  ResidueRing ring() const { return ResidueRing(prime(), precision_); }
  u64 rho_residue() const { return rho_.residue(precision_); }
  u64 q_residue() const { return q_.residue(precision_); }

  const RhoQFactorials& factorials() const { return *factorials_; }

 private:
  PadicNumber rho_;
  PadicNumber q_;
  PadicNumber ratio_;
  int precision_;
  std::shared_ptr<RhoQFactorials> factorials_;
};

/// Memoized [n]_{rho,q}! for one parameter pair. Readers share a lock;
/// extension takes it exclusively.
class RhoQFactorials {
 public:
  explicit RhoQFactorials(const RhoQParams& params);

  PadicNumber get(u64 n) const;

 private:
  u64 prime_;
  int precision_;
  u64 rho_;
  u64 q_;
  mutable std::shared_mutex mutex_;
  mutable std::vector<PadicNumber> table_;
};

/// [n]_{rho,q} as a residue mod p^W, by doubling on
/// [m + n] = q^n [m] + rho^m [n]. Never divides, so rho = q is fine.
u64 rhoq_integer_residue(u64 n, u64 rho, u64 q, const ResidueRing& ring);

PadicNumber rhoq_integer(u64 n, const RhoQParams& params);

/// [x]_{rho,q} for x in Z_p through (rho^x - q^x)/(rho - q). Rejects rho = q.
PadicNumber rhoq_number(const PadicNumber& x, const RhoQParams& params);

/// [x]_q = (1 - q^x)/(1 - q); returns x when q = 1.
PadicNumber q_number(u64 x, const PadicNumber& q);
PadicNumber q_number(const PadicNumber& x, const PadicNumber& q);

PadicNumber rhoq_factorial(u64 n, const RhoQParams& params);

/// Gaussian binomial [n]!/([n-k]! [k]!); zero when k > n.
PadicNumber rhoq_binomial(u64 n, u64 k, const RhoQParams& params);

/// base^exponent for base in 1 + pZ_p and exponent in Z_p, to `digits`
/// digits. The exponent is reduced mod p^digits before exponentiation.
PadicNumber rhoq_power(const PadicNumber& base, const PadicNumber& exponent, int digits);
PadicNumber rhoq_power(const PadicNumber& base, i64 exponent);

}  // namespace rhoq
