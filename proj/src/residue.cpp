// SPDX-License-Identifier: Apache-2.0

#include "rhoq/residue.hpp"

namespace rhoq {

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

int max_precision(u64 p) {
  int w = 0;
  u128 acc = 1;
  while (acc * p < kResidueLimit) {
    acc *= p;
    ++w;
  }
  return w;
}

u64 ipow(u64 p, int e) {
  if (e < 0) throw DomainError("ipow: negative exponent");
  u128 acc = 1;
  for (int i = 0; i < e; ++i) {
    acc *= p;
    if (acc >= kResidueLimit) {
      throw PrecisionError("p^" + std::to_string(e) + " exceeds the residue limit for p=" +
                           std::to_string(p));
    }
  }
  return static_cast<u64>(acc);
}

int valuation_of(u64 n, u64 p) {
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

ResidueRing::ResidueRing(u64 p, int digits) : prime_(p), digits_(digits) {
  if (digits < 0) throw PrecisionError("negative residue precision");
  modulus_ = ipow(p, digits);
}

u64 ResidueRing::pow(u64 base, u64 exponent) const {
  u64 result = modulus_ == 1 ? 0 : 1;
  base %= modulus_;
  while (exponent != 0) {
    if (exponent & 1) result = mul(result, base);
    base = mul(base, base);
    exponent >>= 1;
  }
  return result;
}

u64 ResidueRing::inverse(u64 unit) const {
  if (modulus_ == 1) return 0;
  i64 r0 = static_cast<i64>(modulus_), r1 = static_cast<i64>(unit % modulus_);
  i64 t0 = 0, t1 = 1;
  while (r1 != 0) {
    i64 q = r0 / r1;
    i64 r2 = r0 - q * r1;
    r0 = r1;
    r1 = r2;
    i64 t2 = t0 - q * t1;
    t0 = t1;
    t1 = t2;
  }
  if (r0 != 1) throw DomainError("residue is not invertible modulo p^W");
  return reduce_signed(t0);
}

}  // namespace rhoq
