// SPDX-License-Identifier: Apache-2.0

#include "rhoq/rhoq_calculus.hpp"

#include <algorithm>
#include <mutex>

namespace rhoq {

namespace {

void require_one_plus_pzp(const PadicNumber& x, const char* name) {
  if (x.valuation() != 0) {
    throw DomainError(std::string(name) + " must be a unit in 1 + pZ_p");
  }
  PadicNumber one = PadicNumber::from_integer(1, x.prime(), max_precision(x.prime()));
  if ((x - one).valuation() < 1) {
    throw DomainError(std::string(name) + " must be congruent to 1 mod p");
  }
}

}  // namespace

RhoQParams::RhoQParams(PadicNumber rho, PadicNumber q) : rho_(std::move(rho)), q_(std::move(q)) {
  if (rho_.prime() != q_.prime()) throw PrimeMismatch("rho and q live over different primes");
  require_one_plus_pzp(rho_, "rho");
  require_one_plus_pzp(q_, "q");
  precision_ = std::min(rho_.abs_precision(), q_.abs_precision());
  rho_ = rho_.with_precision(precision_);
  q_ = q_.with_precision(precision_);
  ratio_ = q_ / rho_;
  factorials_ = std::make_shared<RhoQFactorials>(*this);
}

RhoQParams RhoQParams::from_offsets(u64 p, i64 rho_offset, i64 q_offset, int precision) {
  ResidueRing ring(p, precision);
  u64 r = ring.add(1, ring.mul(ring.reduce_signed(rho_offset), p % ring.modulus()));
  u64 s = ring.add(1, ring.mul(ring.reduce_signed(q_offset), p % ring.modulus()));
  return RhoQParams(PadicNumber::from_residue(p, r, precision), PadicNumber::from_residue(p, s, precision));
}

RhoQParams RhoQParams::lifted(int n) const {
  ResidueRing ring = this->ring();
  u64 r = rho_residue(), s = q_residue();
  for (int i = 0; i < n; ++i) {
    r = ring.pow(r, prime());
    s = ring.pow(s, prime());
  }
  return RhoQParams(PadicNumber::from_residue(prime(), r, precision_),
                    PadicNumber::from_residue(prime(), s, precision_));
}

RhoQParams RhoQParams::with_precision(int precision) const {
  return RhoQParams(rho_.with_precision(precision), q_.with_precision(precision));
}

// ---------------------------------------------------------- factorials

RhoQFactorials::RhoQFactorials(const RhoQParams& params)
    : prime_(params.prime()), precision_(params.precision()), rho_(params.rho_residue()),
      q_(params.q_residue()) {
  table_.push_back(PadicNumber::from_integer(1, prime_, precision_));
}

PadicNumber RhoQFactorials::get(u64 n) const {
  {
    std::shared_lock lock(mutex_);
    if (n < table_.size()) return table_[n];
  }
  std::unique_lock lock(mutex_);
  ResidueRing ring(prime_, precision_);
  while (table_.size() <= n) {
    u64 k = table_.size();
    PadicNumber term = PadicNumber::from_residue(prime_, rhoq_integer_residue(k, rho_, q_, ring), precision_);
    table_.push_back(table_.back() * term);
  }
  return table_[n];
}

// ------------------------------------------------------------ integers

u64 rhoq_integer_residue(u64 n, u64 rho, u64 q, const ResidueRing& ring) {
  // Invariant: s = [k], r = rho^k, t = q^k for the prefix k of n's bits.
  u64 s = 0, r = ring.reduce(1), t = ring.reduce(1);
  for (int bit = 63; bit >= 0; --bit) {
    // k -> 2k: [2k] = (q^k + rho^k)[k]
    s = ring.mul(s, ring.add(r, t));
    r = ring.mul(r, r);
    t = ring.mul(t, t);
    if ((n >> bit) & 1) {
      // k -> k+1: [k+1] = q[k] + rho^k
      s = ring.add(ring.mul(q, s), r);
      r = ring.mul(r, rho);
      t = ring.mul(t, q);
    }
  }
  return s;
}

PadicNumber rhoq_integer(u64 n, const RhoQParams& params) {
  if (n == 0) return PadicNumber::exact_zero(params.prime());
  return PadicNumber::from_residue(
      params.prime(),
      rhoq_integer_residue(n, params.rho_residue(), params.q_residue(), params.ring()),
      params.precision());
}

PadicNumber rhoq_number(const PadicNumber& x, const RhoQParams& params) {
  if (params.degenerate()) {
    throw DomainError("[x]_{rho,q} at a non-integer exponent needs rho != q");
  }
  int digits = params.precision();
  return (rhoq_power(params.rho(), x, digits) - rhoq_power(params.q(), x, digits)) /
         (params.rho() - params.q());
}

PadicNumber q_number(u64 x, const PadicNumber& q) {
  PadicNumber one = PadicNumber::from_integer(1, q.prime(), q.abs_precision());
  return rhoq_integer(x, RhoQParams(one, q));
}

PadicNumber q_number(const PadicNumber& x, const PadicNumber& q) {
  PadicNumber one = PadicNumber::from_integer(1, q.prime(), max_precision(q.prime()));
  PadicNumber q_minus_one = q - one;
  if (q_minus_one.valuation() < 1) throw DomainError("q must lie in 1 + pZ_p");
  if (q_minus_one.is_zero()) return x;
  return (one - rhoq_power(q, x, q.abs_precision())) / (one - q);
}

PadicNumber rhoq_factorial(u64 n, const RhoQParams& params) { return params.factorials().get(n); }

PadicNumber rhoq_binomial(u64 n, u64 k, const RhoQParams& params) {
  if (k > n) return PadicNumber::exact_zero(params.prime());
  const auto& f = params.factorials();
  PadicNumber b = f.get(n) / (f.get(n - k) * f.get(k));
  if (!b.is_integral()) throw DomainError("Gaussian binomial came out non-integral");
  return b;
}

// --------------------------------------------------------------- powers

PadicNumber rhoq_power(const PadicNumber& base, const PadicNumber& exponent, int digits) {
  require_one_plus_pzp(base, "base");
  if (!exponent.is_integral()) throw DomainError("exponent must lie in Z_p");
  const u64 p = base.prime();
  PadicNumber one = PadicNumber::from_integer(1, p, max_precision(p));
  const int base_gap = (base - one).valuation();
  // base^(p^e) == 1 mod p^(e + base_gap), so an exponent known mod p^e
  // pins the result to e + base_gap digits.
  int out = std::min(digits, base.abs_precision());
  if (!exponent.is_exact_zero() && base_gap != kInfinity) {
    out = std::min(out, exponent.abs_precision() + base_gap);
  }
  if (out <= 0) throw PrecisionError("rhoq_power: no digits left");
  ResidueRing ring(p, out);
  u64 e = exponent.residue(std::min(out, exponent.abs_precision()));
  return PadicNumber::from_residue(p, ring.pow(base.residue(out), e), out);
}

PadicNumber rhoq_power(const PadicNumber& base, i64 exponent) {
  require_one_plus_pzp(base, "base");
  const u64 p = base.prime();
  const int digits = base.abs_precision();
  ResidueRing ring(p, digits);
  u64 b = base.residue(digits);
  if (exponent < 0) {
    b = ring.inverse(b);
    exponent = -exponent;
  }
  return PadicNumber::from_residue(p, ring.pow(b, static_cast<u64>(exponent)), digits);
}

}  // namespace rhoq
