// SPDX-License-Identifier: Apache-2.0
//
// Elements of Q_p at finite absolute precision.
//
// A nonzero PadicNumber is p^v * u + O(p^N) with u a unit known modulo
// p^(N - v). N is the absolute precision, N - v the relative precision.
// A value whose known digits are all zero is an "inexact zero" O(p^N); its
// valuation is reported as N, the best available lower bound. The exact
// zero is a separate value with infinite valuation and precision.
//
// Arithmetic follows the capped model: a result is never more precise
// than its operands imply. Division by a value with positive valuation
// therefore moves the absolute precision down; callers that want to see
// those losses pass a PrecisionBudget.

#pragma once

#include <compare>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "rhoq/residue.hpp"

namespace rhoq {

inline constexpr int kInfinity = std::numeric_limits<int>::max();

/// |x|_p = p^(-valuation). Ordered by size, so a larger valuation compares
/// smaller. The zero norm has valuation kInfinity.
struct Norm {
  u64 prime = 0;
  int valuation = kInfinity;

  static Norm zero(u64 p) { return {p, kInfinity}; }
  static Norm power(u64 p, int exponent) { return {p, -exponent}; }  // p^exponent

  bool is_zero() const { return valuation == kInfinity; }
  double to_double() const;
  /// "0", "1", "5^-3", "5^2".
  std::string to_string() const;

  Norm operator*(Norm other) const;
  /// Quotient of norms; the divisor must be nonzero.
  Norm operator/(Norm other) const;

  friend bool operator==(Norm a, Norm b) { return a.valuation == b.valuation; }
  friend std::strong_ordering operator<=>(Norm a, Norm b) { return b.valuation <=> a.valuation; }
};

Norm max(Norm a, Norm b);

struct PrecisionLoss {
  std::string operation;
  int digits;
};

/// Per-computation log of relative digits given up to division.
class PrecisionBudget {
 public:
  explicit PrecisionBudget(int target_precision) : target_(target_precision) {}

  void record(std::string operation, int digits);

  int target() const { return target_; }
  int total_loss() const;
  int remaining() const { return target_ - total_loss(); }
  const std::vector<PrecisionLoss>& entries() const { return entries_; }

 private:
  int target_;
  std::vector<PrecisionLoss> entries_;
};

class PadicNumber {
 public:
  /// Exact zero at prime 3; only useful as a placeholder before assignment.
  PadicNumber() : PadicNumber(exact_zero(3)) {}

  static PadicNumber exact_zero(u64 p);
  /// O(p^abs_precision).
  static PadicNumber zero_at(u64 p, int abs_precision);
  /// n reduced modulo p^abs_precision; n == 0 gives the exact zero.
  static PadicNumber from_integer(i64 n, u64 p, int abs_precision);
  /// The integral value `residue` known modulo p^abs_precision.
  static PadicNumber from_residue(u64 p, u64 residue, int abs_precision);
  /// p^valuation * unit known modulo p^abs_precision; `unit` may carry
  /// factors of p, which are moved into the valuation.
  static PadicNumber from_parts(u64 p, int valuation, u64 unit, int abs_precision);

  u64 prime() const { return prime_; }
  bool is_exact_zero() const { return exact_zero_; }
  /// True for the exact zero and for values with no nonzero known digit.
  bool is_zero() const { return exact_zero_ || unit_ == 0; }

  /// kInfinity for the exact zero; the precision for an inexact zero.
  int valuation() const { return exact_zero_ ? kInfinity : valuation_; }
  int abs_precision() const { return exact_zero_ ? kInfinity : abs_precision_; }
  int rel_precision() const { return exact_zero_ ? kInfinity : abs_precision_ - valuation_; }
  u64 unit() const { return unit_; }

  Norm norm() const { return {prime_, valuation()}; }
  bool is_integral() const { return valuation() >= 0; }

  /// Value modulo p^digits. Requires an integral value known to at least
  /// that many digits.
  u64 residue(int digits) const;

  /// Drop precision to at most abs_precision; never raises it.
  PadicNumber with_precision(int abs_precision) const;

  PadicNumber operator-() const;
  friend PadicNumber operator+(const PadicNumber& x, const PadicNumber& y);
  friend PadicNumber operator-(const PadicNumber& x, const PadicNumber& y);
  friend PadicNumber operator*(const PadicNumber& x, const PadicNumber& y);
  friend PadicNumber operator/(const PadicNumber& x, const PadicNumber& y);
  PadicNumber& operator+=(const PadicNumber& y) { return *this = *this + y; }
  PadicNumber& operator-=(const PadicNumber& y) { return *this = *this - y; }
  PadicNumber& operator*=(const PadicNumber& y) { return *this = *this * y; }

  /// Structural equality: same digits at the same precision.
  friend bool operator==(const PadicNumber& x, const PadicNumber& y);

  /// Canonical rendering, see docs/FORMAT.md.
  std::string to_string() const;

 private:
  PadicNumber(u64 p, bool exact_zero, int valuation, u64 unit, int abs_precision)
      : prime_(p), exact_zero_(exact_zero), valuation_(valuation), unit_(unit),
        abs_precision_(abs_precision) {}

  u64 prime_;
  bool exact_zero_;
  int valuation_;
  u64 unit_;
  int abs_precision_;
};

/// x / y, recording the digits lost to the divisor's valuation.
PadicNumber div(const PadicNumber& x, const PadicNumber& y, PrecisionBudget& budget);

/// x^n for n >= 0 (negative n inverts first).
PadicNumber pow(const PadicNumber& x, i64 n);

/// True when x - y is known to vanish modulo p^digits.
bool agrees_to(const PadicNumber& x, const PadicNumber& y, int digits);

/// log(x) = sum_{n>=1} (-1)^(n+1) (x-1)^n / n for x in 1 + pZ_p.
PadicNumber padic_log(const PadicNumber& x);

/// Parses the canonical rendering produced by to_string().
PadicNumber parse_padic(std::string_view text);

std::ostream& operator<<(std::ostream& os, const PadicNumber& x);

}  // namespace rhoq
