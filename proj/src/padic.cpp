// SPDX-License-Identifier: Apache-2.0

#include "rhoq/padic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace rhoq {

// ---------------------------------------------------------------- Norm

double Norm::to_double() const {
  if (is_zero()) return 0.0;
  return std::pow(static_cast<double>(prime), -static_cast<double>(valuation));
}

std::string Norm::to_string() const {
  if (is_zero()) return "0";
  if (valuation == 0) return "1";
  return std::to_string(prime) + "^" + std::to_string(-valuation);
}

Norm Norm::operator*(Norm other) const {
  if (is_zero() || other.is_zero()) return zero(prime);
  return {prime, valuation + other.valuation};
}

Norm Norm::operator/(Norm other) const {
  if (other.is_zero()) throw DomainError("division by the zero norm");
  if (is_zero()) return zero(prime);
  return {prime, valuation - other.valuation};
}

Norm max(Norm a, Norm b) { return a < b ? b : a; }

// ------------------------------------------------------- PrecisionBudget

void PrecisionBudget::record(std::string operation, int digits) {
  if (digits > 0) entries_.push_back({std::move(operation), digits});
}

int PrecisionBudget::total_loss() const {
  int total = 0;
  for (const auto& e : entries_) total += e.digits;
  return total;
}

// ---------------------------------------------------------- PadicNumber

namespace {

void require_prime(u64 p) {
  if (p < 3 || !is_prime(p)) {
    throw DomainError("p must be an odd prime, got " + std::to_string(p));
  }
}

void require_same_prime(const PadicNumber& x, const PadicNumber& y) {
  if (x.prime() != y.prime()) {
    throw PrimeMismatch("prime mismatch: " + std::to_string(x.prime()) + " vs " +
                        std::to_string(y.prime()));
  }
}

// Unit residue of x shifted up by `shift` digits, modulo p^digits.
u64 shifted_unit(const PadicNumber& x, int shift, int digits) {
  if (x.is_zero() || shift >= digits) return 0;
  ResidueRing ring(x.prime(), digits);
  return ring.mul(ring.reduce(x.unit()), ipow(x.prime(), shift));
}

}  // namespace

PadicNumber PadicNumber::exact_zero(u64 p) { return PadicNumber(p, true, kInfinity, 0, kInfinity); }

PadicNumber PadicNumber::zero_at(u64 p, int abs_precision) {
  return PadicNumber(p, false, abs_precision, 0, abs_precision);
}

PadicNumber PadicNumber::from_integer(i64 n, u64 p, int abs_precision) {
  require_prime(p);
  if (abs_precision < 1) throw PrecisionError("precision must be at least 1");
  if (abs_precision > max_precision(p)) {
    throw PrecisionError("precision " + std::to_string(abs_precision) + " exceeds the maximum " +
                         std::to_string(max_precision(p)) + " for p=" + std::to_string(p));
  }
  if (n == 0) return exact_zero(p);
  ResidueRing ring(p, abs_precision);
  return from_residue(p, ring.reduce_signed(n), abs_precision);
}

PadicNumber PadicNumber::from_residue(u64 p, u64 residue, int abs_precision) {
  return from_parts(p, 0, residue, abs_precision);
}

PadicNumber PadicNumber::from_parts(u64 p, int valuation, u64 unit, int abs_precision) {
  if (unit == 0 || valuation >= abs_precision) return zero_at(p, abs_precision);
  while (unit % p == 0) {
    unit /= p;
    ++valuation;
    if (valuation >= abs_precision) return zero_at(p, abs_precision);
  }
  int rel = abs_precision - valuation;
  int cap = max_precision(p);
  if (rel > cap) {
    rel = cap;
    abs_precision = valuation + cap;
  }
  unit %= ipow(p, rel);
  return PadicNumber(p, false, valuation, unit, abs_precision);
}

u64 PadicNumber::residue(int digits) const {
  if (digits <= 0) return 0;
  if (exact_zero_) return 0;
  if (valuation_ < 0 && unit_ != 0) throw DomainError("residue of a non-integral value");
  if (abs_precision_ < digits) {
    throw PrecisionError("value known to " + std::to_string(abs_precision_) +
                         " digits, residue requested to " + std::to_string(digits));
  }
  if (unit_ == 0 || valuation_ >= digits) return 0;
  ResidueRing ring(prime_, digits);
  return ring.mul(ring.reduce(unit_), ipow(prime_, valuation_));
}

PadicNumber PadicNumber::with_precision(int abs_precision) const {
  if (exact_zero_) return *this;
  if (abs_precision >= abs_precision_) return *this;
  if (unit_ == 0) return zero_at(prime_, abs_precision);
  return from_parts(prime_, valuation_, unit_, abs_precision);
}

PadicNumber PadicNumber::operator-() const {
  if (is_zero()) return *this;
  u64 m = ipow(prime_, abs_precision_ - valuation_);
  return PadicNumber(prime_, false, valuation_, m - unit_, abs_precision_);
}

PadicNumber operator+(const PadicNumber& x, const PadicNumber& y) {
  require_same_prime(x, y);
  if (x.is_exact_zero()) return y;
  if (y.is_exact_zero()) return x;
  const u64 p = x.prime();
  int n = std::min(x.abs_precision(), y.abs_precision());
  int v = std::min(x.valuation(), y.valuation());
  if (v >= n) return PadicNumber::zero_at(p, n);
  int rel = n - v;
  ResidueRing ring(p, rel);
  u64 sum = ring.add(shifted_unit(x, x.valuation() - v, rel), shifted_unit(y, y.valuation() - v, rel));
  return PadicNumber::from_parts(p, v, sum, n);
}

PadicNumber operator-(const PadicNumber& x, const PadicNumber& y) { return x + (-y); }

PadicNumber operator*(const PadicNumber& x, const PadicNumber& y) {
  require_same_prime(x, y);
  const u64 p = x.prime();
  if (x.is_exact_zero() || y.is_exact_zero()) return PadicNumber::exact_zero(p);
  int v = x.valuation() + y.valuation();
  int rel = std::min(x.rel_precision(), y.rel_precision());
  if (rel <= 0) return PadicNumber::zero_at(p, v);
  ResidueRing ring(p, rel);
  return PadicNumber::from_parts(p, v, ring.mul(ring.reduce(x.unit()), ring.reduce(y.unit())), v + rel);
}

PadicNumber operator/(const PadicNumber& x, const PadicNumber& y) {
  require_same_prime(x, y);
  const u64 p = x.prime();
  if (y.is_exact_zero()) throw DomainError("division by exact zero");
  if (y.is_zero()) {
    throw PrecisionError("division by a value indistinguishable from zero (O(" + std::to_string(p) +
                         "^" + std::to_string(y.abs_precision()) + "))");
  }
  if (x.is_exact_zero()) return x;
  int v = x.valuation() - y.valuation();
  if (x.is_zero()) return PadicNumber::zero_at(p, v);
  int rel = std::min(x.rel_precision(), y.rel_precision());
  ResidueRing ring(p, rel);
  u64 u = ring.mul(ring.reduce(x.unit()), ring.inverse(ring.reduce(y.unit())));
  return PadicNumber::from_parts(p, v, u, v + rel);
}

bool operator==(const PadicNumber& x, const PadicNumber& y) {
  return x.prime_ == y.prime_ && x.exact_zero_ == y.exact_zero_ && x.valuation_ == y.valuation_ &&
         x.unit_ == y.unit_ && x.abs_precision_ == y.abs_precision_;
}

PadicNumber div(const PadicNumber& x, const PadicNumber& y, PrecisionBudget& budget) {
  PadicNumber q = x / y;
  budget.record("div", y.valuation());
  return q;
}

PadicNumber pow(const PadicNumber& x, i64 n) {
  if (n < 0) {
    PadicNumber one = PadicNumber::from_integer(1, x.prime(), std::min(std::max(x.rel_precision(), 1),
                                                                        max_precision(x.prime())));
    return pow(one / x, -n);
  }
  int prec = x.is_exact_zero() ? max_precision(x.prime()) : std::max(x.rel_precision(), 1);
  PadicNumber result = PadicNumber::from_integer(1, x.prime(), std::min(prec, max_precision(x.prime())));
  PadicNumber base = x;
  while (n != 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n != 0) base *= base;
  }
  return result;
}

bool agrees_to(const PadicNumber& x, const PadicNumber& y, int digits) {
  return (x - y).valuation() >= digits;
}

PadicNumber padic_log(const PadicNumber& x) {
  const u64 p = x.prime();
  if (x.valuation() != 0 && !x.is_zero()) {
    throw DomainError("padic_log: argument is not a unit");
  }
  PadicNumber one = PadicNumber::from_integer(1, p, max_precision(p));
  PadicNumber u = x - one;
  if (u.valuation() < 1) throw DomainError("padic_log: argument outside 1 + pZ_p");
  if (u.is_exact_zero()) return u;
  const int target = x.abs_precision();
  if (u.is_zero()) return PadicNumber::zero_at(p, target);

  const int vu = u.valuation();
  PadicNumber sum = PadicNumber::exact_zero(p);
  PadicNumber power = u;
  for (i64 n = 1;; ++n) {
    // Term valuation is n*vu - v_p(n) >= n*vu - floor(log_p n).
    int log_n = 0;
    for (i64 t = n; t >= static_cast<i64>(p); t /= static_cast<i64>(p)) ++log_n;
    if (n * vu - log_n >= target) break;
    PadicNumber term = power / PadicNumber::from_integer(n, p, max_precision(p));
    sum = (n % 2 == 1) ? sum + term : sum - term;
    power *= u;
  }
  return sum.with_precision(target);
}

// ------------------------------------------------------------ rendering

std::string PadicNumber::to_string() const {
  if (exact_zero_) return "0";
  const std::string ps = std::to_string(prime_);
  std::string out = "O(" + ps + "^" + std::to_string(abs_precision_) + "): ";
  if (unit_ == 0) return out + "0";
  const int rel = abs_precision_ - valuation_;
  std::string digits;
  u64 u = unit_;
  for (int i = 0; i < rel; ++i) {
    if (i > 0) digits += " + ";
    digits += std::to_string(u % prime_);
    if (i == 1) digits += "*" + ps;
    if (i >= 2) digits += "*" + ps + "^" + std::to_string(i);
    u /= prime_;
  }
  if (valuation_ == 0) return out + digits;
  return out + ps + "^" + std::to_string(valuation_) + " * (" + digits + ")";
}

std::ostream& operator<<(std::ostream& os, const PadicNumber& x) { return os << x.to_string(); }

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw DomainError("parse_padic: " + what + " at offset " + std::to_string(pos) + " in '" +
                      std::string(text) + "'");
  }
  void skip_spaces() {
    while (pos < text.size() && text[pos] == ' ') ++pos;
  }
  bool consume(std::string_view token) {
    skip_spaces();
    if (text.substr(pos, token.size()) == token) {
      pos += token.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view token) {
    if (!consume(token)) fail("expected '" + std::string(token) + "'");
  }
  i64 integer() {
    skip_spaces();
    i64 value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
    if (ec != std::errc()) fail("expected an integer");
    pos = static_cast<std::size_t>(ptr - text.data());
    return value;
  }
  bool done() {
    skip_spaces();
    return pos == text.size();
  }
};

}  // namespace

PadicNumber parse_padic(std::string_view text) {
  Cursor c{text};
  c.expect("O(");
  const i64 p = c.integer();
  if (p < 3 || !is_prime(static_cast<u64>(p))) c.fail("prime expected");
  const u64 up = static_cast<u64>(p);
  c.expect("^");
  const int abs_precision = static_cast<int>(c.integer());
  c.expect("):");
  std::size_t save = c.pos;
  if (c.consume("0") && c.done()) return PadicNumber::zero_at(up, abs_precision);
  c.pos = save;

  int valuation = 0;
  bool grouped = false;
  // A leading "p^v * (" introduces a shifted digit group.
  save = c.pos;
  if (c.integer() == p && c.consume("^")) {
    valuation = static_cast<int>(c.integer());
    c.expect("*");
    c.expect("(");
    grouped = true;
  } else {
    c.pos = save;
  }

  const int rel = abs_precision - valuation;
  if (rel < 1 || rel > max_precision(up)) c.fail("relative precision out of range");
  u64 unit = 0;
  u64 place = 1;
  for (int i = 0; i < rel; ++i) {
    if (i > 0) c.expect("+");
    i64 d = c.integer();
    if (d < 0 || d >= p) c.fail("digit out of range");
    if (i >= 1) {
      c.expect("*");
      if (c.integer() != p) c.fail("digit place must be the prime");
      if (i >= 2) {
        c.expect("^");
        if (c.integer() != i) c.fail("digit places must be consecutive");
      }
    }
    unit += static_cast<u64>(d) * place;
    if (i + 1 < rel) place *= up;
  }
  if (grouped) c.expect(")");
  if (!c.done()) c.fail("trailing characters");
  if (unit % up == 0) c.fail("leading digit must be nonzero");
  return PadicNumber::from_parts(up, valuation, unit, abs_precision);
}

}  // namespace rhoq
