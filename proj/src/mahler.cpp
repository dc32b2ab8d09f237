// SPDX-License-Identifier: Apache-2.0

#include "rhoq/mahler.hpp"

#include <algorithm>

namespace rhoq {

GaussianPascal::GaussianPascal(const RhoQParams& params, int size, const ResidueRing& ring) {
  const u64 rho = params.rho().residue(ring.digits()), q = params.q().residue(ring.digits());
  rows_.reserve(static_cast<std::size_t>(size));
  for (int n = 0; n < size; ++n) {
    std::vector<u64> row(static_cast<std::size_t>(n) + 1);
    row[0] = ring.reduce(1);
    row[static_cast<std::size_t>(n)] = ring.reduce(1);
    u64 rho_k = rho;
    for (int k = 1; k < n; ++k) {
      const auto& prev = rows_[static_cast<std::size_t>(n - 1)];
      row[static_cast<std::size_t>(k)] =
          ring.add(ring.mul(ring.pow(q, static_cast<u64>(n - k)), prev[static_cast<std::size_t>(k - 1)]),
                   ring.mul(rho_k, prev[static_cast<std::size_t>(k)]));
      rho_k = ring.mul(rho_k, rho);
    }
    rows_.push_back(std::move(row));
  }
}

u64 GaussianPascal::at(int n, int k) const {
  if (k < 0 || k > n) return 0;
  return rows_.at(static_cast<std::size_t>(n)).at(static_cast<std::size_t>(k));
}

std::string to_string(MahlerBasis basis) {
  return basis == MahlerBasis::kClassical ? "classical" : "gaussian";
}

// ----------------------------------------------------------------- series

MahlerSeries::MahlerSeries(RhoQParams params, std::vector<PadicNumber> coefficients)
    : params_(std::move(params)), coefficients_(std::move(coefficients)) {}

MahlerBasis MahlerSeries::basis() const {
  const PadicNumber one = PadicNumber::from_integer(1, params_.prime(), params_.precision());
  return ((params_.rho() - one).is_zero() && (params_.q() - one).is_zero()) ? MahlerBasis::kClassical
                                                                            : MahlerBasis::kGaussian;
}

std::vector<Norm> MahlerSeries::coefficient_norms() const {
  std::vector<Norm> out;
  for (const auto& c : coefficients_) out.push_back(c.norm());
  return out;
}

Norm MahlerSeries::tail_norm(int m) const {
  Norm best = Norm::zero(params_.prime());
  for (int n = std::max(m, 0); n <= order(); ++n) best = max(best, coefficients_[static_cast<std::size_t>(n)].norm());
  return best;
}

int MahlerSeries::decay_index() const {
  const int p = static_cast<int>(params_.prime());
  int index = -1;
  for (int n = order(); n >= 0; --n) {
    if (coefficients_[static_cast<std::size_t>(n)].valuation() < n / p) break;
    index = n;
  }
  return index;
}

MahlerSeries MahlerSeries::truncated(int m) const {
  const auto end = coefficients_.begin() + std::min<std::ptrdiff_t>(m + 1, static_cast<std::ptrdiff_t>(coefficients_.size()));
  return MahlerSeries(params_, std::vector<PadicNumber>(coefficients_.begin(), end));
}

MahlerSeries mahler_coefficients(const IntegrableFunction& f, int order, const RhoQParams& params) {
  if (order < 0) throw DomainError("negative Mahler order");
  const u64 p = params.prime();
  const int w = std::min({f.precision(), params.precision(), max_precision(p)});
  ResidueRing ring(p, w);
  std::vector<u64> values(static_cast<std::size_t>(order) + 1);
  f.fill(0, 1, values, ring);
  GaussianPascal pascal(params, order + 1, ring);
  std::vector<u64> a(values.size());
  for (int n = 0; n <= order; ++n) {
    u64 acc = values[static_cast<std::size_t>(n)];
    for (int j = 0; j < n; ++j) acc = ring.sub(acc, ring.mul(a[static_cast<std::size_t>(j)], pascal.at(n, j)));
    a[static_cast<std::size_t>(n)] = acc;
  }
  std::vector<PadicNumber> coeffs;
  for (u64 r : a) coeffs.push_back(PadicNumber::from_residue(p, r, w));
  return MahlerSeries(params.with_precision(w), std::move(coeffs));
}

MahlerSeries mahler_from_values(std::span<const PadicNumber> values, const RhoQParams& params) {
  if (values.empty()) throw DomainError("no values to expand");
  const u64 p = params.prime();
  int w = std::min(params.precision(), max_precision(p));
  for (const auto& v : values) w = std::min(w, v.abs_precision());
  if (w < 1) throw PrecisionError("values carry no digits");
  ResidueRing ring(p, w);
  const int order = static_cast<int>(values.size()) - 1;
  GaussianPascal pascal(params, order + 1, ring);
  std::vector<u64> a(values.size());
  for (int n = 0; n <= order; ++n) {
    u64 acc = values[static_cast<std::size_t>(n)].residue(w);
    for (int j = 0; j < n; ++j) acc = ring.sub(acc, ring.mul(a[static_cast<std::size_t>(j)], pascal.at(n, j)));
    a[static_cast<std::size_t>(n)] = acc;
  }
  std::vector<PadicNumber> coeffs;
  for (u64 r : a) coeffs.push_back(PadicNumber::from_residue(p, r, w));
  return MahlerSeries(params.with_precision(w), std::move(coeffs));
}

PadicNumber rhoq_binomial_at(u64 x, int n, const RhoQParams& params) {
  const u64 p = params.prime();
  if (n < 0) throw DomainError("negative binomial index");
  if (static_cast<u64>(n) > x) return PadicNumber::exact_zero(p);
  PadicNumber b = PadicNumber::from_integer(1, p, params.precision());
  for (int k = 1; k <= n; ++k) {
    b = b * rhoq_integer(x - static_cast<u64>(k) + 1, params) / rhoq_integer(static_cast<u64>(k), params);
  }
  return b;
}

PadicNumber mahler_evaluate(const MahlerSeries& s, u64 x) {
  PadicNumber sum = PadicNumber::exact_zero(s.params().prime());
  for (int n = 0; n <= s.order() && static_cast<u64>(n) <= x; ++n) {
    const PadicNumber& c = s.coefficients()[static_cast<std::size_t>(n)];
    if (c.is_exact_zero()) continue;
    sum += c * rhoq_binomial_at(x, n, s.params());
  }
  return sum;
}

// --------------------------------------------------------------- function

namespace {

int mahler_precision(const MahlerSeries& s) {
  const u64 p = s.params().prime();
  int lost = 0;
  for (int k = 2; k <= s.order(); ++k) lost += valuation_of(static_cast<u64>(k), p);
  int prec = std::min(s.params().precision(), max_precision(p)) - lost;
  for (const auto& c : s.coefficients()) prec = std::min(prec, c.abs_precision());
  if (prec < 1) throw PrecisionError("Mahler series too long for the working precision");
  return prec;
}

}  // namespace

MahlerFunction::MahlerFunction(MahlerSeries series)
    : IntegrableFunction(series.params().prime(), mahler_precision(series)), series_(std::move(series)) {
  const u64 p = prime();
  const std::size_t m = static_cast<std::size_t>(series_.order()) + 1;
  if (m == 0) throw DomainError("empty Mahler series");
  fact_valuation_.assign(m, 0);
  for (std::size_t n = 2; n < m; ++n) fact_valuation_[n] = fact_valuation_[n - 1] + valuation_of(n, p);
  extra_ = fact_valuation_[m - 1];
  const int digits = precision() + extra_;
  ResidueRing ring(p, digits);
  const u64 rho = series_.params().rho().residue(digits), q = series_.params().q().residue(digits);
  const u64 rho_inv = ring.inverse(rho), q_inv = ring.inverse(q);
  u64 ri = ring.reduce(1), qi = ring.reduce(1), fact_unit = ring.reduce(1);
  for (std::size_t n = 0; n < m; ++n) {
    coeff_.push_back(series_.coefficients()[n].residue(precision()));
    bracket_.push_back(rhoq_integer_residue(n, rho, q, ring));
    rho_inv_pow_.push_back(ri);
    q_inv_pow_.push_back(qi);
    if (n > 0) {
      u64 b = bracket_[n];
      while (b % p == 0) b /= p;
      fact_unit = ring.mul(fact_unit, b);
    }
    fact_unit_inv_.push_back(ring.inverse(fact_unit));
    ri = ring.mul(ri, rho_inv);
    qi = ring.mul(qi, q_inv);
  }
}

std::string MahlerFunction::describe() const {
  return "mahler(order=" + std::to_string(series_.order()) + ", " + to_string(series_.basis()) + ")";
}

u64 MahlerFunction::residue_at(u64 x, const ResidueRing& ring) const {
  check_ring(ring);
  // {x, n} = prod_{j<n} [x - j] / [n]!, with [x - j] = ([x] - rho^(x-j) [j]) / q^j.
  // The numerator is carried extra_ digits deeper so that dividing out the
  // p-part of [n]! still leaves ring.digits() digits.
  const u64 p = prime();
  ResidueRing deep(p, ring.digits() + extra_);
  const u64 rho = series_.params().rho().residue(deep.digits()), q = series_.params().q().residue(deep.digits());
  const u64 bx = rhoq_integer_residue(x, rho, q, deep);
  const u64 rho_x = deep.pow(rho, x);
  const u64 top = std::min<u64>(x, static_cast<u64>(series_.order()));
  u64 acc = ring.reduce(coeff_[0]);
  u64 num = deep.reduce(1);
  for (u64 n = 1; n <= top; ++n) {
    const std::size_t j = static_cast<std::size_t>(n - 1);
    const u64 shifted = deep.mul(deep.sub(bx, deep.mul(deep.mul(rho_x, deep.reduce(rho_inv_pow_[j])), deep.reduce(bracket_[j]))),
                                 deep.reduce(q_inv_pow_[j]));
    num = deep.mul(num, shifted);
    u64 reduced = num;
    for (int e = 0; e < fact_valuation_[n]; ++e) reduced /= p;
    const u64 binom = ring.mul(ring.reduce(reduced), ring.reduce(fact_unit_inv_[n]));
    acc = ring.add(acc, ring.mul(ring.reduce(coeff_[n]), binom));
  }
  return acc;
}

void MahlerFunction::fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const {
  check_ring(ring);
  if (stride != 1 || out.empty()) {
    IntegrableFunction::fill(start, stride, out, ring);
    return;
  }
  const int order = series_.order();
  const std::size_t m = static_cast<std::size_t>(order) + 1;
  const int d = ring.digits();
  std::vector<u64> coeff(m), row(m), q_inv_pow(m), rho_pow(m);
  const u64 rho = series_.params().rho().residue(d), q = series_.params().q().residue(d);
  const u64 q_inv = ring.inverse(q);
  q_inv_pow[0] = rho_pow[0] = ring.reduce(1);
  for (std::size_t n = 0; n < m; ++n) {
    coeff[n] = series_.coefficients()[n].residue(d);
    row[n] = rhoq_binomial_at(start, static_cast<int>(n), series_.params()).residue(d);
    if (n > 0) {
      q_inv_pow[n] = ring.mul(q_inv_pow[n - 1], q_inv);
      rho_pow[n] = ring.mul(rho_pow[n - 1], rho);
    }
  }
  u64 q_next = ring.pow(q, start + 1);  // q^(x+1)
  for (std::size_t i = 0;; ++i) {
    u64 acc = 0;
    for (std::size_t n = 0; n < m; ++n) acc = ring.add(acc, ring.mul(coeff[n], row[n]));
    out[i] = acc;
    if (i + 1 == out.size()) break;
    // {x+1, n} = rho^n {x, n} + q^(x+1-n) {x, n-1}
    for (std::size_t n = m - 1; n >= 1; --n) {
      row[n] = ring.add(ring.mul(rho_pow[n], row[n]), ring.mul(ring.mul(q_next, q_inv_pow[n]), row[n - 1]));
    }
    q_next = ring.mul(q_next, q);
  }
}

FunctionPtr truncation_polynomial(const MahlerSeries& s, int m) {
  return std::make_shared<MahlerFunction>(s.truncated(m));
}

}  // namespace rhoq
