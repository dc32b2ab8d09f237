// SPDX-License-Identifier: Apache-2.0

#include "rhoq/functions.hpp"

#include <algorithm>

namespace rhoq {

namespace {

int min_precision(const std::vector<PadicNumber>& values, u64 p) {
  int prec = max_precision(p);
  for (const auto& v : values) prec = std::min(prec, v.abs_precision());
  return prec;
}

std::vector<u64> residues(const std::vector<PadicNumber>& values, const ResidueRing& ring) {
  std::vector<u64> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(v.residue(ring.digits()));
  return out;
}

void require_integral(const PadicNumber& c) {
  if (!c.is_integral()) throw DomainError("integrable functions take integral coefficients");
}

}  // namespace

std::string to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::kConstant: return "constant";
    case FunctionKind::kPolynomialX: return "polynomial_x";
    case FunctionKind::kPolynomialRhoQ: return "polynomial_rhoq";
    case FunctionKind::kExponential: return "exponential";
    case FunctionKind::kCarlitz: return "carlitz";
    case FunctionKind::kMahler: return "mahler";
    case FunctionKind::kCombination: return "combination";
    case FunctionKind::kProduct: return "product";
  }
  return "unknown";
}

// ------------------------------------------------------------------ base

void IntegrableFunction::check_ring(const ResidueRing& ring) const {
  if (ring.prime() != prime_) throw PrimeMismatch("function evaluated over the wrong prime");
  if (ring.digits() > precision_) {
    throw PrecisionError(describe() + " is known to " + std::to_string(precision_) +
                         " digits, evaluation requested " + std::to_string(ring.digits()));
  }
}

void IntegrableFunction::fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = residue_at(start + i * stride, ring);
}

PadicNumber IntegrableFunction::value_at(u64 x) const {
  int digits = std::min(precision_, max_precision(prime_));
  ResidueRing ring(prime_, digits);
  return PadicNumber::from_residue(prime_, residue_at(x, ring), digits);
}

// -------------------------------------------------------------- constant

ConstantFunction::ConstantFunction(PadicNumber value)
    : IntegrableFunction(value.prime(), std::min(value.abs_precision(), max_precision(value.prime()))),
      value_(std::move(value)) {
  require_integral(value_);
}

std::string ConstantFunction::describe() const { return "const(" + value_.to_string() + ")"; }

u64 ConstantFunction::residue_at(u64, const ResidueRing& ring) const {
  check_ring(ring);
  return value_.residue(ring.digits());
}

void ConstantFunction::fill(u64, u64, std::span<u64> out, const ResidueRing& ring) const {
  check_ring(ring);
  std::fill(out.begin(), out.end(), value_.residue(ring.digits()));
}

// ------------------------------------------------------- polynomial in x

PolynomialX::PolynomialX(std::vector<PadicNumber> coefficients)
    : IntegrableFunction(coefficients.at(0).prime(), min_precision(coefficients, coefficients.at(0).prime())),
      coefficients_(std::move(coefficients)) {
  for (const auto& c : coefficients_) require_integral(c);
}

std::string PolynomialX::describe() const {
  std::string s = "poly_x(";
  for (std::size_t i = 0; i < coefficients_.size(); ++i) {
    if (i) s += ", ";
    s += coefficients_[i].to_string();
  }
  return s + ")";
}

u64 PolynomialX::residue_at(u64 x, const ResidueRing& ring) const {
  check_ring(ring);
  u64 xr = ring.reduce(x);
  u64 acc = 0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
    acc = ring.add(ring.mul(acc, xr), it->residue(ring.digits()));
  }
  return acc;
}

void PolynomialX::fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const {
  check_ring(ring);
  const auto coeffs = residues(coefficients_, ring);
  u64 x = ring.reduce(start);
  const u64 step = ring.reduce(stride);
  for (auto& o : out) {
    u64 acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = ring.add(ring.mul(acc, x), *it);
    o = acc;
    x = ring.add(x, step);
  }
}

// ------------------------------------------------ polynomial in [x]_{rho,q}

RhoQPolynomial::RhoQPolynomial(std::vector<PadicNumber> coefficients, RhoQParams params)
    : IntegrableFunction(params.prime(),
                         std::min(min_precision(coefficients, params.prime()), params.precision())),
      coefficients_(std::move(coefficients)), params_(std::move(params)) {
  if (coefficients_.empty()) throw DomainError("empty coefficient list");
  for (const auto& c : coefficients_) require_integral(c);
}

RhoQPolynomial RhoQPolynomial::monomial(int k, const RhoQParams& params) {
  std::vector<PadicNumber> c(static_cast<std::size_t>(k) + 1, PadicNumber::exact_zero(params.prime()));
  c[static_cast<std::size_t>(k)] = PadicNumber::from_integer(1, params.prime(), params.precision());
  return RhoQPolynomial(std::move(c), params);
}

int RhoQPolynomial::degree() const {
  for (int i = static_cast<int>(coefficients_.size()) - 1; i >= 0; --i) {
    if (!coefficients_[static_cast<std::size_t>(i)].is_zero()) return i;
  }
  return 0;
}

std::string RhoQPolynomial::describe() const {
  std::string s = "poly_rhoq(";
  for (std::size_t i = 0; i < coefficients_.size(); ++i) {
    if (i) s += ", ";
    s += coefficients_[i].to_string();
  }
  return s + ")";
}

RhoQPolynomial RhoQPolynomial::derivative() const {
  const u64 p = params_.prime();
  if (coefficients_.size() == 1) return RhoQPolynomial({PadicNumber::exact_zero(p)}, params_);
  std::vector<PadicNumber> d;
  for (std::size_t i = 1; i < coefficients_.size(); ++i) {
    d.push_back(coefficients_[i] * PadicNumber::from_integer(static_cast<i64>(i), p, max_precision(p)));
  }
  return RhoQPolynomial(std::move(d), params_);
}

u64 RhoQPolynomial::horner(u64 bracket, const std::vector<u64>& coeffs, const ResidueRing& ring) const {
  u64 acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = ring.add(ring.mul(acc, bracket), *it);
  return acc;
}

u64 RhoQPolynomial::residue_at(u64 x, const ResidueRing& ring) const {
  check_ring(ring);
  u64 rho = params_.rho().residue(ring.digits()), q = params_.q().residue(ring.digits());
  return horner(rhoq_integer_residue(x, rho, q, ring), residues(coefficients_, ring), ring);
}

void RhoQPolynomial::fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const {
  check_ring(ring);
  if (out.empty()) return;
  const auto coeffs = residues(coefficients_, ring);
  const u64 rho = params_.rho().residue(ring.digits()), q = params_.q().residue(ring.digits());
  // [x + s] = q^s [x] + rho^x [s]
  const u64 q_s = ring.pow(q, stride), rho_s = ring.pow(rho, stride);
  const u64 bracket_s = rhoq_integer_residue(stride, rho, q, ring);
  u64 bracket = rhoq_integer_residue(start, rho, q, ring);
  u64 rho_x = ring.pow(rho, start);
  for (auto& o : out) {
    o = horner(bracket, coeffs, ring);
    bracket = ring.add(ring.mul(q_s, bracket), ring.mul(rho_x, bracket_s));
    rho_x = ring.mul(rho_x, rho_s);
  }
}

// ----------------------------------------------------------- exponential

ExponentialFunction::ExponentialFunction(PadicNumber base)
    : IntegrableFunction(base.prime(), base.abs_precision()), base_(std::move(base)) {
  PadicNumber one = PadicNumber::from_integer(1, base_.prime(), max_precision(base_.prime()));
  if (base_.valuation() != 0 || (base_ - one).valuation() < 1) {
    throw DomainError("exponential base must lie in 1 + pZ_p");
  }
}

std::string ExponentialFunction::describe() const { return "exp(" + base_.to_string() + ")^x"; }

u64 ExponentialFunction::residue_at(u64 x, const ResidueRing& ring) const {
  check_ring(ring);
  return ring.pow(base_.residue(ring.digits()), x);
}

void ExponentialFunction::fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const {
  check_ring(ring);
  const u64 b = base_.residue(ring.digits());
  const u64 step = ring.pow(b, stride);
  u64 cur = ring.pow(b, start);
  for (auto& o : out) {
    o = cur;
    cur = ring.mul(cur, step);
  }
}

// --------------------------------------------------------------- Carlitz

CarlitzIntegrand::CarlitzIntegrand(int n, i64 a, RhoQParams params)
    : IntegrableFunction(params.prime(), params.precision()), n_(n), a_(a), params_(std::move(params)) {
  if (n < 0) throw DomainError("Carlitz integrand needs n >= 0");
}

std::string CarlitzIntegrand::describe() const {
  return "carlitz(n=" + std::to_string(n_) + ", a=" + std::to_string(a_) + ")";
}

u64 CarlitzIntegrand::rho_power_a(const ResidueRing& ring) const {
  u64 rho = params_.rho().residue(ring.digits());
  if (a_ < 0) return ring.pow(ring.inverse(rho), static_cast<u64>(-a_));
  return ring.pow(rho, static_cast<u64>(a_));
}

u64 CarlitzIntegrand::residue_at(u64 x, const ResidueRing& ring) const {
  check_ring(ring);
  u64 rho = params_.rho().residue(ring.digits()), q = params_.q().residue(ring.digits());
  u64 bracket = rhoq_integer_residue(x, rho, q, ring);
  return ring.mul(ring.pow(rho_power_a(ring), x), ring.pow(bracket, static_cast<u64>(n_)));
}

void CarlitzIntegrand::fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const {
  check_ring(ring);
  const u64 rho = params_.rho().residue(ring.digits()), q = params_.q().residue(ring.digits());
  const u64 c = rho_power_a(ring);
  const u64 c_s = ring.pow(c, stride);
  const u64 q_s = ring.pow(q, stride), rho_s = ring.pow(rho, stride);
  const u64 bracket_s = rhoq_integer_residue(stride, rho, q, ring);
  u64 bracket = rhoq_integer_residue(start, rho, q, ring);
  u64 rho_x = ring.pow(rho, start);
  u64 c_x = ring.pow(c, start);
  for (auto& o : out) {
    o = ring.mul(c_x, ring.pow(bracket, static_cast<u64>(n_)));
    bracket = ring.add(ring.mul(q_s, bracket), ring.mul(rho_x, bracket_s));
    rho_x = ring.mul(rho_x, rho_s);
    c_x = ring.mul(c_x, c_s);
  }
}

// ----------------------------------------------------------- combinators

namespace {

int combination_precision(const std::vector<LinearCombination::Term>& terms) {
  if (terms.empty()) throw DomainError("empty linear combination");
  const u64 p = terms.front().function->prime();
  int prec = max_precision(p);
  for (const auto& t : terms) {
    if (t.function->prime() != p || t.coefficient.prime() != p) throw PrimeMismatch("mixed primes");
    require_integral(t.coefficient);
    prec = std::min({prec, t.function->precision(), t.coefficient.abs_precision()});
  }
  return prec;
}

}  // namespace

LinearCombination::LinearCombination(std::vector<Term> terms)
    : IntegrableFunction(terms.at(0).function->prime(), combination_precision(terms)), terms_(std::move(terms)) {}

std::string LinearCombination::describe() const {
  std::string s = "comb(";
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) s += " + ";
    s += "[" + terms_[i].coefficient.to_string() + "]*" + terms_[i].function->describe();
  }
  return s + ")";
}

u64 LinearCombination::residue_at(u64 x, const ResidueRing& ring) const {
  check_ring(ring);
  u64 acc = 0;
  for (const auto& t : terms_) {
    acc = ring.add(acc, ring.mul(t.coefficient.residue(ring.digits()), t.function->residue_at(x, ring)));
  }
  return acc;
}

void LinearCombination::fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const {
  check_ring(ring);
  std::fill(out.begin(), out.end(), u64{0});
  std::vector<u64> scratch(out.size());
  for (const auto& t : terms_) {
    t.function->fill(start, stride, scratch, ring);
    const u64 c = t.coefficient.residue(ring.digits());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = ring.add(out[i], ring.mul(c, scratch[i]));
  }
}

ProductFunction::ProductFunction(FunctionPtr left, FunctionPtr right)
    : IntegrableFunction(left->prime(), std::min(left->precision(), right->precision())),
      left_(std::move(left)), right_(std::move(right)) {
  if (left_->prime() != right_->prime()) throw PrimeMismatch("mixed primes in product");
}

std::string ProductFunction::describe() const { return left_->describe() + " * " + right_->describe(); }

u64 ProductFunction::residue_at(u64 x, const ResidueRing& ring) const {
  check_ring(ring);
  return ring.mul(left_->residue_at(x, ring), right_->residue_at(x, ring));
}

void ProductFunction::fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const {
  check_ring(ring);
  left_->fill(start, stride, out, ring);
  std::vector<u64> scratch(out.size());
  right_->fill(start, stride, scratch, ring);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ring.mul(out[i], scratch[i]);
}

AffineComposition::AffineComposition(FunctionPtr inner, u64 offset, u64 scale)
    : IntegrableFunction(inner->prime(), inner->precision()), inner_(std::move(inner)), offset_(offset),
      scale_(scale) {}

std::string AffineComposition::describe() const {
  return inner_->describe() + " o (" + std::to_string(offset_) + " + " + std::to_string(scale_) + "*y)";
}

u64 AffineComposition::residue_at(u64 y, const ResidueRing& ring) const {
  return inner_->residue_at(offset_ + scale_ * y, ring);
}

void AffineComposition::fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const {
  inner_->fill(offset_ + scale_ * start, scale_ * stride, out, ring);
}

// ----------------------------------------------------------- factories

FunctionPtr make_constant(i64 c, u64 p, int precision) {
  return std::make_shared<ConstantFunction>(PadicNumber::from_integer(c, p, precision));
}

FunctionPtr make_monomial_x(int k, u64 p, int precision) {
  std::vector<PadicNumber> c(static_cast<std::size_t>(k) + 1, PadicNumber::exact_zero(p));
  c[static_cast<std::size_t>(k)] = PadicNumber::from_integer(1, p, precision);
  return std::make_shared<PolynomialX>(std::move(c));
}

FunctionPtr make_rhoq_monomial(int k, const RhoQParams& params) {
  return std::make_shared<RhoQPolynomial>(RhoQPolynomial::monomial(k, params));
}

FunctionPtr make_ratio_power(const RhoQParams& params) {
  return std::make_shared<ExponentialFunction>(params.ratio());
}

FunctionPtr make_product(FunctionPtr a, FunctionPtr b) {
  return std::make_shared<ProductFunction>(std::move(a), std::move(b));
}

FunctionPtr make_combination(std::vector<LinearCombination::Term> terms) {
  return std::make_shared<LinearCombination>(std::move(terms));
}

}  // namespace rhoq
