// SPDX-License-Identifier: Apache-2.0
//
// Z_p-valued functions sampled at nonnegative integers. Integration only
// ever needs f(start + i*stride) for runs of consecutive i, so each family
// provides an incremental `fill` alongside a pointwise `residue_at`; the
// two are independent code paths and the tests compare them.

#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rhoq/rhoq_calculus.hpp"

namespace rhoq {

enum class FunctionKind {
  kConstant,
  kPolynomialX,
  kPolynomialRhoQ,
  kExponential,
  kCarlitz,
  kMahler,
  kCombination,
  kProduct,
};

std::string to_string(FunctionKind kind);

class IntegrableFunction {
 public:
  IntegrableFunction(u64 prime, int precision) : prime_(prime), precision_(precision) {}
  virtual ~IntegrableFunction() = default;

  u64 prime() const { return prime_; }
  /// Values are known modulo p^precision().
  int precision() const { return precision_; }

  virtual FunctionKind kind() const = 0;
  virtual std::string describe() const = 0;

  /// f(x) mod p^ring.digits(); ring.digits() <= precision().
  virtual u64 residue_at(u64 x, const ResidueRing& ring) const = 0;

  /// out[i] = f(start + i*stride). The default samples pointwise.
  virtual void fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const;

  PadicNumber value_at(u64 x) const;

 protected:
  void check_ring(const ResidueRing& ring) const;

 private:
  u64 prime_;
  int precision_;
};

using FunctionPtr = std::shared_ptr<const IntegrableFunction>;

class ConstantFunction final : public IntegrableFunction {
 public:
  explicit ConstantFunction(PadicNumber value);
  FunctionKind kind() const override { return FunctionKind::kConstant; }
  std::string describe() const override;
  u64 residue_at(u64 x, const ResidueRing& ring) const override;
  void fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const override;
  const PadicNumber& value() const { return value_; }

 private:
  PadicNumber value_;
};

/// sum_i c_i x^i with integral coefficients.
class PolynomialX final : public IntegrableFunction {
 public:
  explicit PolynomialX(std::vector<PadicNumber> coefficients);
  FunctionKind kind() const override { return FunctionKind::kPolynomialX; }
  std::string describe() const override;
  u64 residue_at(u64 x, const ResidueRing& ring) const override;
  void fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const override;
  const std::vector<PadicNumber>& coefficients() const { return coefficients_; }

 private:
  std::vector<PadicNumber> coefficients_;
};

/// P(x) = sum_i a_i [x]_{rho,q}^i.
class RhoQPolynomial final : public IntegrableFunction {
 public:
  RhoQPolynomial(std::vector<PadicNumber> coefficients, RhoQParams params);
  /// [x]_{rho,q}^k.
  static RhoQPolynomial monomial(int k, const RhoQParams& params);

  FunctionKind kind() const override { return FunctionKind::kPolynomialRhoQ; }
  std::string describe() const override;
  u64 residue_at(u64 x, const ResidueRing& ring) const override;
  void fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const override;

  int degree() const;
  const std::vector<PadicNumber>& coefficients() const { return coefficients_; }
  const RhoQParams& params() const { return params_; }
  /// Formal derivative with respect to [x]_{rho,q}.
  RhoQPolynomial derivative() const;

 private:
  u64 horner(u64 bracket, const std::vector<u64>& coeffs, const ResidueRing& ring) const;
  std::vector<PadicNumber> coefficients_;
  RhoQParams params_;
};

/// base^x for base in 1 + pZ_p.
class ExponentialFunction final : public IntegrableFunction {
 public:
  explicit ExponentialFunction(PadicNumber base);
  FunctionKind kind() const override { return FunctionKind::kExponential; }
  std::string describe() const override;
  u64 residue_at(u64 x, const ResidueRing& ring) const override;
  void fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const override;
  const PadicNumber& base() const { return base_; }

 private:
  PadicNumber base_;
};

/// rho^(a x) [x]_{rho,q}^n, the Carlitz-type Bernoulli integrand.
class CarlitzIntegrand final : public IntegrableFunction {
 public:
  CarlitzIntegrand(int n, i64 a, RhoQParams params);
  FunctionKind kind() const override { return FunctionKind::kCarlitz; }
  std::string describe() const override;
  u64 residue_at(u64 x, const ResidueRing& ring) const override;
  void fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const override;

 private:
  u64 rho_power_a(const ResidueRing& ring) const;
  int n_;
  i64 a_;
  RhoQParams params_;
};

/// sum_j c_j f_j with integral c_j.
class LinearCombination final : public IntegrableFunction {
 public:
  struct Term {
    PadicNumber coefficient;
    FunctionPtr function;
  };
  explicit LinearCombination(std::vector<Term> terms);
  FunctionKind kind() const override { return FunctionKind::kCombination; }
  std::string describe() const override;
  u64 residue_at(u64 x, const ResidueRing& ring) const override;
  void fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const override;

 private:
  std::vector<Term> terms_;
};

class ProductFunction final : public IntegrableFunction {
 public:
  ProductFunction(FunctionPtr left, FunctionPtr right);
  FunctionKind kind() const override { return FunctionKind::kProduct; }
  std::string describe() const override;
  u64 residue_at(u64 x, const ResidueRing& ring) const override;
  void fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const override;

 private:
  FunctionPtr left_;
  FunctionPtr right_;
};

/// y -> f(offset + scale*y); restricts f to the ball offset + scale*Z_p.
class AffineComposition final : public IntegrableFunction {
 public:
  AffineComposition(FunctionPtr inner, u64 offset, u64 scale);
  FunctionKind kind() const override { return inner_->kind(); }
  std::string describe() const override;
  u64 residue_at(u64 y, const ResidueRing& ring) const override;
  void fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const override;

 private:
  FunctionPtr inner_;
  u64 offset_;
  u64 scale_;
};

// Convenience constructors used throughout the harness.
FunctionPtr make_constant(i64 c, u64 p, int precision);
FunctionPtr make_monomial_x(int k, u64 p, int precision);
FunctionPtr make_rhoq_monomial(int k, const RhoQParams& params);
/// (q/rho)^x.
FunctionPtr make_ratio_power(const RhoQParams& params);
FunctionPtr make_product(FunctionPtr a, FunctionPtr b);
FunctionPtr make_combination(std::vector<LinearCombination::Term> terms);

}  // namespace rhoq
