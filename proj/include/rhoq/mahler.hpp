// SPDX-License-Identifier: Apache-2.0
//
// Expansions f(x) = sum_n a_n {x brack n}_{rho,q} in Gaussian binomials.
// At rho = q = 1 the basis is the classical C(x, n).

#pragma once

#include <span>
#include <vector>

#include "rhoq/functions.hpp"

namespace rhoq {

/// Gaussian binomials {n brack k} for 0 <= k <= n <= size-1 as residues, from
/// {n, k} = q^(n-k) {n-1, k-1} + rho^k {n-1, k}. No division anywhere.
class GaussianPascal {
 public:
  GaussianPascal(const RhoQParams& params, int size, const ResidueRing& ring);

  int size() const { return static_cast<int>(rows_.size()); }
  /// Zero when k > n.
  u64 at(int n, int k) const;

 private:
  std::vector<std::vector<u64>> rows_;
};

enum class MahlerBasis { kClassical, kGaussian };

std::string to_string(MahlerBasis basis);

class MahlerSeries {
 public:
  MahlerSeries(RhoQParams params, std::vector<PadicNumber> coefficients);

  const RhoQParams& params() const { return params_; }
  const std::vector<PadicNumber>& coefficients() const { return coefficients_; }
  /// Largest n with a stored coefficient; -1 for the empty series.
  int order() const { return static_cast<int>(coefficients_.size()) - 1; }
  MahlerBasis basis() const;

  std::vector<Norm> coefficient_norms() const;
  /// sup_{n >= m} |a_n| over the stored coefficients.
  Norm tail_norm(int m) const;
  /// First n from which every stored |a_n| <= p^-floor(n/p); -1 if none.
  int decay_index() const;

  /// The first m+1 terms.
  MahlerSeries truncated(int m) const;

 private:
  RhoQParams params_;
  std::vector<PadicNumber> coefficients_;
};

/// Solves sum_n a_n {i brack n} = f(i), i = 0..order, by forward substitution.
MahlerSeries mahler_coefficients(const IntegrableFunction& f, int order, const RhoQParams& params);

/// The same solve from sampled values f(0), ..., f(order); the working
/// precision is the smallest absolute precision among them.
MahlerSeries mahler_from_values(std::span<const PadicNumber> values, const RhoQParams& params);

/// {x brack n}_{rho,q} for arbitrary x >= 0 through prod_{j<n} [x-j] / [n]!.
/// Known to params.precision() - v_p([n]!) digits.
PadicNumber rhoq_binomial_at(u64 x, int n, const RhoQParams& params);

PadicNumber mahler_evaluate(const MahlerSeries& s, u64 x);

/// A finite Mahler series as an integrand.
class MahlerFunction final : public IntegrableFunction {
 public:
  explicit MahlerFunction(MahlerSeries series);
  FunctionKind kind() const override { return FunctionKind::kMahler; }
  std::string describe() const override;
  u64 residue_at(u64 x, const ResidueRing& ring) const override;
  /// Stride 1 walks the Pascal rows; other strides fall back to pointwise.
  void fill(u64 start, u64 stride, std::span<u64> out, const ResidueRing& ring) const override;
  const MahlerSeries& series() const { return series_; }

 private:
  // Residue tables mod p^(precision + extra_), see residue_at.
  MahlerSeries series_;
  int extra_ = 0;
  std::vector<u64> coeff_, bracket_, rho_inv_pow_, q_inv_pow_, fact_unit_inv_;
  std::vector<int> fact_valuation_;
};

/// f_m(x) = sum_{n<=m} a_n {x brack n}.
FunctionPtr truncation_polynomial(const MahlerSeries& s, int m);

}  // namespace rhoq
