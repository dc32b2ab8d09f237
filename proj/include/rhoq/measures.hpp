// SPDX-License-Identifier: Apache-2.0
//
// Distributions on Z_p as functions of balls, their invariance
// classification, and the deformed Radon-Nikodym derivative
//
//   f_d(x) = lim_N [p^N] d(x + p^N Z_p).

#pragma once

#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "rhoq/approximant.hpp"
#include "rhoq/ball.hpp"
#include "rhoq/integration.hpp"
#include "rhoq/norms.hpp"

namespace rhoq {

class Distribution {
 public:
  explicit Distribution(RhoQParams params) : params_(std::move(params)) {}
  virtual ~Distribution() = default;

  virtual std::string family() const = 0;
  const RhoQParams& params() const { return params_; }
  u64 prime() const { return params_.prime(); }

  virtual PadicNumber value(const Ball& ball) const = 0;
  /// [p^N] d(ball). The default multiplies value() back up; families that
  /// know the product directly override it to skip the division.
  virtual PadicNumber scaled(const Ball& ball) const;

 private:
  RhoQParams params_;
};

using DistributionPtr = std::shared_ptr<const Distribution>;

/// mu_{rho,q}(a + p^N Z_p) = rho^(p^N)/[p^N] * (q/rho)^a.
class RhoQHaar final : public Distribution {
 public:
  using Distribution::Distribution;
  std::string family() const override { return "rhoq_haar"; }
  PadicNumber value(const Ball& ball) const override;
  PadicNumber scaled(const Ball& ball) const override;
};

class ZeroDistribution final : public Distribution {
 public:
  using Distribution::Distribution;
  std::string family() const override { return "zero"; }
  PadicNumber value(const Ball& ball) const override;
  PadicNumber scaled(const Ball& ball) const override;
};

enum class TruncationMode {
  kInnerLevels,  // sum to level N + levels: the natural choice for limits in N
  kTotalLevel,   // sum to a fixed level: exactly additive across N
};

struct WeightedOptions {
  TruncationMode mode = TruncationMode::kInnerLevels;
  int levels = 6;
};

/// mu~_f for a general integrand, truncated as configured.
class WeightedDistribution final : public Distribution {
 public:
  WeightedDistribution(FunctionPtr f, RhoQParams params, WeightedOptions options = {});
  std::string family() const override { return "weighted[" + f_->describe() + "]"; }
  PadicNumber value(const Ball& ball) const override;
  PadicNumber scaled(const Ball& ball) const override;
  const FunctionPtr& integrand() const { return f_; }

 private:
  FunctionPtr f_;
  WeightedOptions options_;
};

/// mu~_P for P a polynomial in [x], through the expansion path.
class PolynomialWeightedDistribution final : public Distribution {
 public:
  explicit PolynomialWeightedDistribution(std::shared_ptr<const PolynomialWeights> weights);
  std::string family() const override { return "weighted[" + weights_->polynomial().describe() + "]"; }
  PadicNumber value(const Ball& ball) const override;
  PadicNumber scaled(const Ball& ball) const override;
  const PolynomialWeights& weights() const { return *weights_; }

 private:
  std::shared_ptr<const PolynomialWeights> weights_;
};

/// sum_i c_i d_i.
class CombinationDistribution final : public Distribution {
 public:
  struct Term {
    PadicNumber coefficient;
    DistributionPtr distribution;
  };
  explicit CombinationDistribution(std::vector<Term> terms);
  std::string family() const override;
  PadicNumber value(const Ball& ball) const override;
  PadicNumber scaled(const Ball& ball) const override;

 private:
  std::vector<Term> terms_;
};

/// Caches value() and scaled() per ball; concurrent readers share a lock.
class MemoizedDistribution final : public Distribution {
 public:
  explicit MemoizedDistribution(DistributionPtr inner);
  std::string family() const override { return inner_->family(); }
  PadicNumber value(const Ball& ball) const override;
  PadicNumber scaled(const Ball& ball) const override;
  std::size_t cached() const;

 private:
  using Key = std::pair<u64, int>;
  PadicNumber lookup(std::map<Key, PadicNumber>& table, const Ball& ball, bool want_scaled) const;

  DistributionPtr inner_;
  mutable std::shared_mutex mutex_;
  mutable std::map<Key, PadicNumber> values_;
  mutable std::map<Key, PadicNumber> scaled_;
};

DistributionPtr make_difference(DistributionPtr a, DistributionPtr b);
DistributionPtr memoize(DistributionPtr d);

/// mu_{rho,q}(ball).
PadicNumber rhoq_haar_measure(const Ball& ball, const RhoQParams& params);

// ------------------------------------------------------------ invariance

enum class InvarianceKind { kStrongly, kOneAdmissible, kWeakly, kNone, kInconclusive };

std::string to_string(InvarianceKind kind);

/// One bound model delta_N <= C * b_N fitted on all but the last level and
/// checked on the last one.
struct ModelFit {
  std::string model;          // "rho_q_gap": b_N = |rho^(p^N) - q^(p^N)|; "level": b_N = p^-N
  bool usable = false;        // false when b_N vanishes on the window
  Norm constant;              // fitted C
  int spread = 0;             // max - min of v(b_N) - v(delta_N) over the fit levels
  bool holdout_ok = false;
  std::vector<Norm> bounds;   // b_N per level
};

struct InvarianceReport {
  std::string family;
  LevelRange levels;
  std::size_t sample_count = 0;
  std::vector<Norm> deltas;         // delta_N, N in levels
  std::vector<Norm> admissibility;  // c_N = max |[p^N] d(ball)| / |rho^(p^N)|
  ModelFit gap_model;
  ModelFit level_model;
  std::string chosen_model;
  bool weakly = false;
  bool strongly = false;
  bool one_admissible = false;
  InvarianceKind kind = InvarianceKind::kInconclusive;
};

struct InvarianceOptions {
  /// "Tends to zero" on a finite window: non-increasing and the final
  /// value below p^-threshold_exponent.
  int threshold_exponent = 2;
};

/// delta_N = max over samples a of |[p^N] d(a + p^N Z_p) - [p^(N+1)] d(a + p^(N+1) Z_p)|.
InvarianceReport check_invariance(const Distribution& d, LevelRange levels, std::span<const u64> sample_points,
                                  InvarianceOptions options = {});

/// Every residue below p^smallest_level, then `extra` pseudo-random integers
/// below p^largest_level from a fixed seed.
std::vector<u64> default_sample_points(u64 p, int smallest_level, int largest_level, u64 seed,
                                       std::size_t extra = 32);

/// A_N = [p^N] d(x mod p^N + p^N Z_p).
ApproximantSequence radon_nikodym_derivative(const Distribution& d, u64 x, LevelRange levels, int target_digits);

}  // namespace rhoq
