// SPDX-License-Identifier: Apache-2.0
//
// The deformed Volkenborn integral
//
//   I(f) = lim_N rho^(p^N)/[p^N] * sum_{x<p^N} f(x) (q/rho)^x,
//
// the weighted distributions mu~_f(a + p^N Z_p) = integral of f over the
// ball, and the Carlitz-type Bernoulli numbers beta_{n:a}. Everything is
// returned as approximant sequences; nothing here takes a limit silently.

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "rhoq/approximant.hpp"
#include "rhoq/ball.hpp"
#include "rhoq/functions.hpp"
#include "rhoq/kernels.hpp"

namespace rhoq {

/// Digits available when integrating f: min of f's and the parameters' precision.
int working_digits(const IntegrableFunction& f, const RhoQParams& params);

/// Largest level whose approximant keeps `target` digits after the division
/// by [p^N] and whose sum stays under `max_terms` terms.
int level_budget(u64 p, int working, int target, u64 max_terms = 60'000'000);

// ------------------------------------------------------------- Volkenborn

PadicNumber volkenborn_approximant(const IntegrableFunction& f, const RhoQParams& params, int level,
                                   KernelMode mode = KernelMode::kParallel);

/// All levels in `levels` from one sweep over 0..p^max - 1.
ApproximantSequence volkenborn_integral(const IntegrableFunction& f, const RhoQParams& params, LevelRange levels,
                                        int target_digits, KernelMode mode = KernelMode::kParallel);

/// Starts from `levels` and widens the window one level at a time until the
/// sequence converges or the level budget runs out.
ApproximantSequence volkenborn_until_converged(const IntegrableFunction& f, const RhoQParams& params,
                                               LevelRange levels, int target_digits);

/// The Carlitz-type Bernoulli number beta_{n:a} = integral of rho^(a x)[x]^n.
ApproximantSequence carlitz_bernoulli(int n, i64 a, const RhoQParams& params, LevelRange levels, int target_digits);

/// beta_{0:a} from the geometric series in closed form:
/// (rho - q) log c / ((c - 1)(log rho - log q)) with c = rho^(a-1) q, and the
/// appropriate limits when c = 1 or rho = q. Empty when precision runs out.
std::optional<PadicNumber> carlitz_geometric_limit(i64 a, const RhoQParams& params);

/// a log(rho) / log(rho q). Empty when log(rho q) vanishes.
std::optional<PadicNumber> carlitz_log_ratio(i64 a, const RhoQParams& params);

// --------------------------------------------------- weighted distributions

enum class WeightedPath {
  kDirect,  // restricted sum over x = a mod p^N at the original parameters
  kLifted,  // (1/[p^N])(q/rho)^a * integral of f(a + p^N y) at (rho^(p^N), q^(p^N))
};

/// mu~_f(ball) truncated at total level N + inner_levels.
PadicNumber weighted_measure(const IntegrableFunction& f, const RhoQParams& params, const Ball& ball,
                             int inner_levels, WeightedPath path, PrecisionBudget* budget = nullptr);

/// mu~_f(ball) truncated at a fixed total level (>= ball level). Summing the
/// children of a ball at the same total level reproduces the parent exactly.
PadicNumber weighted_measure_total(const IntegrableFunction& f, const RhoQParams& params, const Ball& ball,
                                   int total_level);

/// [p^N] mu~_f(ball) at total level N + inner_levels, without the division by [p^N].
PadicNumber weighted_scaled(const IntegrableFunction& f, const RhoQParams& params, const Ball& ball,
                            int inner_levels);

/// weighted_scaled over a window of inner levels, from one sweep.
ApproximantSequence weighted_scaled_sequence(const IntegrableFunction& f, const RhoQParams& params,
                                             const Ball& ball, LevelRange inner, int target_digits);

// ------------------------------------- polynomials in [x]: the expansion path

/// Inner integrals for one level N of the expansion
///   [a + p^N y]^i = sum_l C(i,l) q^(a l) [p^N]^l [y]'^l rho'^((i-l) y) [a]^(i-l)
/// with primes denoting the parameters (rho^(p^N), q^(p^N)):
/// beta[l][j] approximates beta_{l:j}(rho', q') for l + j <= degree.
struct InnerTable {
  int level = 0;
  int inner_level = 0;
  bool converged = false;
  std::vector<std::vector<PadicNumber>> beta;
};

/// mu~_P for P a polynomial in [x], evaluated through the expansion above.
/// Inner tables are computed on demand per level and cached; the cache is
/// safe to share between threads.
class PolynomialWeights {
 public:
  PolynomialWeights(RhoQPolynomial poly, int target_digits, int max_inner_level = 12);

  const RhoQPolynomial& polynomial() const { return poly_; }
  const RhoQParams& params() const { return poly_.params(); }
  int target_digits() const { return target_; }

  /// [p^N] mu~_P(a + p^N Z_p).
  PadicNumber scaled(u64 a, int level) const;
  /// mu~_P(a + p^N Z_p).
  PadicNumber value(u64 a, int level) const;

  const InnerTable& inner(int level) const;

 private:
  InnerTable compute_inner(int level) const;

  RhoQPolynomial poly_;
  int target_;
  int max_inner_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::unique_ptr<InnerTable>> cache_;
};

/// The terms C(k,l) q^(a l) [p^n]^l [i]'^l rho^(i p^n (k-l)) [a]^(k-l), l = 0..k,
/// of the splitting expansion of [a + i p^n]^k.
std::vector<PadicNumber> splitting_expansion_terms(int k, u64 a, u64 i, int n, const RhoQParams& params);

struct IntegralIdentity {
  ApproximantSequence lhs;  // sum_{a<p^N} g(a) mu~_P(a + p^N Z_p)
  ApproximantSequence rhs;  // Volkenborn approximants of g P
};

/// Riemann sums of each g against mu~_P next to the Volkenborn integral of
/// g P. All g share one sweep for the left-hand sides.
std::vector<IntegralIdentity> integral_against_weighted(std::span<const FunctionPtr> gs,
                                                        const PolynomialWeights& weights, LevelRange levels,
                                                        int target_digits);

}  // namespace rhoq
