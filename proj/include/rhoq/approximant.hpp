// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "rhoq/padic.hpp"

namespace rhoq {

/// Closed range of truncation levels.
struct LevelRange {
  int min = 1;
  int max = 5;

  int size() const { return max - min + 1; }
  bool contains(int n) const { return n >= min && n <= max; }
};

struct ApproximantTerm {
  int level;
  PadicNumber value;
};

/// A_N for consecutive levels N, with |A_{N+1} - A_N| and a declared limit.
///
/// The limit is declared at the first pair of consecutive terms that agree
/// modulo p^target; it is the later term, truncated to `target` digits.
/// With confirmations = c the agreement must hold for c pairs in a row: a
/// single pair can agree by a digit coincidence while later gaps reopen.
/// Terms whose difference is an inexact zero report that difference's
/// precision as its valuation, i.e. the rate is an upper bound.
class ApproximantSequence {
 public:
  ApproximantSequence() = default;
  ApproximantSequence(std::vector<ApproximantTerm> terms, int target_digits, int confirmations = 1);

  const std::vector<ApproximantTerm>& terms() const { return terms_; }
  /// rates()[i] = |A_{i+1} - A_i| for consecutive stored terms.
  const std::vector<Norm>& rates() const { return rates_; }
  int target_digits() const { return target_; }

  bool converged() const { return converged_at_.has_value(); }
  std::optional<int> converged_at() const { return converged_at_; }
  const std::optional<PadicNumber>& limit() const { return limit_; }

  /// Term at level n; throws if absent.
  const PadicNumber& at(int level) const;
  const PadicNumber& last() const { return terms_.back().value; }

 private:
  std::vector<ApproximantTerm> terms_;
  std::vector<Norm> rates_;
  int target_ = 0;
  std::optional<int> converged_at_;
  std::optional<PadicNumber> limit_;
};

}  // namespace rhoq
