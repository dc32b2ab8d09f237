// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <string>
#include <vector>

#include "rhoq/residue.hpp"

namespace rhoq {

/// The cylinder a + p^N Z_p, stored with 0 <= a < p^N.
class Ball {
 public:
  Ball(u64 representative, int level, u64 p);

  u64 representative() const { return a_; }
  int level() const { return level_; }
  u64 prime() const { return p_; }
  u64 radius_inverse() const { return ipow(p_, level_); }

  /// The p balls at level N+1 whose union is this ball.
  std::vector<Ball> children() const;
  Ball parent() const;
  bool contains(u64 x) const { return x % radius_inverse() == a_; }

  std::string to_string() const;

  friend bool operator==(const Ball&, const Ball&) = default;
  friend auto operator<=>(const Ball&, const Ball&) = default;

 private:
  u64 a_;
  int level_;
  u64 p_;
};

}  // namespace rhoq
