// SPDX-License-Identifier: Apache-2.0

#include "rhoq/approximant.hpp"

#include <algorithm>

#include "rhoq/ball.hpp"

namespace rhoq {

ApproximantSequence::ApproximantSequence(std::vector<ApproximantTerm> terms, int target_digits, int confirmations)
    : terms_(std::move(terms)), target_(target_digits) {
  if (confirmations < 1) throw DomainError("at least one agreeing pair is needed");
  int run = 0;
  for (std::size_t i = 1; i < terms_.size(); ++i) {
    if (terms_[i].level != terms_[i - 1].level + 1) throw DomainError("approximant levels must be consecutive");
    const PadicNumber diff = terms_[i].value - terms_[i - 1].value;
    rates_.push_back(diff.norm());
    run = agrees_to(terms_[i].value, terms_[i - 1].value, target_) ? run + 1 : 0;
    if (!converged_at_ && run == confirmations) {
      converged_at_ = terms_[i].level;
      limit_ = terms_[i].value.with_precision(target_);
    }
  }
}

const PadicNumber& ApproximantSequence::at(int level) const {
  for (const auto& t : terms_) {
    if (t.level == level) return t.value;
  }
  throw DomainError("no approximant at level " + std::to_string(level));
}

// ------------------------------------------------------------------ Ball

Ball::Ball(u64 representative, int level, u64 p) : level_(level), p_(p) {
  if (level < 0) throw DomainError("ball level must be nonnegative");
  a_ = representative % ipow(p, level);
}

std::vector<Ball> Ball::children() const {
  std::vector<Ball> out;
  const u64 step = radius_inverse();
  for (u64 i = 0; i < p_; ++i) out.emplace_back(a_ + i * step, level_ + 1, p_);
  return out;
}

Ball Ball::parent() const {
  if (level_ == 0) throw DomainError("Z_p has no parent ball");
  return Ball(a_, level_ - 1, p_);
}

std::string Ball::to_string() const {
  return std::to_string(a_) + " + " + std::to_string(p_) + "^" + std::to_string(level_) + "Z_" + std::to_string(p_);
}

}  // namespace rhoq
