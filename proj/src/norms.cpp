// SPDX-License-Identifier: Apache-2.0

#include "rhoq/norms.hpp"

#include <algorithm>

namespace rhoq {

Norm lipschitz_estimate(std::span<const PadicNumber> values) {
  if (values.size() < 2) throw DomainError("Lipschitz estimate needs at least two sample points");
  const u64 p = values.front().prime();
  Norm best = Norm::zero(p);
  for (std::size_t x = 0; x < values.size(); ++x) {
    for (std::size_t y = x + 1; y < values.size(); ++y) {
      const PadicNumber diff = values[y] - values[x];
      if (diff.is_exact_zero()) continue;
      const Norm step = Norm::power(p, -valuation_of(y - x, p));
      best = max(best, diff.norm() / step);
    }
  }
  return best;
}

Norm sup_norm(std::span<const PadicNumber> values) {
  if (values.empty()) throw DomainError("sup norm of an empty sample");
  Norm best = Norm::zero(values.front().prime());
  for (const auto& v : values) {
    if (!v.is_exact_zero()) best = max(best, v.norm());
  }
  return best;
}

std::vector<PadicNumber> sample_values(const IntegrableFunction& f, u64 count) {
  if (const auto* c = dynamic_cast<const ConstantFunction*>(&f); c && c->value().is_exact_zero()) {
    return std::vector<PadicNumber>(count, PadicNumber::exact_zero(f.prime()));
  }
  const int digits = std::min(f.precision(), max_precision(f.prime()));
  ResidueRing ring(f.prime(), digits);
  std::vector<u64> raw(count);
  f.fill(0, 1, raw, ring);
  std::vector<PadicNumber> out;
  out.reserve(count);
  for (u64 r : raw) out.push_back(PadicNumber::from_residue(f.prime(), r, digits));
  return out;
}

GridNorms grid_norms(const IntegrableFunction& f, int grid_level) {
  const auto values = sample_values(f, ipow(f.prime(), grid_level));
  GridNorms out{grid_level, sup_norm(values), lipschitz_estimate(values), Norm::zero(f.prime())};
  out.one = max(out.sup, out.lipschitz);
  return out;
}

}  // namespace rhoq
