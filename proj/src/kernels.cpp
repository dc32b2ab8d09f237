// SPDX-License-Identifier: Apache-2.0

#include "rhoq/kernels.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rhoq {

namespace {

constexpr u64 kSegment = 1 << 14;
constexpr std::size_t kChunk = 1024;

void validate_checkpoints(std::span<const u64> checkpoints) {
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    if (checkpoints[i] <= checkpoints[i - 1]) throw DomainError("checkpoints must be strictly increasing");
  }
}

// Segment boundaries: every checkpoint plus every multiple of kSegment.
std::vector<u64> segment_bounds(std::span<const u64> checkpoints) {
  std::vector<u64> bounds{0};
  if (checkpoints.empty()) return bounds;
  const u64 total = checkpoints.back();
  std::size_t c = 0;
  for (u64 next = kSegment;; next += kSegment) {
    while (c < checkpoints.size() && checkpoints[c] < next) {
      if (checkpoints[c] > bounds.back()) bounds.push_back(checkpoints[c]);
      ++c;
    }
    if (next >= total) break;
    bounds.push_back(next);
  }
  if (bounds.back() != total) bounds.push_back(total);
  return bounds;
}

// Local sum of f(start + i*stride) * ratio^(i - begin) for i in [begin, end).
u64 segment_sum(const IntegrableFunction& f, u64 start, u64 stride, u64 ratio, u64 begin, u64 end,
                const ResidueRing& ring) {
  std::vector<u64> buf(kChunk);
  const bool plain = ratio == ring.reduce(1);
  u128 wide = 0;
  u64 acc = 0, weight = ring.reduce(1);
  for (u64 i = begin; i < end; i += kChunk) {
    const std::size_t len = static_cast<std::size_t>(std::min<u64>(kChunk, end - i));
    std::span<u64> view(buf.data(), len);
    f.fill(start + i * stride, stride, view, ring);
    if (plain) {
      for (u64 v : view) wide += v;
    } else {
      for (u64 v : view) {
        acc = ring.add(acc, ring.mul(v, weight));
        weight = ring.mul(weight, ratio);
      }
    }
  }
  return plain ? static_cast<u64>(wide % ring.modulus()) : acc;
}

}  // namespace

int kernel_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<u64> weighted_prefix_sums(const IntegrableFunction& f, u64 start, u64 stride, u64 ratio,
                                      std::span<const u64> checkpoints, const ResidueRing& ring) {
  validate_checkpoints(checkpoints);
  if (checkpoints.empty()) return {};
  const auto bounds = segment_bounds(checkpoints);
  const auto segments = static_cast<long>(bounds.size() - 1);
  std::vector<u64> local(bounds.size() - 1);

#pragma omp parallel for schedule(dynamic)
  for (long s = 0; s < segments; ++s) {
    local[s] = segment_sum(f, start, stride, ratio, bounds[s], bounds[s + 1], ring);
  }

  std::vector<u64> out;
  out.reserve(checkpoints.size());
  u64 total = 0, weight = ring.reduce(1);
  std::size_t c = 0;
  if (checkpoints.front() == 0) {
    out.push_back(0);
    ++c;
  }
  for (long s = 0; s < segments; ++s) {
    total = ring.add(total, ring.mul(local[s], weight));
    weight = ring.mul(weight, ring.pow(ratio, bounds[s + 1] - bounds[s]));
    if (c < checkpoints.size() && checkpoints[c] == bounds[s + 1]) {
      out.push_back(total);
      ++c;
    }
  }
  return out;
}

std::vector<u64> weighted_prefix_sums_serial(const IntegrableFunction& f, u64 start, u64 stride, u64 ratio,
                                             std::span<const u64> checkpoints, const ResidueRing& ring) {
  validate_checkpoints(checkpoints);
  std::vector<u64> out;
  u64 total = 0, weight = ring.reduce(1);
  u64 i = 0;
  for (u64 cp : checkpoints) {
    for (; i < cp; ++i) {
      total = ring.add(total, ring.mul(f.residue_at(start + i * stride, ring), weight));
      weight = ring.mul(weight, ratio);
    }
    out.push_back(total);
  }
  return out;
}

std::vector<u64> weighted_prefix_sums(KernelMode mode, const IntegrableFunction& f, u64 start, u64 stride,
                                      u64 ratio, std::span<const u64> checkpoints, const ResidueRing& ring) {
  if (mode == KernelMode::kSerial) return weighted_prefix_sums_serial(f, start, stride, ratio, checkpoints, ring);
  return weighted_prefix_sums(f, start, stride, ratio, checkpoints, ring);
}

std::vector<std::vector<u64>> factored_prefix_sums(std::span<const FunctionPtr> factors,
                                                   std::span<const std::vector<int>> terms, u64 start,
                                                   u64 stride, std::span<const u64> checkpoints,
                                                   const ResidueRing& ring) {
  validate_checkpoints(checkpoints);
  for (const auto& t : terms) {
    for (int j : t) {
      if (j < 0 || static_cast<std::size_t>(j) >= factors.size()) throw DomainError("bad factor index");
    }
  }
  std::vector<std::vector<u64>> out(terms.size());
  if (checkpoints.empty()) return out;
  const auto bounds = segment_bounds(checkpoints);
  const auto segments = static_cast<long>(bounds.size() - 1);
  std::vector<std::vector<u64>> local(bounds.size() - 1, std::vector<u64>(terms.size(), 0));

#pragma omp parallel for schedule(dynamic)
  for (long s = 0; s < segments; ++s) {
    std::vector<std::vector<u64>> bufs(factors.size(), std::vector<u64>(kChunk));
    std::vector<u64> acc(terms.size(), 0);
    for (u64 i = bounds[s]; i < bounds[s + 1]; i += kChunk) {
      const std::size_t len = static_cast<std::size_t>(std::min<u64>(kChunk, bounds[s + 1] - i));
      for (std::size_t j = 0; j < factors.size(); ++j) {
        factors[j]->fill(start + i * stride, stride, std::span<u64>(bufs[j].data(), len), ring);
      }
      for (std::size_t t = 0; t < terms.size(); ++t) {
        const auto& idx = terms[t];
        u64 a = acc[t];
        for (std::size_t k = 0; k < len; ++k) {
          u64 v = ring.reduce(1);
          for (int j : idx) v = ring.mul(v, bufs[static_cast<std::size_t>(j)][k]);
          a = ring.add(a, v);
        }
        acc[t] = a;
      }
    }
    local[s] = std::move(acc);
  }

  std::vector<u64> total(terms.size(), 0);
  std::size_t c = 0;
  auto emit = [&] {
    for (std::size_t t = 0; t < terms.size(); ++t) out[t].push_back(total[t]);
  };
  if (checkpoints.front() == 0) {
    emit();
    ++c;
  }
  for (long s = 0; s < segments; ++s) {
    for (std::size_t t = 0; t < terms.size(); ++t) total[t] = ring.add(total[t], local[s][t]);
    if (c < checkpoints.size() && checkpoints[c] == bounds[s + 1]) {
      emit();
      ++c;
    }
  }
  return out;
}

std::vector<std::vector<u64>> factored_prefix_sums_serial(std::span<const FunctionPtr> factors,
                                                          std::span<const std::vector<int>> terms, u64 start,
                                                          u64 stride, std::span<const u64> checkpoints,
                                                          const ResidueRing& ring) {
  validate_checkpoints(checkpoints);
  std::vector<std::vector<u64>> out(terms.size());
  std::vector<u64> total(terms.size(), 0), values(factors.size());
  u64 i = 0;
  for (u64 cp : checkpoints) {
    for (; i < cp; ++i) {
      for (std::size_t j = 0; j < factors.size(); ++j) values[j] = factors[j]->residue_at(start + i * stride, ring);
      for (std::size_t t = 0; t < terms.size(); ++t) {
        u64 v = ring.reduce(1);
        for (int j : terms[t]) v = ring.mul(v, values[static_cast<std::size_t>(j)]);
        total[t] = ring.add(total[t], v);
      }
    }
    for (std::size_t t = 0; t < terms.size(); ++t) out[t].push_back(total[t]);
  }
  return out;
}

}  // namespace rhoq
