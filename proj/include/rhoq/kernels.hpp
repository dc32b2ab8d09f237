// SPDX-License-Identifier: Apache-2.0
//
// Summation kernels. Every integral in the library reduces to prefix sums
//
//   S(n) = sum_{i<n} f(start + i*stride) * ratio^i   (mod p^W)
//
// read off at a list of checkpoints n, so one sweep serves every level.
// The parallel versions split the range into fixed segments and combine
// them in index order; since the arithmetic is exact the result does not
// depend on the thread count. The *_serial versions evaluate pointwise
// and exist as the reference the tests and benchmarks compare against.

#pragma once

#include <span>
#include <vector>

#include "rhoq/functions.hpp"

namespace rhoq {

enum class KernelMode { kParallel, kSerial };

/// Checkpoints must be strictly increasing; the last one is the range length.
std::vector<u64> weighted_prefix_sums(const IntegrableFunction& f, u64 start, u64 stride, u64 ratio,
                                      std::span<const u64> checkpoints, const ResidueRing& ring);

std::vector<u64> weighted_prefix_sums_serial(const IntegrableFunction& f, u64 start, u64 stride, u64 ratio,
                                             std::span<const u64> checkpoints, const ResidueRing& ring);

std::vector<u64> weighted_prefix_sums(KernelMode mode, const IntegrableFunction& f, u64 start, u64 stride,
                                      u64 ratio, std::span<const u64> checkpoints, const ResidueRing& ring);

/// Several sums over one range, each the product of a few shared factors:
/// result[t][c] = sum_{i < checkpoints[c]} prod_{j in terms[t]} factors[j](start + i*stride).
/// Each factor is filled once per chunk however many terms use it.
std::vector<std::vector<u64>> factored_prefix_sums(std::span<const FunctionPtr> factors,
                                                   std::span<const std::vector<int>> terms, u64 start,
                                                   u64 stride, std::span<const u64> checkpoints,
                                                   const ResidueRing& ring);

std::vector<std::vector<u64>> factored_prefix_sums_serial(std::span<const FunctionPtr> factors,
                                                          std::span<const std::vector<int>> terms, u64 start,
                                                          u64 stride, std::span<const u64> checkpoints,
                                                          const ResidueRing& ring);

/// Number of threads the parallel kernels will use (1 without OpenMP).
int kernel_threads();

}  // namespace rhoq
