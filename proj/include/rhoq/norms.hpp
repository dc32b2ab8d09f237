// SPDX-License-Identifier: Apache-2.0
//
// Sup-norm and Lipschitz-norm surrogates. The suprema over Z_p are replaced
// by maxima over the grid 0..p^M-1; for the locally analytic families used
// here the grid maximum is already attained at small M.

#pragma once

#include <span>

#include "rhoq/functions.hpp"

namespace rhoq {

/// max over pairs x != y of |f(x) - f(y)| / |x - y| for values f(0..n-1),
/// i.e. the largest sampled |Delta_1 f(m, x)|. Needs at least two values.
/// Differences that are inexact zeros count with their precision bound.
Norm lipschitz_estimate(std::span<const PadicNumber> values);

/// max |f(x)| over the values.
Norm sup_norm(std::span<const PadicNumber> values);

struct GridNorms {
  int grid_level;
  Norm sup;        // ||f||_inf on the grid
  Norm lipschitz;  // ||Delta_1 f||_inf on the grid
  Norm one;        // max of the two
};

GridNorms grid_norms(const IntegrableFunction& f, int grid_level);

/// f(0..count-1) as PadicNumbers at the function's precision.
std::vector<PadicNumber> sample_values(const IntegrableFunction& f, u64 count);

}  // namespace rhoq
