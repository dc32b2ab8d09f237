// SPDX-License-Identifier: Apache-2.0

#include "rhoq/integration.hpp"

#include <algorithm>

namespace rhoq {

namespace {

FunctionPtr borrow(const IntegrableFunction& f) {
  return FunctionPtr(&f, [](const IntegrableFunction*) {});
}

PadicNumber residue_value(u64 p, u64 r, int digits) { return PadicNumber::from_residue(p, r, digits); }

i64 binomial(int n, int k) {
  i64 b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

std::vector<u64> level_checkpoints(u64 p, LevelRange levels) {
  if (levels.min < 0 || levels.max < levels.min) throw DomainError("bad level range");
  std::vector<u64> cps;
  for (int n = levels.min; n <= levels.max; ++n) cps.push_back(ipow(p, n));
  return cps;
}

// rho^(p^N) / [p^N] * S at `digits` digits.
PadicNumber normalize_sum(u64 sum, int level, const RhoQParams& params, const ResidueRing& ring) {
  const u64 p = params.prime();
  const u64 n = ipow(p, level);
  const u64 rho = params.rho().residue(ring.digits()), q = params.q().residue(ring.digits());
  const PadicNumber lead = residue_value(p, ring.pow(rho, n), ring.digits());
  const PadicNumber bracket = residue_value(p, rhoq_integer_residue(n, rho, q, ring), ring.digits());
  return lead * residue_value(p, sum, ring.digits()) / bracket;
}

}  // namespace

int working_digits(const IntegrableFunction& f, const RhoQParams& params) {
  if (f.prime() != params.prime()) throw PrimeMismatch("function and parameters over different primes");
  return std::min({f.precision(), params.precision(), max_precision(params.prime())});
}

int level_budget(u64 p, int working, int target, u64 max_terms) {
  int n = 0;
  u64 terms = 1;
  while (working - (n + 1) >= target && terms <= max_terms / p) {
    terms *= p;
    ++n;
  }
  return n;
}

// ------------------------------------------------------------- Volkenborn

PadicNumber volkenborn_approximant(const IntegrableFunction& f, const RhoQParams& params, int level,
                                   KernelMode mode) {
  const int w = working_digits(f, params);
  ResidueRing ring(params.prime(), w);
  const u64 cp = ipow(params.prime(), level);
  const auto sums = weighted_prefix_sums(mode, f, 0, 1, params.ratio().residue(w), std::span<const u64>(&cp, 1), ring);
  return normalize_sum(sums[0], level, params, ring);
}

ApproximantSequence volkenborn_integral(const IntegrableFunction& f, const RhoQParams& params, LevelRange levels,
                                        int target_digits, KernelMode mode) {
  const int w = working_digits(f, params);
  ResidueRing ring(params.prime(), w);
  const auto cps = level_checkpoints(params.prime(), levels);
  const auto sums = weighted_prefix_sums(mode, f, 0, 1, params.ratio().residue(w), cps, ring);
  std::vector<ApproximantTerm> terms;
  for (int n = levels.min; n <= levels.max; ++n) {
    terms.push_back({n, normalize_sum(sums[static_cast<std::size_t>(n - levels.min)], n, params, ring)});
  }
  return ApproximantSequence(std::move(terms), target_digits);
}

ApproximantSequence volkenborn_until_converged(const IntegrableFunction& f, const RhoQParams& params,
                                               LevelRange levels, int target_digits) {
  const int budget = level_budget(params.prime(), working_digits(f, params), target_digits);
  for (;;) {
    auto seq = volkenborn_integral(f, params, levels, target_digits);
    if (seq.converged() || levels.max >= budget) return seq;
    ++levels.max;
  }
}

ApproximantSequence carlitz_bernoulli(int n, i64 a, const RhoQParams& params, LevelRange levels,
                                      int target_digits) {
  CarlitzIntegrand f(n, a, params);
  return volkenborn_integral(f, params, levels, target_digits);
}

std::optional<PadicNumber> carlitz_geometric_limit(i64 a, const RhoQParams& params) {
  const u64 p = params.prime();
  const PadicNumber one = PadicNumber::from_integer(1, p, params.precision());
  const PadicNumber& rho = params.rho();
  const PadicNumber& q = params.q();
  try {
    const PadicNumber c = rhoq_power(rho, a - 1) * q;
    const bool c_is_one = (c - one).is_zero();
    if (params.degenerate()) {
      if (c_is_one) return rho;
      return rho * padic_log(c) / (c - one);
    }
    const PadicNumber log_gap = padic_log(rho) - padic_log(q);
    if (c_is_one) return (rho - q) / log_gap;
    return (rho - q) * padic_log(c) / ((c - one) * log_gap);
  } catch (const PadicError&) {
    return std::nullopt;
  }
}

std::optional<PadicNumber> carlitz_log_ratio(i64 a, const RhoQParams& params) {
  const u64 p = params.prime();
  try {
    const PadicNumber denom = padic_log(params.rho() * params.q());
    if (denom.is_zero()) return std::nullopt;
    return PadicNumber::from_integer(a, p, params.precision()) * padic_log(params.rho()) / denom;
  } catch (const PadicError&) {
    return std::nullopt;
  }
}

// --------------------------------------------------- weighted distributions

PadicNumber weighted_measure(const IntegrableFunction& f, const RhoQParams& params, const Ball& ball,
                             int inner_levels, WeightedPath path, PrecisionBudget* budget) {
  const u64 p = params.prime();
  const int n = ball.level();
  const int total = n + inner_levels;
  const int w = working_digits(f, params);
  ResidueRing ring(p, w);
  const PadicNumber ratio_a = rhoq_power(params.ratio().with_precision(w), static_cast<i64>(ball.representative()));

  if (path == WeightedPath::kDirect) {
    const u64 stride = ipow(p, n);
    const u64 count = ipow(p, inner_levels);
    const u64 ratio = params.ratio().residue(w);
    const auto sums =
        weighted_prefix_sums(f, ball.representative(), stride, ring.pow(ratio, stride), std::span<const u64>(&count, 1), ring);
    const u64 top = ipow(p, total);
    const u64 rho = params.rho().residue(w), q = params.q().residue(w);
    const PadicNumber lead = residue_value(p, ring.pow(rho, top), w);
    const PadicNumber bracket = residue_value(p, rhoq_integer_residue(top, rho, q, ring), w);
    if (budget) budget->record("divide by [p^" + std::to_string(total) + "]", bracket.valuation());
    return lead * ratio_a * residue_value(p, sums[0], w) / bracket;
  }

  const RhoQParams lifted = params.with_precision(w).lifted(n);
  AffineComposition g(borrow(f), ball.representative(), ipow(p, n));
  const PadicNumber inner = volkenborn_approximant(g, lifted, inner_levels);
  const PadicNumber outer = rhoq_integer(ipow(p, n), params.with_precision(w));
  if (budget) {
    budget->record("divide by lifted [p^" + std::to_string(inner_levels) + "]", inner_levels);
    budget->record("divide by [p^" + std::to_string(n) + "]", outer.valuation());
  }
  return ratio_a * inner / outer;
}

PadicNumber weighted_measure_total(const IntegrableFunction& f, const RhoQParams& params, const Ball& ball,
                                   int total_level) {
  if (total_level < ball.level()) throw DomainError("total level below the ball level");
  return weighted_measure(f, params, ball, total_level - ball.level(), WeightedPath::kDirect);
}

PadicNumber weighted_scaled(const IntegrableFunction& f, const RhoQParams& params, const Ball& ball,
                            int inner_levels) {
  const int w = working_digits(f, params);
  const RhoQParams lifted = params.with_precision(w).lifted(ball.level());
  AffineComposition g(borrow(f), ball.representative(), ipow(params.prime(), ball.level()));
  return rhoq_power(params.ratio().with_precision(w), static_cast<i64>(ball.representative())) *
         volkenborn_approximant(g, lifted, inner_levels);
}

ApproximantSequence weighted_scaled_sequence(const IntegrableFunction& f, const RhoQParams& params,
                                             const Ball& ball, LevelRange inner, int target_digits) {
  const int w = working_digits(f, params);
  const RhoQParams lifted = params.with_precision(w).lifted(ball.level());
  AffineComposition g(borrow(f), ball.representative(), ipow(params.prime(), ball.level()));
  const auto seq = volkenborn_integral(g, lifted, inner, target_digits);
  const PadicNumber ratio_a =
      rhoq_power(params.ratio().with_precision(w), static_cast<i64>(ball.representative()));
  std::vector<ApproximantTerm> terms;
  for (const auto& t : seq.terms()) terms.push_back({t.level, ratio_a * t.value});
  return ApproximantSequence(std::move(terms), target_digits);
}

// ------------------------------------- polynomials in [x]: the expansion path

PolynomialWeights::PolynomialWeights(RhoQPolynomial poly, int target_digits, int max_inner_level)
    : poly_(std::move(poly)), target_(target_digits), max_inner_(max_inner_level) {}

const InnerTable& PolynomialWeights::inner(int level) const {
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(level);
    if (it != cache_.end()) return *it->second;
  }
  auto table = std::make_unique<InnerTable>(compute_inner(level));
  std::lock_guard lock(mutex_);
  auto [it, inserted] = cache_.emplace(level, std::move(table));
  return *it->second;
}

InnerTable PolynomialWeights::compute_inner(int level) const {
  const u64 p = params().prime();
  const int w = std::min(poly_.precision(), max_precision(p));
  const int k = static_cast<int>(poly_.coefficients().size()) - 1;
  const RhoQParams lifted = params().with_precision(w).lifted(level);
  ResidueRing ring(p, w);

  // Factors [y]'^l (l = 0..k) then (rho'^j q'/rho')^y (j = 0..k).
  std::vector<FunctionPtr> factors;
  for (int l = 0; l <= k; ++l) factors.push_back(std::make_shared<CarlitzIntegrand>(l, 0, lifted));
  for (int j = 0; j <= k; ++j) {
    factors.push_back(std::make_shared<ExponentialFunction>(rhoq_power(lifted.rho(), j) * lifted.ratio()));
  }
  std::vector<std::vector<int>> terms;
  std::vector<std::pair<int, int>> index;
  for (int l = 0; l <= k; ++l) {
    for (int j = 0; l + j <= k; ++j) {
      terms.push_back({l, k + 1 + j});
      index.emplace_back(l, j);
    }
  }
  auto entry_target = [&](int l) { return std::max(1, target_ + 1 - l * level); };

  const int cap = std::max(2, std::min(max_inner_, level_budget(p, w, target_ + 1, 10'000'000)));
  auto table_at = [&](const std::vector<std::vector<u64>>& sums, std::size_t c, int inner_level) {
    std::vector<std::vector<PadicNumber>> beta(static_cast<std::size_t>(k) + 1);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      beta[static_cast<std::size_t>(index[t].first)].push_back(normalize_sum(sums[t][c], inner_level, lifted, ring));
    }
    return beta;
  };

  for (int top = std::min(3, cap);; top = std::min(cap, top + 2)) {
    const auto cps = level_checkpoints(p, {1, top});
    const auto sums = factored_prefix_sums(factors, terms, 0, 1, cps, ring);
    auto prev = table_at(sums, 0, 1);
    for (int inner_level = 2; inner_level <= top; ++inner_level) {
      auto cur = table_at(sums, static_cast<std::size_t>(inner_level - 1), inner_level);
      bool agree = true;
      for (int l = 0; l <= k && agree; ++l) {
        for (std::size_t j = 0; j < cur[static_cast<std::size_t>(l)].size() && agree; ++j) {
          agree = agrees_to(cur[static_cast<std::size_t>(l)][j], prev[static_cast<std::size_t>(l)][j], entry_target(l));
        }
      }
      if (agree) return InnerTable{level, inner_level, true, std::move(cur)};
      prev = std::move(cur);
    }
    if (top >= cap) return InnerTable{level, top, false, std::move(prev)};
  }
}

PadicNumber PolynomialWeights::scaled(u64 a, int level) const {
  const u64 p = params().prime();
  const int w = std::min(poly_.precision(), max_precision(p));
  const RhoQParams base = params().with_precision(w);
  const InnerTable& table = inner(level);
  const PadicNumber bracket_pn = rhoq_integer(ipow(p, level), base);
  const PadicNumber bracket_a = rhoq_integer(a, base);
  const PadicNumber q_a = rhoq_power(base.q(), static_cast<i64>(a));
  const auto& coeffs = poly_.coefficients();

  PadicNumber sum = PadicNumber::exact_zero(p);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i].is_exact_zero()) continue;
    PadicNumber inner_sum = PadicNumber::exact_zero(p);
    for (int l = 0; l <= static_cast<int>(i); ++l) {
      const int j = static_cast<int>(i) - l;
      PadicNumber term = PadicNumber::from_integer(binomial(static_cast<int>(i), l), p, w) * pow(q_a, l) *
                         pow(bracket_pn, l) * pow(bracket_a, j) *
                         table.beta[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
      inner_sum += term;
    }
    sum += coeffs[i] * inner_sum;
  }
  return rhoq_power(base.ratio(), static_cast<i64>(a)) * sum;
}

PadicNumber PolynomialWeights::value(u64 a, int level) const {
  const int w = std::min(poly_.precision(), max_precision(params().prime()));
  return scaled(a, level) / rhoq_integer(ipow(params().prime(), level), params().with_precision(w));
}

std::vector<PadicNumber> splitting_expansion_terms(int k, u64 a, u64 i, int n, const RhoQParams& params) {
  const u64 p = params.prime();
  const u64 pn = ipow(p, n);
  const RhoQParams lifted = params.lifted(n);
  const PadicNumber bracket_pn = rhoq_integer(pn, params);
  const PadicNumber bracket_i = rhoq_integer(i, lifted);
  const PadicNumber bracket_a = rhoq_integer(a, params);
  const PadicNumber q_a = rhoq_power(params.q(), static_cast<i64>(a));
  std::vector<PadicNumber> out;
  for (int l = 0; l <= k; ++l) {
    out.push_back(PadicNumber::from_integer(binomial(k, l), p, params.precision()) * pow(q_a, l) *
                  pow(bracket_pn, l) * pow(bracket_i, l) *
                  rhoq_power(params.rho(), static_cast<i64>(i * pn) * (k - l)) * pow(bracket_a, k - l));
  }
  return out;
}

std::vector<IntegralIdentity> integral_against_weighted(std::span<const FunctionPtr> gs,
                                                        const PolynomialWeights& weights, LevelRange levels,
                                                        int target_digits) {
  const RhoQParams& params = weights.params();
  const u64 p = params.prime();
  const auto& poly = weights.polynomial();
  int w = std::min(poly.precision(), max_precision(p));
  for (const auto& g : gs) w = std::min(w, g->precision());
  const RhoQParams base = params.with_precision(w);
  ResidueRing ring(p, w);
  const int k = static_cast<int>(poly.coefficients().size()) - 1;
  const int ng = static_cast<int>(gs.size());

  // Factors: g's, then [a]^j (j = 0..k), then (q^(l+1)/rho)^a (l = 0..k).
  std::vector<FunctionPtr> factors(gs.begin(), gs.end());
  for (int j = 0; j <= k; ++j) factors.push_back(std::make_shared<CarlitzIntegrand>(j, 0, base));
  for (int l = 0; l <= k; ++l) {
    factors.push_back(std::make_shared<ExponentialFunction>(base.ratio() * rhoq_power(base.q(), l)));
  }
  std::vector<std::vector<int>> terms;
  auto term_index = [&](int g, int j, int l) {
    // Terms are laid out g-major over pairs (j, l) with j + l <= k.
    int idx = 0;
    for (int jj = 0; jj <= k; ++jj) {
      for (int ll = 0; jj + ll <= k; ++ll) {
        if (jj == j && ll == l) return g * ((k + 1) * (k + 2) / 2) + idx;
        ++idx;
      }
    }
    return -1;
  };
  for (int g = 0; g < ng; ++g) {
    for (int j = 0; j <= k; ++j) {
      for (int l = 0; j + l <= k; ++l) terms.push_back({g, ng + j, ng + k + 1 + l});
    }
  }
  const auto cps = level_checkpoints(p, levels);
  const auto sums = factored_prefix_sums(factors, terms, 0, 1, cps, ring);

  std::vector<IntegralIdentity> out;
  const auto& coeffs = poly.coefficients();
  for (int g = 0; g < ng; ++g) {
    std::vector<ApproximantTerm> lhs_terms;
    for (int n = levels.min; n <= levels.max; ++n) {
      const std::size_t c = static_cast<std::size_t>(n - levels.min);
      const InnerTable& table = weights.inner(n);
      const PadicNumber bracket_pn = rhoq_integer(ipow(p, n), base);
      PadicNumber total = PadicNumber::exact_zero(p);
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i].is_exact_zero()) continue;
        for (int l = 0; l <= static_cast<int>(i); ++l) {
          const int j = static_cast<int>(i) - l;
          const auto t = static_cast<std::size_t>(term_index(g, j, l));
          total += coeffs[i] * PadicNumber::from_integer(binomial(static_cast<int>(i), l), p, w) *
                   pow(bracket_pn, l) * table.beta[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)] *
                   residue_value(p, sums[t][c], w);
        }
      }
      lhs_terms.push_back({n, total / bracket_pn});
    }
    ProductFunction gp(gs[static_cast<std::size_t>(g)], std::make_shared<RhoQPolynomial>(poly));
    out.push_back({ApproximantSequence(std::move(lhs_terms), target_digits),
                   volkenborn_integral(gp, base, levels, target_digits)});
  }
  return out;
}

}  // namespace rhoq
