// SPDX-License-Identifier: Apache-2.0

#include "rhoq/measures.hpp"

#include <algorithm>
#include <mutex>
#include <random>

namespace rhoq {

namespace {

PadicNumber bracket_power(const Ball& ball, const RhoQParams& params) {
  return rhoq_integer(ball.radius_inverse(), params);
}

}  // namespace

PadicNumber Distribution::scaled(const Ball& ball) const {
  const PadicNumber v = value(ball);
  if (v.is_exact_zero()) return v;
  return v * bracket_power(ball, params_);
}

// ------------------------------------------------------------------ Haar

PadicNumber rhoq_haar_measure(const Ball& ball, const RhoQParams& params) {
  const PadicNumber lead = rhoq_power(params.rho(), static_cast<i64>(ball.radius_inverse()));
  return lead * rhoq_power(params.ratio(), static_cast<i64>(ball.representative())) / bracket_power(ball, params);
}

PadicNumber RhoQHaar::value(const Ball& ball) const { return rhoq_haar_measure(ball, params()); }

PadicNumber RhoQHaar::scaled(const Ball& ball) const {
  return rhoq_power(params().rho(), static_cast<i64>(ball.radius_inverse())) *
         rhoq_power(params().ratio(), static_cast<i64>(ball.representative()));
}

PadicNumber ZeroDistribution::value(const Ball&) const { return PadicNumber::exact_zero(prime()); }
PadicNumber ZeroDistribution::scaled(const Ball&) const { return PadicNumber::exact_zero(prime()); }

// -------------------------------------------------------------- weighted

WeightedDistribution::WeightedDistribution(FunctionPtr f, RhoQParams params, WeightedOptions options)
    : Distribution(std::move(params)), f_(std::move(f)), options_(options) {
  if (options_.levels < 0) throw DomainError("negative truncation level");
}

PadicNumber WeightedDistribution::value(const Ball& ball) const {
  if (options_.mode == TruncationMode::kTotalLevel) {
    return weighted_measure_total(*f_, params(), ball, options_.levels);
  }
  const int w = working_digits(*f_, params());
  return scaled(ball) / rhoq_integer(ball.radius_inverse(), params().with_precision(w));
}

PadicNumber WeightedDistribution::scaled(const Ball& ball) const {
  if (options_.mode == TruncationMode::kTotalLevel) {
    const int w = working_digits(*f_, params());
    return value(ball) * rhoq_integer(ball.radius_inverse(), params().with_precision(w));
  }
  return weighted_scaled(*f_, params(), ball, options_.levels);
}

PolynomialWeightedDistribution::PolynomialWeightedDistribution(std::shared_ptr<const PolynomialWeights> weights)
    : Distribution(weights->params()), weights_(std::move(weights)) {}

PadicNumber PolynomialWeightedDistribution::value(const Ball& ball) const {
  return weights_->value(ball.representative(), ball.level());
}

PadicNumber PolynomialWeightedDistribution::scaled(const Ball& ball) const {
  return weights_->scaled(ball.representative(), ball.level());
}

// ----------------------------------------------------------- combinations

CombinationDistribution::CombinationDistribution(std::vector<Term> terms)
    : Distribution(terms.at(0).distribution->params()), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.distribution->prime() != prime()) throw PrimeMismatch("combining distributions over different primes");
  }
}

std::string CombinationDistribution::family() const {
  std::string s = "combination(";
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) s += " + ";
    s += "[" + terms_[i].coefficient.to_string() + "]*" + terms_[i].distribution->family();
  }
  return s + ")";
}

PadicNumber CombinationDistribution::value(const Ball& ball) const {
  PadicNumber sum = PadicNumber::exact_zero(prime());
  for (const auto& t : terms_) sum += t.coefficient * t.distribution->value(ball);
  return sum;
}

PadicNumber CombinationDistribution::scaled(const Ball& ball) const {
  PadicNumber sum = PadicNumber::exact_zero(prime());
  for (const auto& t : terms_) sum += t.coefficient * t.distribution->scaled(ball);
  return sum;
}

DistributionPtr make_difference(DistributionPtr a, DistributionPtr b) {
  const u64 p = a->prime();
  std::vector<CombinationDistribution::Term> terms;
  terms.push_back({PadicNumber::from_integer(1, p, max_precision(p)), std::move(a)});
  terms.push_back({PadicNumber::from_integer(-1, p, max_precision(p)), std::move(b)});
  return std::make_shared<CombinationDistribution>(std::move(terms));
}

// --------------------------------------------------------------- memoized

MemoizedDistribution::MemoizedDistribution(DistributionPtr inner)
    : Distribution(inner->params()), inner_(std::move(inner)) {}

PadicNumber MemoizedDistribution::lookup(std::map<Key, PadicNumber>& table, const Ball& ball,
                                         bool want_scaled) const {
  const Key key{ball.representative(), ball.level()};
  {
    std::shared_lock lock(mutex_);
    auto it = table.find(key);
    if (it != table.end()) return it->second;
  }
  PadicNumber v = want_scaled ? inner_->scaled(ball) : inner_->value(ball);
  std::unique_lock lock(mutex_);
  return table.emplace(key, std::move(v)).first->second;
}

PadicNumber MemoizedDistribution::value(const Ball& ball) const { return lookup(values_, ball, false); }
PadicNumber MemoizedDistribution::scaled(const Ball& ball) const { return lookup(scaled_, ball, true); }

std::size_t MemoizedDistribution::cached() const {
  std::shared_lock lock(mutex_);
  return values_.size() + scaled_.size();
}

DistributionPtr memoize(DistributionPtr d) { return std::make_shared<MemoizedDistribution>(std::move(d)); }

// ------------------------------------------------------------ invariance

std::string to_string(InvarianceKind kind) {
  switch (kind) {
    case InvarianceKind::kStrongly: return "strongly";
    case InvarianceKind::kOneAdmissible: return "1-admissible";
    case InvarianceKind::kWeakly: return "weakly";
    case InvarianceKind::kNone: return "none-detected";
    case InvarianceKind::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

ModelFit fit_model(std::string name, const std::vector<Norm>& deltas, std::vector<Norm> bounds) {
  ModelFit fit;
  fit.model = std::move(name);
  fit.bounds = std::move(bounds);
  const std::size_t n = deltas.size();
  if (n < 2) return fit;
  fit.usable = std::none_of(fit.bounds.begin(), fit.bounds.end(), [](Norm b) { return b.is_zero(); });
  if (!fit.usable) return fit;
  const u64 p = deltas.front().prime;
  fit.constant = Norm::zero(p);
  int lo = kInfinity, hi = -kInfinity;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (deltas[i].is_zero()) continue;
    const Norm ratio = deltas[i] / fit.bounds[i];
    fit.constant = max(fit.constant, ratio);
    lo = std::min(lo, -ratio.valuation);
    hi = std::max(hi, -ratio.valuation);
  }
  fit.spread = lo == kInfinity ? 0 : hi - lo;
  const Norm last = deltas.back();
  fit.holdout_ok = last.is_zero() || (!fit.constant.is_zero() && last <= fit.constant * fit.bounds.back());
  return fit;
}

bool tends_to_zero(const std::vector<Norm>& seq, int threshold) {
  if (seq.empty()) return false;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i] > seq[i - 1]) return false;
  }
  return seq.back().is_zero() || seq.back().valuation > threshold;
}

}  // namespace

InvarianceReport check_invariance(const Distribution& d, LevelRange levels, std::span<const u64> sample_points,
                                  InvarianceOptions options) {
  if (levels.size() < 1) throw DomainError("empty level window");
  if (sample_points.empty()) throw DomainError("no sample points");
  const u64 p = d.prime();
  const RhoQParams& params = d.params();

  InvarianceReport report;
  report.family = d.family();
  report.levels = levels;
  report.sample_count = sample_points.size();

  std::vector<Norm> gap_bounds, level_bounds;
  for (int n = levels.min; n <= levels.max; ++n) {
    Norm delta = Norm::zero(p), c = Norm::zero(p);
    for (u64 a : sample_points) {
      const PadicNumber here = d.scaled(Ball(a, n, p));
      const PadicNumber next = d.scaled(Ball(a, n + 1, p));
      const PadicNumber diff = here - next;
      // Values that vanish at working precision count as 0.
      if (!diff.is_zero()) delta = max(delta, diff.norm());
      if (!here.is_zero()) c = max(c, here.norm());
    }
    report.deltas.push_back(delta);
    report.admissibility.push_back(c);  // |rho^(p^N)| = 1
    const u64 pn = ipow(p, n);
    const PadicNumber gap = rhoq_power(params.rho(), static_cast<i64>(pn)) - rhoq_power(params.q(), static_cast<i64>(pn));
    gap_bounds.push_back(params.degenerate() ? Norm::zero(p) : gap.norm());
    level_bounds.push_back(Norm::power(p, -n));
  }

  report.gap_model = fit_model("rho_q_gap", report.deltas, std::move(gap_bounds));
  report.level_model = fit_model("level", report.deltas, std::move(level_bounds));
  const ModelFit* chosen = &report.level_model;
  if (report.gap_model.usable && report.gap_model.spread <= report.level_model.spread) chosen = &report.gap_model;
  report.chosen_model = chosen->model;

  report.weakly = tends_to_zero(report.deltas, options.threshold_exponent);
  report.one_admissible = tends_to_zero(report.admissibility, options.threshold_exponent);
  report.strongly = report.weakly && chosen->usable && chosen->holdout_ok;

  if (levels.size() < 3) {
    report.kind = InvarianceKind::kInconclusive;
  } else if (report.strongly) {
    report.kind = InvarianceKind::kStrongly;
  } else if (report.one_admissible) {
    report.kind = InvarianceKind::kOneAdmissible;
  } else if (report.weakly) {
    report.kind = InvarianceKind::kWeakly;
  } else {
    report.kind = InvarianceKind::kNone;
  }
  return report;
}

std::vector<u64> default_sample_points(u64 p, int smallest_level, int largest_level, u64 seed, std::size_t extra) {
  std::vector<u64> out;
  const u64 small = ipow(p, smallest_level);
  for (u64 a = 0; a < small; ++a) out.push_back(a);
  const u64 large = ipow(p, largest_level);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < extra; ++i) out.push_back(rng() % large);
  return out;
}

ApproximantSequence radon_nikodym_derivative(const Distribution& d, u64 x, LevelRange levels, int target_digits) {
  std::vector<ApproximantTerm> terms;
  for (int n = levels.min; n <= levels.max; ++n) terms.push_back({n, d.scaled(Ball(x, n, d.prime()))});
  return ApproximantSequence(std::move(terms), target_digits);
}

}  // namespace rhoq
