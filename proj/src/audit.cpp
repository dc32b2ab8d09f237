// SPDX-License-Identifier: Apache-2.0

#include "rhoq/audit.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>

namespace rhoq {

// ------------------------------------------------------------ configuration

int AuditConfig::tolerance_digits() const { return tolerance.value_or(precision - 4); }

int AuditConfig::working_digits() const { return std::min(max_precision(p), precision + guard_digits); }

RhoQParams AuditConfig::params() const {
  const int w = working_digits();
  return RhoQParams(parse_parameter(rho, p, w), parse_parameter(q, p, w));
}

void AuditConfig::validate() const {
  if (p < 3 || !is_prime(p)) throw DomainError("p must be an odd prime");
  if (precision < 5) throw DomainError("precision must be at least 5");
  if (precision > max_precision(p)) throw DomainError("precision exceeds the word size for this prime");
  const int t = tolerance_digits();
  if (t < 1 || t > precision) throw DomainError("tolerance must lie in 1..precision");
  if (levels.min < 1 || levels.max < levels.min) throw DomainError("bad level window");
  if (levels.max > precision - 2) throw DomainError("level window exceeds the division budget (m - 2)");
  if (inner_levels < 1 || inner_levels + 2 > working_digits()) throw DomainError("bad inner truncation depth");
  if (grid_level < 1 || norm_grid_level < 1) throw DomainError("grid levels must be positive");
  if (mahler_order < 1) throw DomainError("Mahler order must be positive");
  params();  // parses rho and q
}

PadicNumber parse_parameter(const std::string& spec, u64 p, int digits) {
  const bool integer = !spec.empty() &&
                       std::all_of(spec.begin() + (spec[0] == '-' ? 1 : 0), spec.end(),
                                   [](unsigned char c) { return std::isdigit(c) != 0; }) &&
                       spec != "-";
  PadicNumber x;
  if (integer) {
    const i64 k = std::stoll(spec);
    ResidueRing ring(p, digits);
    x = PadicNumber::from_residue(p, ring.add(1, ring.mul(ring.reduce_signed(k), p % ring.modulus())), digits);
  } else {
    x = parse_padic(spec);
    if (x.prime() != p) throw PrimeMismatch("parameter " + spec + " is not over p = " + std::to_string(p));
    x = x.with_precision(std::min(digits, x.abs_precision()));
  }
  const PadicNumber one = PadicNumber::from_integer(1, p, x.abs_precision());
  if ((x - one).valuation() < 1) throw DomainError("parameter " + spec + " is not in 1 + pZ_p");
  return x;
}

FunctionPtr parse_function(const std::string& spec, const RhoQParams& params) {
  const u64 p = params.prime();
  const int w = params.precision();
  auto exponent_after = [&](std::string_view head) -> std::optional<int> {
    if (spec == head) return 1;
    if (spec.rfind(std::string(head) + "^", 0) == 0) return std::stoi(spec.substr(head.size() + 1));
    return std::nullopt;
  };
  try {
    if (!spec.empty() && (std::isdigit(static_cast<unsigned char>(spec[0])) || spec[0] == '-')) {
      return make_constant(std::stoll(spec), p, w);
    }
    if (spec == "ratio") return make_ratio_power(params);
    if (auto k = exponent_after("x")) return make_monomial_x(*k, p, w);
    if (auto k = exponent_after("[x]")) return make_rhoq_monomial(*k, params);
    if (spec.rfind("carlitz:", 0) == 0) {
      const auto colon = spec.find(':', 8);
      if (colon == std::string::npos) throw DomainError("carlitz:n:a expected");
      return std::make_shared<CarlitzIntegrand>(std::stoi(spec.substr(8, colon - 8)), std::stoll(spec.substr(colon + 1)),
                                                params);
    }
  } catch (const std::logic_error&) {
    // stoi and friends; reported below
  }
  throw DomainError("unknown function spec '" + spec + "'");
}

Json to_json(const AuditConfig& c) {
  Json j;
  j["p"] = c.p;
  j["precision"] = c.precision;
  j["working_digits"] = c.working_digits();
  j["tolerance_digits"] = c.tolerance_digits();
  j["rho"] = c.rho;
  j["q"] = c.q;
  j["levels"] = {c.levels.min, c.levels.max};
  j["seed"] = c.seed;
  j["zero_family"] = c.zero_family;
  j["inner_levels"] = c.inner_levels;
  j["grid_level"] = c.grid_level;
  j["norm_grid_level"] = c.norm_grid_level;
  j["mahler_order"] = c.mahler_order;
  j["tail_exponent"] = c.tail_exponent;
  return j;
}

// ---------------------------------------------------------------- helpers

namespace {

// Consecutive agreeing pairs required before a density value is declared.
// At rho = q = 1, A_(N+1) - A_N vanishes whenever a base-p digit of x equals
// (p-1)/2, so a single pair is not enough.
constexpr int kConfirmations = 3;

struct Context {
  explicit Context(const AuditConfig& c)
      : cfg(c), params(c.params()), p(c.p), t(c.tolerance_digits()), w(params.precision()),
        samples(default_sample_points(c.p, c.levels.min, c.levels.max + 1, c.seed)) {}

  const AuditConfig& cfg;
  RhoQParams params;
  u64 p;
  int t;
  int w;
  std::vector<u64> samples;

  /// Deepest level any audit asks a distribution for.
  int deepest_level(int target) const {
    int cap = 0;
    while (cap < 40 && ipow_fits(cap + 2)) ++cap;
    return std::min(cap, std::max(cfg.levels.max, target + 2 + kConfirmations));
  }
  bool ipow_fits(int e) const {
    u64 v = 1;
    for (int i = 0; i < e; ++i) {
      if (v > (u64{1} << 61) / p) return false;
      v *= p;
    }
    return true;
  }
  std::mt19937_64 rng(u64 salt) const { return std::mt19937_64(cfg.seed ^ (salt * 0x9e3779b97f4a7c15ULL)); }
  Json inputs() const {
    Json j;
    j["params"] = to_json(params);
    j["tolerance_digits"] = t;
    j["levels"] = {cfg.levels.min, cfg.levels.max};
    j["sample_count"] = samples.size();
    return j;
  }
};

/// The Radon-Nikodym sequence from `first`, stopping once it has converged.
ApproximantSequence rn_until_converged(const Distribution& d, u64 x, int target, int first, int last) {
  std::vector<ApproximantTerm> terms;
  ApproximantSequence seq;
  for (int n = first; n <= last; ++n) {
    terms.push_back({n, d.scaled(Ball(x, n, d.prime()))});
    seq = ApproximantSequence(terms, target, kConfirmations);
    if (seq.converged()) break;
  }
  return seq;
}

/// Agreement at the smaller of the two absolute precisions, capped at `cap`.
int comparable_digits(const PadicNumber& a, const PadicNumber& b, int cap) {
  return std::min({a.abs_precision(), b.abs_precision(), cap});
}

bool agree(const PadicNumber& a, const PadicNumber& b, int digits) {
  if (digits == kInfinity) return a == b;
  return agrees_to(a, b, digits);
}

/// |x| with values that vanish at their precision counted as 0.
Norm visible_norm(const PadicNumber& x) { return x.is_zero() ? Norm::zero(x.prime()) : x.norm(); }

Verdict verdict_of(bool ok) { return ok ? Verdict::kPass : Verdict::kFail; }

Verdict invariance_verdict(InvarianceKind kind) {
  switch (kind) {
    case InvarianceKind::kStrongly: return Verdict::kPass;
    case InvarianceKind::kInconclusive: return Verdict::kInconclusive;
    default: return Verdict::kFail;
  }
}

/// Integers below `bound` that are not multiples of p.
std::vector<u64> units_below(u64 bound, u64 p, std::size_t count, std::mt19937_64& rng) {
  std::vector<u64> out;
  while (out.size() < count) {
    const u64 x = rng() % bound;
    if (x % p != 0) out.push_back(x);
  }
  return out;
}

struct Family {
  std::string name;
  DistributionPtr distribution;
};

std::vector<Family> strongly_invariant_inputs(const Context& ctx) {
  if (ctx.cfg.zero_family) return {{"zero", std::make_shared<ZeroDistribution>(ctx.params)}};
  auto weights = std::make_shared<PolynomialWeights>(RhoQPolynomial::monomial(2, ctx.params), ctx.t);
  return {
      {"rhoq_haar", std::make_shared<RhoQHaar>(ctx.params)},
      {"weighted[x]^2", memoize(std::make_shared<PolynomialWeightedDistribution>(weights))},
  };
}

struct NamedFunction {
  std::string name;
  FunctionPtr f;
};

std::vector<NamedFunction> integrand_battery(const Context& ctx) {
  if (ctx.cfg.zero_family) return {{"0", make_constant(0, ctx.p, ctx.w)}};
  return {
      {"1", make_constant(1, ctx.p, ctx.w)},
      {"x", make_monomial_x(1, ctx.p, ctx.w)},
      {"[x]", make_rhoq_monomial(1, ctx.params)},
      {"(q/rho)^x", make_ratio_power(ctx.params)},
  };
}

Json rn_table(const std::vector<std::pair<u64, ApproximantSequence>>& seqs, std::size_t keep) {
  Json j = Json::array();
  for (std::size_t i = 0; i < seqs.size() && i < keep; ++i) {
    Json e;
    e["x"] = seqs[i].first;
    e["sequence"] = to_json(seqs[i].second);
    j.push_back(std::move(e));
  }
  return j;
}

}  // namespace

// ----------------------------------------------------------------- thm31

AuditReport audit_lipschitz(const AuditConfig& config) {
  config.validate();
  const Context ctx(config);
  AuditReport report;
  report.theorem = "thm31";
  report.title = "Radon-Nikodym derivatives of strongly invariant distributions are Lipschitz";
  report.inputs = ctx.inputs();
  report.inputs["grid_levels"] = {config.grid_level, config.grid_level + 1};

  const int last = ctx.deepest_level(ctx.t);
  for (const auto& [name, d] : strongly_invariant_inputs(ctx)) {
    const InvarianceReport inv = check_invariance(*d, config.levels, ctx.samples);
    report.add(name + "/strongly_invariant", "input is strongly invariant on the level window",
               inv.kind == InvarianceKind::kStrongly ? Verdict::kPass : Verdict::kInconclusive, to_json(inv));

    Json grids = Json::array();
    std::vector<Norm> constants;
    int unconverged = 0;
    std::vector<std::pair<u64, ApproximantSequence>> shown;
    for (int m : {config.grid_level, config.grid_level + 1}) {
      const u64 count = ipow(ctx.p, m);
      std::vector<PadicNumber> values;
      for (u64 x = 0; x < count; ++x) {
        auto seq = rn_until_converged(*d, x, ctx.t, config.levels.min, last);
        if (seq.converged()) {
          values.push_back(*seq.limit());
        } else {
          ++unconverged;
          values.push_back(seq.last());
        }
        if (m == config.grid_level && x < 3) shown.emplace_back(x, std::move(seq));
      }
      const Norm c1 = lipschitz_estimate(values);
      constants.push_back(c1);
      Json g;
      g["grid_level"] = m;
      g["points"] = count;
      g["sup"] = to_json(sup_norm(values));
      g["lipschitz"] = to_json(c1);
      grids.push_back(std::move(g));
    }
    const Norm a = constants[0], b = constants[1];
    const bool finite_and_stable =
        (a.is_zero() && b.is_zero()) ||
        (!a.is_zero() && !b.is_zero() && std::abs(a.valuation - b.valuation) <= 1);
    Json measured;
    measured["grids"] = std::move(grids);
    measured["unconverged_points"] = unconverged;
    measured["rn_sequences"] = rn_table(shown, 3);
    report.add(name + "/lipschitz_constant",
               "max |f(x)-f(y)|/|x-y| is finite and stable (within one digit) when the grid deepens by one level",
               unconverged > 0 ? Verdict::kInconclusive : verdict_of(finite_and_stable), std::move(measured));
    report.constants["C1[" + name + "]"] = to_json(b);
    const ModelFit& chosen = inv.chosen_model == inv.gap_model.model ? inv.gap_model : inv.level_model;
    report.constants["C[" + name + "]"] = chosen.usable ? to_json(chosen.constant) : Json(nullptr);
  }
  return report;
}

// ----------------------------------------------------------------- thm32

AuditReport audit_weighted_measure(const AuditConfig& config) {
  config.validate();
  const Context ctx(config);
  AuditReport report;
  report.theorem = "thm32";
  report.title = "The weighted distribution mu~_f is linear in f and bounded by ||f||_1";
  report.inputs = ctx.inputs();
  report.inputs["inner_levels"] = config.inner_levels;
  report.inputs["norm_grid_level"] = config.norm_grid_level;

  const auto battery = integrand_battery(ctx);
  Json names = Json::array();
  for (const auto& nf : battery) names.push_back(nf.name);
  report.inputs["integrands"] = std::move(names);
  const int inner = config.inner_levels;

  auto rng = ctx.rng(32);
  std::vector<Ball> random_balls;
  for (int i = 0; i < 20; ++i) {
    const int level = config.levels.min + static_cast<int>(rng() % static_cast<u64>(config.levels.size()));
    random_balls.emplace_back(rng() % ipow(ctx.p, level), level, ctx.p);
  }
  Json ball_list = Json::array();
  for (const auto& b : random_balls) ball_list.push_back(b.to_string());
  report.inputs["random_balls"] = std::move(ball_list);

  // Linearity on random (alpha, beta, f, g).
  {
    const u64 mod = ipow(ctx.p, ctx.w);
    int mismatches = 0, min_digits = kInfinity, compared = 0;
    Json pairs = Json::array();
    for (std::size_t i = 0; i < battery.size(); ++i) {
      const auto& f = battery[i];
      const auto& g = battery[(i + 1) % battery.size()];
      const PadicNumber alpha = PadicNumber::from_residue(ctx.p, rng() % mod, ctx.w);
      const PadicNumber beta = PadicNumber::from_residue(ctx.p, rng() % mod, ctx.w);
      const FunctionPtr h = make_combination({{alpha, f.f}, {beta, g.f}});
      int pair_mismatches = 0;
      for (const auto& ball : random_balls) {
        const PadicNumber lhs = weighted_measure(*h, ctx.params, ball, inner, WeightedPath::kLifted);
        const PadicNumber rhs = alpha * weighted_measure(*f.f, ctx.params, ball, inner, WeightedPath::kLifted) +
                                beta * weighted_measure(*g.f, ctx.params, ball, inner, WeightedPath::kLifted);
        const int digits = comparable_digits(lhs, rhs, ctx.w);
        min_digits = std::min(min_digits, digits);
        ++compared;
        if (!agree(lhs, rhs, digits)) ++pair_mismatches;
      }
      mismatches += pair_mismatches;
      Json e;
      e["f"] = f.name;
      e["g"] = g.name;
      e["alpha"] = to_json(alpha);
      e["beta"] = to_json(beta);
      e["mismatches"] = pair_mismatches;
      pairs.push_back(std::move(e));
    }
    Json measured;
    measured["pairs"] = std::move(pairs);
    measured["comparisons"] = compared;
    measured["min_digits_compared"] = min_digits == kInfinity ? Json("exact") : Json(min_digits);
    const bool enough = min_digits == kInfinity || min_digits >= ctx.t;
    report.add("linearity", "mu~_(alpha f + beta g) = alpha mu~_f + beta mu~_g on every random ball",
               mismatches > 0 ? Verdict::kFail : (enough ? Verdict::kPass : Verdict::kInconclusive),
               std::move(measured));
  }

  // The ||f||_1 bound and the per-level constant M with |mu~_f| <= M ||f||_inf.
  std::vector<Ball> bound_balls = random_balls;
  for (int n = config.levels.min; n <= config.levels.max; ++n) {
    for (u64 a : ctx.samples) bound_balls.emplace_back(a, n, ctx.p);
  }
  std::sort(bound_balls.begin(), bound_balls.end());
  bound_balls.erase(std::unique(bound_balls.begin(), bound_balls.end()), bound_balls.end());
  {
    int violations = 0;
    Json per_f = Json::array();
    Json sup_bound = Json::array();
    for (const auto& nf : battery) {
      const GridNorms norms = grid_norms(*nf.f, config.norm_grid_level);
      int f_violations = 0;
      Norm worst = Norm::zero(ctx.p);
      std::vector<Norm> per_level(static_cast<std::size_t>(config.levels.max + 1), Norm::zero(ctx.p));
      for (const auto& ball : bound_balls) {
        const PadicNumber s = weighted_scaled(*nf.f, ctx.params, ball, inner);
        const Norm ns = visible_norm(s);
        worst = max(worst, ns);
        if (ns > norms.one) ++f_violations;
        if (config.levels.contains(ball.level())) {
          auto& slot = per_level[static_cast<std::size_t>(ball.level())];
          slot = max(slot, ns * Norm::power(ctx.p, ball.level()));  // |mu~_f(ball)| = |scaled| p^N
        }
      }
      violations += f_violations;
      Json e;
      e["f"] = nf.name;
      e["grid_sup"] = to_json(norms.sup);
      e["grid_lipschitz"] = to_json(norms.lipschitz);
      e["norm_one"] = to_json(norms.one);
      e["max_scaled"] = to_json(worst);
      e["violations"] = f_violations;
      per_f.push_back(std::move(e));

      Json c;
      c["f"] = nf.name;
      Json levels = Json::array();
      Norm m_all = Norm::zero(ctx.p);
      for (int n = config.levels.min; n <= config.levels.max; ++n) {
        const Norm mu = per_level[static_cast<std::size_t>(n)];
        const Norm m_n = norms.sup.is_zero() ? Norm::zero(ctx.p) : mu / norms.sup;
        m_all = max(m_all, m_n);
        levels.push_back({{"level", n}, {"max_abs_measure", to_json(mu)}, {"M", to_json(m_n)}});
      }
      c["levels"] = std::move(levels);
      sup_bound.push_back(std::move(c));
      report.constants["M[" + nf.name + "]"] = to_json(m_all);
    }
    Json measured;
    measured["balls"] = bound_balls.size();
    measured["integrands"] = std::move(per_f);
    measured["violations"] = violations;
    report.add("norm_bound", "|mu~_f(ball)| |[p^N]| <= ||f||_1 on every sampled ball", verdict_of(violations == 0),
               std::move(measured));
    Json cm;
    cm["per_integrand"] = std::move(sup_bound);
    report.add("sup_norm_bound",
               "|mu~_f(ball)| <= M ||f||_inf; M is measured per level and grows like p^N on this window",
               config.zero_family ? Verdict::kPass : Verdict::kMeasured, std::move(cm));
  }

  // Direct restricted sums against the lifted-parameter path.
  {
    int mismatches = 0, worst_loss = 0, min_digits = kInfinity;
    Json per_f = Json::array();
    for (const auto& nf : battery) {
      int f_mismatches = 0;
      for (const auto& ball : random_balls) {
        PrecisionBudget bd(ctx.w), bl(ctx.w);
        const PadicNumber direct = weighted_measure(*nf.f, ctx.params, ball, inner, WeightedPath::kDirect, &bd);
        const PadicNumber lifted = weighted_measure(*nf.f, ctx.params, ball, inner, WeightedPath::kLifted, &bl);
        // The budget counts relative digits; shift by the valuation of the value.
        const int shift = direct.is_zero() ? 0 : std::min(direct.valuation(), lifted.valuation());
        const int digits = std::min(bd.remaining(), bl.remaining()) + shift;
        worst_loss = std::max({worst_loss, bd.total_loss(), bl.total_loss()});
        min_digits = std::min(min_digits, digits);
        if (!agree(direct, lifted, digits)) ++f_mismatches;
      }
      mismatches += f_mismatches;
      per_f.push_back({{"f", nf.name}, {"balls", random_balls.size()}, {"mismatches", f_mismatches}});
    }
    Json measured;
    measured["per_integrand"] = std::move(per_f);
    measured["worst_logged_loss"] = worst_loss;
    measured["min_digits_compared"] = min_digits;
    report.add("path_cross_validation",
               "direct and lifted evaluations of mu~_f(ball) agree within the logged precision-loss budget",
               verdict_of(mismatches == 0), std::move(measured));
  }
  return report;
}

// ----------------------------------------------------------------- thm33

namespace {

struct RatioCheck {
  bool converged = true;
  std::optional<PadicNumber> constant;
  bool constant_across_x = true;
  Json table = Json::array();
};

/// f(x) / denominator(x) over the sample, with constancy to t digits.
template <class Denominator>
RatioCheck ratio_constancy(const std::vector<std::pair<u64, ApproximantSequence>>& rn, Denominator denominator,
                           int t) {
  RatioCheck out;
  for (const auto& [x, seq] : rn) {
    if (!seq.converged()) {
      out.converged = false;
      continue;
    }
    const PadicNumber den = denominator(x);
    const PadicNumber r = seq.limit()->is_zero() ? PadicNumber::exact_zero(den.prime()) : *seq.limit() / den;
    if (!out.constant) {
      out.constant = r;
    } else if (!agree(r, *out.constant, comparable_digits(r, *out.constant, t))) {
      out.constant_across_x = false;
    }
    out.table.push_back({{"x", x}, {"ratio", to_json(r)}});
  }
  return out;
}

}  // namespace

AuditReport audit_closed_form(const AuditConfig& config) {
  config.validate();
  const Context ctx(config);
  AuditReport report;
  report.theorem = "thm33";
  report.title = "mu~_P for P = [x]^k is strongly invariant with density proportional to (q/rho)^x P(x)";
  report.inputs = ctx.inputs();

  auto rng = ctx.rng(33);
  const std::vector<u64> xs = units_below(ipow(ctx.p, config.levels.max + 1), ctx.p, 16, rng);
  Json xs_json = Json::array();
  for (u64 x : xs) xs_json.push_back(x);
  report.inputs["x_sample"] = std::move(xs_json);

  const int last = ctx.deepest_level(ctx.t);
  const PadicNumber one = PadicNumber::from_integer(1, ctx.p, ctx.w);
  const std::vector<int> degrees = config.zero_family ? std::vector<int>{0} : std::vector<int>{1, 2, 3};

  for (int k : degrees) {
    const std::string tag = config.zero_family ? "P=0" : "P=[x]^" + std::to_string(k);
    RhoQPolynomial poly = config.zero_family ? RhoQPolynomial({PadicNumber::exact_zero(ctx.p)}, ctx.params)
                                             : RhoQPolynomial::monomial(k, ctx.params);
    auto weights = std::make_shared<PolynomialWeights>(poly, ctx.t);
    const auto d = memoize(std::make_shared<PolynomialWeightedDistribution>(weights));
    auto P = [&](u64 x) { return config.zero_family ? PadicNumber::exact_zero(ctx.p) : pow(rhoq_integer(x, ctx.params), k); };

    // (i) strong invariance
    const InvarianceReport inv = check_invariance(*d, config.levels, ctx.samples);
    report.add(tag + "/strongly_invariant", "mu~_P is strongly invariant on the level window",
               invariance_verdict(inv.kind), to_json(inv));

    // (ii) density ratio
    std::vector<std::pair<u64, ApproximantSequence>> rn;
    for (u64 x : xs) rn.emplace_back(x, rn_until_converged(*d, x, ctx.t, config.levels.min, last));
    auto printed = ratio_constancy(rn, [&](u64 x) {
      const PadicNumber px = P(x);
      return px.is_zero() ? one : rhoq_power(ctx.params.ratio(), static_cast<i64>(x)) * px;
    }, ctx.t);
    auto inverted = ratio_constancy(rn, [&](u64 x) {
      const PadicNumber px = P(x);
      return px.is_zero() ? one : rhoq_power(ctx.params.ratio(), -static_cast<i64>(x)) * px;
    }, ctx.t);
    Json measured;
    measured["ratios"] = printed.table;
    measured["constant"] = printed.constant ? to_json(*printed.constant) : Json(nullptr);
    measured["rn_sequences"] = rn_table(rn, 2);
    Json variants;
    variants["(q/rho)^x P(x)"] = printed.converged && printed.constant_across_x;
    variants["(rho/q)^x P(x)"] = inverted.converged && inverted.constant_across_x;
    measured["constant_for_variant"] = std::move(variants);
    std::optional<PadicNumber> beta0;
    if (!config.zero_family && printed.constant) {
      beta0 = carlitz_geometric_limit(k, ctx.params);
      measured["constant_equals_one"] = agree(*printed.constant, one, comparable_digits(*printed.constant, one, ctx.t));
      measured["beta_0k_closed_form"] = beta0 ? to_json(*beta0) : Json(nullptr);
      measured["constant_equals_beta_0k"] =
          beta0 ? agree(*printed.constant, *beta0, comparable_digits(*printed.constant, *beta0, ctx.t)) : false;
    }
    report.add(tag + "/density_ratio", "f_mu~(x) / ((q/rho)^x P(x)) is one constant across the sampled x",
               !printed.converged ? Verdict::kInconclusive : verdict_of(printed.constant_across_x),
               std::move(measured));
    const PadicNumber constant = printed.constant.value_or(PadicNumber::exact_zero(ctx.p));
    report.constants["ratio[" + tag + "]"] = to_json(constant);

    // (iii) integral identity over a four-function battery
    {
      std::vector<FunctionPtr> gs = {make_constant(1, ctx.p, ctx.w), make_monomial_x(1, ctx.p, ctx.w),
                                     make_monomial_x(2, ctx.p, ctx.w), make_ratio_power(ctx.params)};
      const std::vector<std::string> g_names = {"1", "x", "x^2", "(q/rho)^x"};
      int top = 0;
      auto run = [&](const PolynomialWeights& pw, int target) {
        const int budget = std::max(config.levels.max, level_budget(ctx.p, ctx.w, target + 1, 60'000'000));
        top = std::min(budget, std::max(config.levels.max, target + 1));
        for (;;) {
          auto out = integral_against_weighted(gs, pw, {config.levels.min, top}, target);
          const bool done = std::all_of(out.begin(), out.end(), [](const IntegralIdentity& i) {
            return i.lhs.converged() && i.rhs.converged();
          });
          if (done || top >= budget) return out;
          ++top;
        }
      };
      // A right-hand side divisible by p^v leaves the ratio v digits short of
      // t, so the sums run v digits deeper. v comes from a cheap pre-pass.
      int slack = 0;
      if (!config.zero_family) {
        for (const auto& g : gs) {
          const ProductFunction gp(g, std::make_shared<RhoQPolynomial>(poly));
          const auto rhs = volkenborn_until_converged(gp, ctx.params, config.levels, ctx.t);
          if (rhs.converged() && !rhs.limit()->is_zero()) slack = std::max(slack, rhs.limit()->valuation());
        }
        slack = std::min(slack, ctx.w - ctx.t - 2);
      }
      const PolynomialWeights deeper(poly, ctx.t + slack);
      const std::vector<IntegralIdentity> ids = run(slack > 0 ? deeper : *weights, ctx.t + slack);
      bool converged = true, consistent = true, thin = false;
      Json rows = Json::array();
      for (std::size_t i = 0; i < ids.size(); ++i) {
        Json row;
        row["g"] = g_names[i];
        row["lhs"] = to_json(ids[i].lhs);
        row["rhs"] = to_json(ids[i].rhs);
        if (!ids[i].lhs.converged() || !ids[i].rhs.converged()) {
          converged = false;
          rows.push_back(std::move(row));
          continue;
        }
        const PadicNumber& lhs = *ids[i].lhs.limit();
        const PadicNumber& rhs = *ids[i].rhs.limit();
        if (rhs.is_zero()) {
          // 0 = c * 0 holds for any c; only a nonzero lhs contradicts it.
          row["ratio"] = nullptr;
          consistent &= lhs.is_zero();
        } else {
          const PadicNumber r = lhs / rhs;
          const int digits = comparable_digits(r, constant, ctx.t);
          row["ratio"] = to_json(r);
          row["digits_compared"] = digits;
          thin |= digits < 1;
          consistent &= agree(r, constant, digits);
        }
        rows.push_back(std::move(row));
      }
      Json m;
      m["levels"] = {config.levels.min, top};
      m["extra_digits"] = slack;
      m["identities"] = std::move(rows);
      report.add(tag + "/integral_identity",
                 "sum_a g(a) mu~_P(a + p^N Z_p) / integral of g P tends to the same constant for each g",
                 !converged || thin ? Verdict::kInconclusive : verdict_of(consistent), std::move(m));
    }

    // (iv) splitting expansion term by term
    if (!config.zero_family) {
      int mismatches = 0;
      Json rows = Json::array();
      for (int s = 0; s < 16; ++s) {
        const int n = config.levels.min + static_cast<int>(rng() % static_cast<u64>(config.levels.size()));
        const u64 a = rng() % ipow(ctx.p, n);
        const u64 i = rng() % ipow(ctx.p, 3);
        const auto terms = splitting_expansion_terms(k, a, i, n, ctx.params);
        PadicNumber sum = PadicNumber::exact_zero(ctx.p);
        for (const auto& term : terms) sum += term;
        const PadicNumber direct = pow(rhoq_integer(a + i * ipow(ctx.p, n), ctx.params), k);
        const bool ok = agree(sum, direct, comparable_digits(sum, direct, ctx.w));
        mismatches += ok ? 0 : 1;
        if (s < 4) rows.push_back({{"a", a}, {"i", i}, {"n", n}, {"sum", to_json(sum)}, {"direct", to_json(direct)}});
      }
      report.add(tag + "/splitting_expansion",
                 "[a + i p^n]^k = sum_l C(k,l) q^(a l) [p^n]^l [i]'^l rho^(i p^n (k-l)) [a]^(k-l)",
                 verdict_of(mismatches == 0), {{"samples", 16}, {"mismatches", mismatches}, {"first_rows", rows}});
    }
  }

  // Carlitz-type Bernoulli numbers and their closed forms.
  if (!config.zero_family) {
    Json table = Json::array();
    for (int n = 0; n <= 2; ++n) {
      for (int a = 0; a <= 2; ++a) {
        CarlitzIntegrand f(n, a, ctx.params);
        const auto seq = volkenborn_until_converged(f, ctx.params, config.levels, ctx.t);
        table.push_back({{"n", n}, {"a", a}, {"sequence", to_json(seq)}});
      }
    }
    report.add("beta_table", "beta_{n:a} approximants for n, a <= 2 (at rho = q = 1, beta_{1:0} = -1/2)",
               Verdict::kMeasured, {{"entries", std::move(table)}});

    bool all_match = true, stalled = false;
    Json rows = Json::array();
    for (int a = 0; a <= 3; ++a) {
      CarlitzIntegrand f(0, a, ctx.params);
      const auto seq = volkenborn_until_converged(f, ctx.params, config.levels, ctx.t);
      const auto closed = carlitz_geometric_limit(a, ctx.params);
      const auto printed = carlitz_log_ratio(a, ctx.params);
      Json row;
      row["a"] = a;
      row["limit"] = seq.limit() ? to_json(*seq.limit()) : Json(nullptr);
      row["geometric_closed_form"] = closed ? to_json(*closed) : Json(nullptr);
      row["a_log_rho_over_log_rho_q"] = printed ? to_json(*printed) : Json(nullptr);
      if (!seq.converged() || !closed) {
        stalled = true;
      } else {
        const bool ok = agree(*seq.limit(), *closed, comparable_digits(*seq.limit(), *closed, ctx.t));
        row["matches_geometric"] = ok;
        all_match &= ok;
      }
      if (seq.converged() && printed) {
        row["matches_log_ratio"] = agree(*seq.limit(), *printed, comparable_digits(*seq.limit(), *printed, ctx.t));
      }
      rows.push_back(std::move(row));
    }
    report.add("beta_0a_closed_form",
               "beta_{0:a} equals (rho-q) log c / ((c-1)(log rho - log q)), c = rho^(a-1) q; the log-ratio "
               "form is recorded for comparison",
               stalled ? Verdict::kInconclusive : verdict_of(all_match), {{"rows", std::move(rows)}});
  }
  return report;
}

// ----------------------------------------------------------------- thm34

AuditReport audit_decomposition(const AuditConfig& config) {
  config.validate();
  const Context ctx(config);
  AuditReport report;
  report.theorem = "thm34";
  report.title = "mu~_f splits as a strongly invariant part plus a part bounded by a single K";
  report.inputs = ctx.inputs();
  report.inputs["inner_levels"] = config.inner_levels;
  report.inputs["mahler_order"] = config.mahler_order;
  report.inputs["tail_exponent"] = config.tail_exponent;

  const WeightedOptions options{TruncationMode::kInnerLevels, config.inner_levels};
  // The density is read to as many digits as the inner sums carry, so the
  // truncation error, not the rounding, sets the size of mu_2.
  const int rn_digits = std::max(ctx.t, ctx.w - config.inner_levels - 1);
  const int last = ctx.deepest_level(rn_digits);

  std::vector<NamedFunction> tests;
  if (config.zero_family) {
    tests.push_back({"0", make_constant(0, ctx.p, ctx.w)});
  } else {
    const FunctionPtr ratio = make_ratio_power(ctx.params);
    tests.push_back({"(q/rho)^x", ratio});
    tests.push_back({"mahler2[(q/rho)^x]", truncation_polynomial(mahler_coefficients(*ratio, 2, ctx.params), 2)});
  }
  Json names = Json::array();
  for (const auto& t : tests) names.push_back(t.name);
  report.inputs["test_functions"] = std::move(names);

  for (const auto& [name, f] : tests) {
    const DistributionPtr mu = config.zero_family
                                   ? DistributionPtr(std::make_shared<ZeroDistribution>(ctx.params))
                                   : memoize(std::make_shared<WeightedDistribution>(f, ctx.params, options));

    // Density at 0..M and h(x) = (rho/q)^x f_mu(x).
    std::vector<std::pair<u64, ApproximantSequence>> rn;
    std::vector<PadicNumber> h;
    bool converged = true;
    const PadicNumber inverse_ratio = ctx.params.swapped().ratio();
    Json density_ratio = Json::array();
    bool density_matches = true;
    for (u64 x = 0; x <= static_cast<u64>(config.mahler_order); ++x) {
      auto seq = rn_until_converged(*mu, x, rn_digits, config.levels.min, last);
      converged &= seq.converged();
      const PadicNumber value = seq.converged() ? *seq.limit() : seq.last();
      h.push_back(rhoq_power(inverse_ratio, static_cast<i64>(x)) * value);
      const PadicNumber fx = f->value_at(x);
      if (!fx.is_zero()) {
        const PadicNumber r = h.back() / fx;
        const PadicNumber one = PadicNumber::from_integer(1, ctx.p, ctx.w);
        density_matches &= agree(r, one, comparable_digits(r, one, ctx.t));
        if (x < 4) density_ratio.push_back({{"x", x}, {"ratio", to_json(r)}});
      }
      rn.emplace_back(x, std::move(seq));
    }
    const MahlerSeries series = mahler_from_values(h, ctx.params);
    int m = 0;
    while (m < series.order() && !(series.tail_norm(m + 1) <= Norm::power(ctx.p, -config.tail_exponent))) ++m;
    const FunctionPtr h_m = truncation_polynomial(series, m);

    // Truncation error on the sample grid against the computed tail.
    Norm grid_error = Norm::zero(ctx.p);
    for (u64 x = 0; x <= static_cast<u64>(config.mahler_order); ++x) {
      grid_error = max(grid_error, visible_norm(h[x] - h_m->value_at(x)));
    }
    const Norm tail = series.tail_norm(m + 1);

    const DistributionPtr mu1 =
        config.zero_family ? DistributionPtr(std::make_shared<ZeroDistribution>(ctx.params))
                           : memoize(std::make_shared<WeightedDistribution>(h_m, ctx.params, options));
    const DistributionPtr mu2 = make_difference(mu, mu1);

    std::vector<Norm> k_levels;
    Json k_rows = Json::array();
    int min_digits = kInfinity;
    for (int n = config.levels.min; n <= config.levels.max; ++n) {
      Norm k_n = Norm::zero(ctx.p);
      for (u64 a : ctx.samples) {
        const PadicNumber v = mu2->scaled(Ball(a, n, ctx.p));
        k_n = max(k_n, visible_norm(v));
        min_digits = std::min(min_digits, v.abs_precision());
      }
      k_levels.push_back(k_n);
      k_rows.push_back({{"level", n}, {"K_N", to_json(k_n)}});
    }
    Norm k = Norm::zero(ctx.p);
    int lo = kInfinity, hi = -kInfinity;
    for (Norm kn : k_levels) {
      k = max(k, kn);
      if (kn.is_zero()) continue;
      lo = std::min(lo, kn.valuation);
      hi = std::max(hi, kn.valuation);
    }
    const bool all_zero = lo == kInfinity;
    const bool some_zero = std::any_of(k_levels.begin(), k_levels.end(), [](Norm kn) { return kn.is_zero(); });
    const bool stable = all_zero || (!some_zero && hi - lo <= 1);

    Json measured;
    measured["rn_digits"] = rn_digits;
    measured["rn_sequences"] = rn_table(rn, 2);
    measured["density_over_weight_times_f"] = std::move(density_ratio);
    measured["mahler_series_of_h"] = to_json(series);
    measured["truncation_order"] = m;
    measured["tail_norm"] = to_json(tail);
    measured["grid_truncation_error"] = to_json(grid_error);
    measured["K_per_level"] = std::move(k_rows);
    measured["min_digits"] = min_digits == kInfinity ? Json("exact") : Json(min_digits);
    report.add(name + "/density", "f_mu(x) = (q/rho)^x f(x) up to a constant 1 at the sampled x",
               !converged ? Verdict::kInconclusive : verdict_of(density_matches),
               {{"ratios", measured["density_over_weight_times_f"]}});
    report.add(name + "/truncation_error", "|h(x) - h_m(x)| <= sup_{n>m} |a_n| on the grid 0..M",
               verdict_of(grid_error <= tail || grid_error.is_zero()),
               {{"tail_norm", to_json(tail)}, {"grid_error", measured["grid_truncation_error"]}});
    report.add(name + "/bounded_remainder",
               "|[p^N](mu - mu_1)(ball)| <= K with one K stable within a digit across the level window",
               !converged ? Verdict::kInconclusive : verdict_of(stable), std::move(measured));
    report.constants["K[" + name + "]"] = all_zero ? Json("0") : to_json(k);
  }
  return report;
}

// ------------------------------------------------------------------ runner

std::vector<AuditReport> run_audits(const AuditConfig& config, std::span<const std::string> selectors) {
  config.validate();
  std::vector<std::string> which;
  for (const auto& s : selectors) {
    if (s == "all") {
      for (const char* t : {"thm31", "thm32", "thm33", "thm34"}) which.emplace_back(t);
    } else if (s == "thm31" || s == "thm32" || s == "thm33" || s == "thm34") {
      which.push_back(s);
    } else {
      throw DomainError("unknown theorem selector '" + s + "'");
    }
  }
  std::vector<AuditReport> reports(which.size());
  std::vector<std::string> errors(which.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < which.size(); ++i) {
    try {
      const std::string& t = which[i];
      if (t == "thm31") reports[i] = audit_lipschitz(config);
      else if (t == "thm32") reports[i] = audit_weighted_measure(config);
      else if (t == "thm33") reports[i] = audit_closed_form(config);
      else reports[i] = audit_decomposition(config);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < which.size(); ++i) {
    if (!errors[i].empty()) {
      reports[i].theorem = which[i];
      reports[i].title = "audit aborted";
      reports[i].add("run", "the audit runs to completion", Verdict::kInconclusive, {{"error", errors[i]}});
    }
  }
  return reports;
}

Json audit_document(const AuditConfig& config, std::span<const AuditReport> reports) {
  Json doc;
  doc["schema"] = kReportSchema;
  doc["kind"] = "audit";
  doc["config"] = to_json(config);
  Json rs = Json::array();
  int counts[4] = {0, 0, 0, 0};
  for (const auto& r : reports) {
    rs.push_back(to_json(r));
    for (const auto& c : r.checks) ++counts[static_cast<int>(c.verdict)];
  }
  doc["reports"] = std::move(rs);
  doc["summary"] = {{"pass", counts[0]},
                    {"fail", counts[1]},
                    {"inconclusive", counts[2]},
                    {"measured", counts[3]},
                    {"exit_code", exit_code(reports)}};
  return doc;
}

}  // namespace rhoq
