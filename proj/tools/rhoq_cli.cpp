// SPDX-License-Identifier: Apache-2.0
//
// rhoq: command-line front end for the deformed Haar distribution, the
// Volkenborn integral, Carlitz-type Bernoulli numbers, Mahler expansions,
// Radon-Nikodym derivatives and the theorem auditor.

#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rhoq/audit.hpp"

using namespace rhoq;

namespace {

enum class Output { kJson, kCsv, kTable };

LevelRange parse_levels(const std::string& s) {
  const auto sep = s.find_first_of(":.-");
  if (sep == std::string::npos) {
    const int n = std::stoi(s);
    return {n, n};
  }
  std::size_t rest = sep;
  while (rest < s.size() && (s[rest] == ':' || s[rest] == '.' || s[rest] == '-')) ++rest;
  return {std::stoi(s.substr(0, sep)), std::stoi(s.substr(rest))};
}

DistributionPtr make_family(const std::string& spec, const AuditConfig& cfg, const RhoQParams& params) {
  if (spec == "haar") return std::make_shared<RhoQHaar>(params);
  if (spec == "zero") return std::make_shared<ZeroDistribution>(params);
  if (spec.rfind("weighted:", 0) == 0) {
    return std::make_shared<WeightedDistribution>(parse_function(spec.substr(9), params), params,
                                                  WeightedOptions{TruncationMode::kInnerLevels, cfg.inner_levels});
  }
  if (spec.rfind("poly:", 0) == 0) {
    auto weights = std::make_shared<PolynomialWeights>(RhoQPolynomial::monomial(std::stoi(spec.substr(5)), params),
                                                       cfg.tolerance_digits());
    return std::make_shared<PolynomialWeightedDistribution>(std::move(weights));
  }
  throw DomainError("unknown family '" + spec + "' (haar, zero, weighted:<f>, poly:<k>)");
}

Json document(const std::string& kind, const AuditConfig& cfg) {
  Json doc;
  doc["schema"] = kReportSchema;
  doc["kind"] = kind;
  doc["config"] = to_json(cfg);
  return doc;
}

void emit(const Json& doc, Output out) {
  switch (out) {
    case Output::kJson: std::cout << doc.dump(2) << '\n'; break;
    case Output::kCsv: std::cout << render_csv(doc); break;
    case Output::kTable:
      for (const auto& [path, value] : flatten(doc)) std::cout << path << "  " << value << '\n';
      break;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deformed (rho,q) p-adic distributions, integrals and theorem audits"};
  app.require_subcommand(1);
  app.fallthrough();

  AuditConfig cfg;
  std::string levels = "1:5", out = "json";
  int tol = -1;
  app.add_option("--p", cfg.p, "odd prime")->capture_default_str();
  app.add_option("--prec", cfg.precision, "precision m in p-adic digits")->capture_default_str();
  app.add_option("--rho", cfg.rho, "rho: integer k for 1 + k p, or a canonical digit string")->capture_default_str();
  app.add_option("--q", cfg.q, "q: integer k for 1 + k p, or a canonical digit string")->capture_default_str();
  app.add_option("--levels", levels, "level window, e.g. 1:5")->capture_default_str();
  app.add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
  app.add_option("--tol", tol, "tolerance exponent t (default m - 4)");
  app.add_option("--out", out, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}))->capture_default_str();
  app.add_option("--inner", cfg.inner_levels, "inner truncation depth of weighted distributions")->capture_default_str();

  auto* measure = app.add_subcommand("measure", "value of a distribution on a ball a + p^N Z_p");
  u64 ball_a = 0;
  int ball_n = 1;
  std::string family = "haar";
  measure->add_option("--a", ball_a, "ball representative")->capture_default_str();
  measure->add_option("--n", ball_n, "ball level N")->capture_default_str();
  measure->add_option("--family", family, "haar, zero, weighted:<f>, poly:<k>")->capture_default_str();

  auto* integrate = app.add_subcommand("integrate", "Volkenborn approximants of a function");
  std::string fspec = "x";
  bool until = false;
  integrate->add_option("--f", fspec, "1, x, x^k, [x], [x]^k, ratio, carlitz:n:a")->capture_default_str();
  integrate->add_flag("--until-converged", until, "widen the window until the sequence converges");

  auto* bernoulli = app.add_subcommand("bernoulli", "Carlitz-type Bernoulli number beta_{n:a}");
  int bn = 1;
  i64 ba = 0;
  bernoulli->add_option("--n", bn)->capture_default_str();
  bernoulli->add_option("--a", ba)->capture_default_str();

  auto* mahler = app.add_subcommand("mahler", "Mahler coefficients in the (rho,q)-binomial basis");
  int order = 24;
  mahler->add_option("--f", fspec, "function spec")->capture_default_str();
  mahler->add_option("--order", order, "highest coefficient index M")->capture_default_str();

  auto* rn = app.add_subcommand("rn-deriv", "Radon-Nikodym approximants [p^N] d(x + p^N Z_p)");
  u64 rn_x = 1;
  rn->add_option("--x", rn_x)->capture_default_str();
  rn->add_option("--family", family, "haar, zero, weighted:<f>, poly:<k>")->capture_default_str();

  auto* audit = app.add_subcommand("audit", "run theorem audits");
  std::vector<std::string> selectors;
  audit->add_option("theorems", selectors, "thm31 thm32 thm33 thm34 or all")->required();
  audit->add_flag("--zero", cfg.zero_family, "audit the zero distribution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version report success; every usage error exits 3.
    return app.exit(e) == 0 ? 0 : 3;
  }

  try {
    cfg.levels = parse_levels(levels);
    if (tol >= 0) cfg.tolerance = tol;
    cfg.validate();
    const Output output = out == "csv" ? Output::kCsv : out == "table" ? Output::kTable : Output::kJson;
    const RhoQParams params = cfg.params();
    const int t = cfg.tolerance_digits();

    if (*audit) {
      const auto reports = run_audits(cfg, selectors);
      if (output == Output::kJson) {
        std::cout << audit_document(cfg, reports).dump(2) << '\n';
      } else if (output == Output::kCsv) {
        std::cout << render_csv(reports);
      } else {
        std::cout << render_table(reports);
      }
      return exit_code(reports);
    }

    if (*measure) {
      const auto d = make_family(family, cfg, params);
      const Ball ball(ball_a, ball_n, cfg.p);
      Json doc = document("measure", cfg);
      doc["family"] = d->family();
      doc["ball"] = ball.to_string();
      doc["value"] = to_json(d->value(ball));
      doc["scaled"] = to_json(d->scaled(ball));
      PadicNumber children = PadicNumber::exact_zero(cfg.p);
      for (const auto& c : ball.children()) children += d->value(c);
      doc["children_sum"] = to_json(children);
      emit(doc, output);
    } else if (*integrate) {
      const auto f = parse_function(fspec, params);
      const auto seq = until ? volkenborn_until_converged(*f, params, cfg.levels, t)
                             : volkenborn_integral(*f, params, cfg.levels, t);
      Json doc = document("integrate", cfg);
      doc["function"] = f->describe();
      doc["approximants"] = to_json(seq);
      emit(doc, output);
    } else if (*bernoulli) {
      CarlitzIntegrand f(bn, ba, params);
      const auto seq = volkenborn_until_converged(f, params, cfg.levels, t);
      Json doc = document("bernoulli", cfg);
      doc["n"] = bn;
      doc["a"] = ba;
      doc["approximants"] = to_json(seq);
      if (bn == 0) {
        const auto closed = carlitz_geometric_limit(ba, params);
        const auto printed = carlitz_log_ratio(ba, params);
        doc["geometric_closed_form"] = closed ? to_json(*closed) : Json(nullptr);
        doc["a_log_rho_over_log_rho_q"] = printed ? to_json(*printed) : Json(nullptr);
      }
      emit(doc, output);
    } else if (*mahler) {
      const auto f = parse_function(fspec, params);
      const auto series = mahler_coefficients(*f, order, params);
      int mismatches = 0;
      for (int i = 0; i <= order; ++i) {
        if (!agrees_to(mahler_evaluate(series, static_cast<u64>(i)), f->value_at(static_cast<u64>(i)),
                       series.params().precision())) {
          ++mismatches;
        }
      }
      Json doc = document("mahler", cfg);
      doc["function"] = f->describe();
      doc["series"] = to_json(series);
      doc["roundtrip_mismatches"] = mismatches;
      emit(doc, output);
    } else if (*rn) {
      const auto d = make_family(family, cfg, params);
      const auto seq = radon_nikodym_derivative(*d, rn_x, cfg.levels, t);
      Json doc = document("rn-deriv", cfg);
      doc["family"] = d->family();
      doc["x"] = rn_x;
      doc["approximants"] = to_json(seq);
      emit(doc, output);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
