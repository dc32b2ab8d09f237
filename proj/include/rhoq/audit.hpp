// SPDX-License-Identifier: Apache-2.0
//
// The theorem auditor. Each audit turns one statement about deformed
// distributions into finite numerical checks at truncation level N and
// returns an AuditReport; inconclusive outcomes are data, not errors.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rhoq/report.hpp"

namespace rhoq {

struct AuditConfig {
  u64 p = 5;
  int precision = 12;  // m
  std::string rho = "1";  // an integer k means 1 + k p; anything else is a digit string
  std::string q = "2";
  LevelRange levels{1, 5};
  u64 seed = 20240607;
  std::optional<int> tolerance;  // t, default m - 4
  bool zero_family = false;      // audit the zero distribution instead

  int guard_digits = 10;      // internal digits beyond m, capped by the word size
  int inner_levels = 6;       // truncation depth of generic weighted distributions
  int grid_level = 2;         // Lipschitz grid p^M, then p^(M+1)
  int norm_grid_level = 3;    // grid for ||f||_1
  int mahler_order = 24;
  int tail_exponent = 2;      // truncate where the Mahler tail falls to p^-tail_exponent

  int tolerance_digits() const;
  int working_digits() const;
  RhoQParams params() const;
  /// Throws DomainError on an unusable configuration.
  void validate() const;
};

/// 1 + k p for an integer spec, otherwise parse_padic; must lie in 1 + pZ_p.
PadicNumber parse_parameter(const std::string& spec, u64 p, int digits);

/// "0", "1", "c" (integers), "x", "x^k", "[x]", "[x]^k", "ratio" for (q/rho)^x,
/// "carlitz:n:a" for rho^(a x)[x]^n.
FunctionPtr parse_function(const std::string& spec, const RhoQParams& params);

Json to_json(const AuditConfig& config);

AuditReport audit_lipschitz(const AuditConfig& config);
AuditReport audit_weighted_measure(const AuditConfig& config);
AuditReport audit_closed_form(const AuditConfig& config);
AuditReport audit_decomposition(const AuditConfig& config);

/// Theorem selectors: thm31, thm32, thm33, thm34 or all. Audits run as
/// independent jobs; the result order follows the selector order.
std::vector<AuditReport> run_audits(const AuditConfig& config, std::span<const std::string> selectors);

/// The full JSON document for a set of reports.
Json audit_document(const AuditConfig& config, std::span<const AuditReport> reports);

}  // namespace rhoq
