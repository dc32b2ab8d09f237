// SPDX-License-Identifier: Apache-2.0
//
// Structured results: verdicts, per-check records, and their JSON, CSV and
// table renderings. Every p-adic value goes out as its canonical digit
// string; the JSON carries strings, integers, booleans and nulls only, so two
// runs with the same inputs serialize byte for byte the same.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rhoq/mahler.hpp"
#include "rhoq/measures.hpp"

namespace rhoq {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "rhoq-report/1";

enum class Verdict { kPass, kFail, kInconclusive, kMeasured };

std::string to_string(Verdict v);

struct CheckRecord {
  std::string id;
  std::string relation;  // the expected relation, in words
  Verdict verdict = Verdict::kMeasured;
  Json measured = Json::object();
};

struct AuditReport {
  std::string theorem;
  std::string title;
  Json inputs = Json::object();
  std::vector<CheckRecord> checks;
  Json constants = Json::object();

  CheckRecord& add(std::string id, std::string relation, Verdict verdict, Json measured = Json::object());
  /// FAIL beats INCONCLUSIVE beats PASS; MEASURED-only reports stay MEASURED.
  Verdict overall() const;
};

/// 0 when nothing failed or stalled, 1 on any FAIL, 2 on INCONCLUSIVE without FAIL.
int exit_code(std::span<const AuditReport> reports);

Json to_json(const PadicNumber& x);
Json to_json(Norm n);
Json to_json(const std::vector<Norm>& norms);
Json to_json(const ApproximantSequence& seq);
Json to_json(const InvarianceReport& r);
Json to_json(const MahlerSeries& s);
Json to_json(const RhoQParams& params);
Json to_json(const AuditReport& r);

/// Rows "path,value" for every leaf, with paths like checks/2/measured/limit.
std::vector<std::pair<std::string, std::string>> flatten(const Json& j);

/// CSV quoting for one field.
std::string csv_field(const std::string& s);

std::string render_csv(const Json& document);
/// Audit reports as theorem,check,verdict,path,value rows.
std::string render_csv(std::span<const AuditReport> reports);
std::string render_table(std::span<const AuditReport> reports);

}  // namespace rhoq
