// SPDX-License-Identifier: Apache-2.0

#include "rhoq/report.hpp"

#include <algorithm>
#include <sstream>

namespace rhoq {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "PASS";
    case Verdict::kFail: return "FAIL";
    case Verdict::kInconclusive: return "INCONCLUSIVE";
    case Verdict::kMeasured: return "MEASURED";
  }
  return "UNKNOWN";
}

CheckRecord& AuditReport::add(std::string id, std::string relation, Verdict verdict, Json measured) {
  checks.push_back({std::move(id), std::move(relation), verdict, std::move(measured)});
  return checks.back();
}

Verdict AuditReport::overall() const {
  bool fail = false, stalled = false, pass = false;
  for (const auto& c : checks) {
    fail |= c.verdict == Verdict::kFail;
    stalled |= c.verdict == Verdict::kInconclusive;
    pass |= c.verdict == Verdict::kPass;
  }
  if (fail) return Verdict::kFail;
  if (stalled) return Verdict::kInconclusive;
  return pass ? Verdict::kPass : Verdict::kMeasured;
}

int exit_code(std::span<const AuditReport> reports) {
  bool stalled = false;
  for (const auto& r : reports) {
    const Verdict v = r.overall();
    if (v == Verdict::kFail) return 1;
    stalled |= v == Verdict::kInconclusive;
  }
  return stalled ? 2 : 0;
}

// ------------------------------------------------------------------- JSON

Json to_json(const PadicNumber& x) { return x.to_string(); }
Json to_json(Norm n) { return n.to_string(); }

Json to_json(const std::vector<Norm>& norms) {
  Json out = Json::array();
  for (Norm n : norms) out.push_back(n.to_string());
  return out;
}

Json to_json(const ApproximantSequence& seq) {
  Json j;
  j["target_digits"] = seq.target_digits();
  Json terms = Json::array();
  for (std::size_t i = 0; i < seq.terms().size(); ++i) {
    Json t;
    t["level"] = seq.terms()[i].level;
    t["value"] = to_json(seq.terms()[i].value);
    t["rate"] = i == 0 ? Json(nullptr) : to_json(seq.rates()[i - 1]);
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  j["converged"] = seq.converged();
  j["converged_at"] = seq.converged_at() ? Json(*seq.converged_at()) : Json(nullptr);
  j["limit"] = seq.limit() ? to_json(*seq.limit()) : Json(nullptr);
  return j;
}

namespace {

Json to_json(const ModelFit& fit) {
  Json j;
  j["model"] = fit.model;
  j["usable"] = fit.usable;
  j["constant"] = fit.usable ? to_json(fit.constant) : Json(nullptr);
  j["spread"] = fit.spread;
  j["holdout_ok"] = fit.holdout_ok;
  j["bounds"] = to_json(fit.bounds);
  return j;
}

}  // namespace

Json to_json(const InvarianceReport& r) {
  Json j;
  j["family"] = r.family;
  j["levels"] = {r.levels.min, r.levels.max};
  j["sample_count"] = r.sample_count;
  j["deltas"] = to_json(r.deltas);
  j["admissibility"] = to_json(r.admissibility);
  j["gap_model"] = to_json(r.gap_model);
  j["level_model"] = to_json(r.level_model);
  j["chosen_model"] = r.chosen_model;
  j["weakly"] = r.weakly;
  j["one_admissible"] = r.one_admissible;
  j["strongly"] = r.strongly;
  j["kind"] = to_string(r.kind);
  return j;
}

Json to_json(const MahlerSeries& s) {
  Json j;
  j["basis"] = to_string(s.basis());
  j["order"] = s.order();
  Json coeffs = Json::array();
  for (const auto& c : s.coefficients()) {
    Json e;
    e["value"] = to_json(c);
    e["norm"] = to_json(c.norm());
    coeffs.push_back(std::move(e));
  }
  j["coefficients"] = std::move(coeffs);
  j["decay_index"] = s.decay_index();
  return j;
}

Json to_json(const RhoQParams& params) {
  Json j;
  j["p"] = params.prime();
  j["precision"] = params.precision();
  j["rho"] = to_json(params.rho());
  j["q"] = to_json(params.q());
  return j;
}

Json to_json(const AuditReport& r) {
  Json j;
  j["theorem"] = r.theorem;
  j["title"] = r.title;
  j["verdict"] = to_string(r.overall());
  j["inputs"] = r.inputs;
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json e;
    e["id"] = c.id;
    e["relation"] = c.relation;
    e["verdict"] = to_string(c.verdict);
    e["measured"] = c.measured;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  j["constants"] = r.constants;
  return j;
}

// ------------------------------------------------------------- flattening

namespace {

void flatten_into(const Json& j, const std::string& path, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten_into(v, path.empty() ? k : path + "/" + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten_into(j[i], path + "/" + std::to_string(i), out);
  } else if (j.is_string()) {
    out.emplace_back(path, j.get<std::string>());
  } else {
    out.emplace_back(path, j.dump());
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> flatten(const Json& j) {
  std::vector<std::pair<std::string, std::string>> out;
  flatten_into(j, "", out);
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_csv(const Json& document) {
  std::ostringstream os;
  os << "path,value\n";
  for (const auto& [path, value] : flatten(document)) os << csv_field(path) << ',' << csv_field(value) << '\n';
  return os.str();
}

std::string render_csv(std::span<const AuditReport> reports) {
  std::ostringstream os;
  os << "theorem,check,verdict,path,value\n";
  for (const auto& r : reports) {
    for (const auto& c : r.checks) {
      const auto rows = flatten(c.measured);
      if (rows.empty()) {
        os << r.theorem << ',' << csv_field(c.id) << ',' << to_string(c.verdict) << ",,\n";
      }
      for (const auto& [path, value] : rows) {
        os << r.theorem << ',' << csv_field(c.id) << ',' << to_string(c.verdict) << ',' << csv_field(path) << ','
           << csv_field(value) << '\n';
      }
    }
  }
  return os.str();
}

std::string render_table(std::span<const AuditReport> reports) {
  std::ostringstream os;
  for (const auto& r : reports) {
    os << r.theorem << "  " << r.title << "  [" << to_string(r.overall()) << "]\n";
    std::size_t width = 0;
    for (const auto& c : r.checks) width = std::max(width, c.id.size());
    for (const auto& c : r.checks) {
      std::string v = to_string(c.verdict);
      v.resize(13, ' ');
      std::string id = c.id;
      id.resize(width, ' ');
      os << "  " << v << id << "  " << c.relation << '\n';
    }
    for (const auto& [k, v] : r.constants.items()) {
      os << "  const " << k << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace rhoq
