// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "rhoq/audit.hpp"

using namespace rhoq;

namespace {

// Small enough to run every audit in well under a second.
AuditConfig small_config() {
  AuditConfig c;
  c.precision = 8;
  c.levels = {1, 3};
  c.inner_levels = 4;
  c.mahler_order = 10;
  return c;
}

}  // namespace

TEST(Audit, ParameterSpecs) {
  const PadicNumber rho = parse_parameter("2", 5, 10);
  EXPECT_EQ(rho, PadicNumber::from_integer(11, 5, 10));
  EXPECT_EQ(parse_parameter("-1", 5, 10), PadicNumber::from_integer(-4, 5, 10));
  EXPECT_EQ(parse_parameter("0", 5, 10), PadicNumber::from_integer(1, 5, 10));
  EXPECT_EQ(parse_parameter(rho.to_string(), 5, 10), rho);
  EXPECT_EQ(parse_parameter(rho.to_string(), 5, 6).abs_precision(), 6);
  EXPECT_THROW(parse_parameter("O(5^4): 2 + 1*5", 5, 10), DomainError);
  EXPECT_THROW(parse_parameter("O(7^2): 1 + 1*7", 5, 10), PrimeMismatch);
  EXPECT_THROW(parse_parameter("one", 5, 10), DomainError);
}

TEST(Audit, FunctionSpecs) {
  const auto params = RhoQParams::from_offsets(5, 1, 2, 12);
  EXPECT_EQ(parse_function("x^3", params)->kind(), FunctionKind::kPolynomialX);
  EXPECT_EQ(parse_function("x", params)->kind(), FunctionKind::kPolynomialX);
  EXPECT_EQ(parse_function("[x]^2", params)->kind(), FunctionKind::kPolynomialRhoQ);
  EXPECT_EQ(parse_function("[x]", params)->kind(), FunctionKind::kPolynomialRhoQ);
  EXPECT_EQ(parse_function("ratio", params)->kind(), FunctionKind::kExponential);
  EXPECT_EQ(parse_function("carlitz:2:1", params)->kind(), FunctionKind::kCarlitz);
  EXPECT_EQ(parse_function("-3", params)->kind(), FunctionKind::kConstant);
  EXPECT_EQ(parse_function("7", params)->value_at(4), PadicNumber::from_integer(7, 5, 12));
  EXPECT_THROW(parse_function("sin", params), DomainError);
  EXPECT_THROW(parse_function("carlitz:2", params), DomainError);
}

TEST(Audit, ConfigValidation) {
  AuditConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.tolerance_digits(), 8);
  EXPECT_EQ(c.working_digits(), 22);
  auto bad = [](auto change) {
    AuditConfig x;
    change(x);
    return x;
  };
  EXPECT_THROW(bad([](AuditConfig& x) { x.p = 4; }).validate(), DomainError);
  EXPECT_THROW(bad([](AuditConfig& x) { x.p = 2; }).validate(), DomainError);
  EXPECT_THROW(bad([](AuditConfig& x) { x.precision = 40; }).validate(), DomainError);
  EXPECT_THROW(bad([](AuditConfig& x) { x.tolerance = 0; }).validate(), DomainError);
  EXPECT_THROW(bad([](AuditConfig& x) { x.levels = {3, 2}; }).validate(), DomainError);
  EXPECT_THROW(bad([](AuditConfig& x) { x.levels = {1, 11}; }).validate(), DomainError);
  EXPECT_THROW(bad([](AuditConfig& x) { x.rho = "5"; x.q = "O(5^3): 2"; }).validate(), DomainError);
}

TEST(Audit, ZeroFamilyPassesWithZeroConstants) {
  AuditConfig c = small_config();
  c.zero_family = true;
  const std::vector<std::string> all = {"all"};
  const auto reports = run_audits(c, all);
  ASSERT_EQ(reports.size(), 4u);
  for (const auto& r : reports) {
    EXPECT_EQ(r.overall(), Verdict::kPass) << r.theorem;
    for (const auto& [name, value] : r.constants.items()) EXPECT_EQ(value, "0") << r.theorem << " " << name;
  }
  EXPECT_EQ(exit_code(reports), 0);
}

TEST(Audit, DeformedSmallConfigPasses) {
  const AuditConfig c = small_config();
  const std::vector<std::string> selectors = {"thm31", "thm32"};
  const auto reports = run_audits(c, selectors);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].theorem, "thm31");
  for (const auto& r : reports) EXPECT_NE(r.overall(), Verdict::kFail) << r.theorem;
}

TEST(Audit, DocumentsAreDeterministic) {
  const AuditConfig c = small_config();
  const std::vector<std::string> selectors = {"thm31", "thm34"};
  const std::string a = audit_document(c, run_audits(c, selectors)).dump(2);
  const std::string b = audit_document(c, run_audits(c, selectors)).dump(2);
  EXPECT_EQ(a, b);
  const Json doc = Json::parse(a);
  EXPECT_EQ(doc["schema"], kReportSchema);
  EXPECT_EQ(doc["kind"], "audit");
  EXPECT_EQ(doc["reports"].size(), 2u);
  EXPECT_TRUE(doc["config"].contains("seed"));
  const std::vector<std::string> unknown = {"thm99"};
  EXPECT_THROW(run_audits(c, unknown), DomainError);
}

TEST(Audit, ExitCodes) {
  auto report = [](Verdict v) {
    AuditReport r;
    r.theorem = "t";
    r.add("c", "relation", v);
    return r;
  };
  const std::vector<AuditReport> pass = {report(Verdict::kPass), report(Verdict::kMeasured)};
  const std::vector<AuditReport> stall = {report(Verdict::kPass), report(Verdict::kInconclusive)};
  const std::vector<AuditReport> fail = {report(Verdict::kInconclusive), report(Verdict::kFail)};
  EXPECT_EQ(exit_code(pass), 0);
  EXPECT_EQ(exit_code(stall), 2);
  EXPECT_EQ(exit_code(fail), 1);
  EXPECT_EQ(report(Verdict::kMeasured).overall(), Verdict::kMeasured);
  EXPECT_EQ(to_string(Verdict::kInconclusive), "INCONCLUSIVE");
}

TEST(Audit, Renderings) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(to_json(PadicNumber::from_integer(6, 5, 3)), "O(5^3): 1 + 1*5 + 0*5^2");
  EXPECT_EQ(to_json(Norm::power(5, -2)), "5^-2");

  Json doc;
  doc["a"] = 1;
  doc["b"] = Json::array({"x", nullptr});
  const auto rows = flatten(doc);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (std::pair<std::string, std::string>{"a", "1"}));
  EXPECT_EQ(rows[1].first, "b/0");
  EXPECT_EQ(rows[2].second, "null");
  EXPECT_EQ(render_csv(doc).substr(0, 11), "path,value\n");

  AuditReport r;
  r.theorem = "thm31";
  r.title = "title";
  r.add("check/one", "a relation, with a comma", Verdict::kPass, Json{{"value", "1"}});
  const std::vector<AuditReport> reports = {r};
  const std::string csv = render_csv(reports);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "theorem,check,verdict,path,value");
  EXPECT_NE(csv.find("thm31,check/one,PASS,value,1"), std::string::npos);
  const std::string table = render_table(reports);
  EXPECT_NE(table.find("thm31"), std::string::npos);
  EXPECT_NE(table.find("PASS"), std::string::npos);
}
