#include <doctest.h>

#include <map>

#include "stmtc/typecheck.hpp"
#include "support.hpp"
#include "typecheck_cases.hpp"

using namespace stmtc;
using namespace stmtc::fixture;

TEST_CASE("every rule has two accepts and two rejects that behave as listed") {
  const Project p = rule_project();
  std::map<int, std::pair<int, int>> seen;
  for (const RuleCase& c : rule_cases()) {
    CAPTURE(c.seq);
    CHECK(run_rule_case(c, p) == "");
    (c.accept ? seen[c.rule].first : seen[c.rule].second)++;
  }
  for (int rule = 1; rule <= 14; ++rule) {
    CAPTURE(rule);
    CHECK(seen[rule].first >= 2);
    CHECK(seen[rule].second >= 2);
  }
}

TEST_CASE("literal and variable typing") {
  const Project p = rule_project();
  const TypeContext ctx = rule_context(p, "int");
  CHECK(infer_type(X("LIT(String)"), ctx).type.render() == "String");
  CHECK(infer_type(X("VAR(Unk)"), ctx).type.is_unknown());
  CHECK(infer_type(X("OP(not) VAR(Unk)"), ctx).type.render() == "boolean");
}

TEST_CASE("narrowing assignment reports rule 3 with the diagnostic format") {
  const Project p = rule_project();
  const TypeResult r = infer_type(X("VAR(int) OP(ASSIGN) LIT(double)"), rule_context(p, "int"));
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->rule == 3);
  CHECK(r.error->message() == "RULE3: expected int, found double at excode index 2");
}

TEST_CASE("unparseable sequences report rule 0") {
  const Project p = rule_project();
  const TypeResult r = infer_type(X("OP(ASSIGN) SEMI SEMI"), rule_context(p, "int"));
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->rule == 0);
}

TEST_CASE("parse status") {
  CHECK(parse_excode(X("TYPE(int) VAR(int) OP(ASSIGN)")).status == XParse::Status::Viable);
  CHECK(parse_excode(X("TYPE(int) VAR(int) OP(ASSIGN) ZERO SEMI")).status == XParse::Status::Complete);
  CHECK(parse_excode(X("IF LP VAR(boolean) RP")).status == XParse::Status::Complete);
  CHECK(parse_excode(X("TYPE(int) SEMI")).status == XParse::Status::Invalid);
  CHECK(parse_excode(X("ZERO OP(inc)")).status == XParse::Status::Invalid);
  CHECK(parse_excode(X("VAR(int) SEMI ZERO")).status == XParse::Status::Invalid);
  const XParse acc = parse_excode(X("VAR(NodeList) OP(ACC)"));
  CHECK(acc.status == XParse::Status::Viable);
  CHECK(acc.member_receiver.has_value());
  const XParse decl = parse_excode(X("TYPE(int)"));
  REQUIRE(decl.decl_type.has_value());
  CHECK(decl.decl_type->render() == "int");
}

TEST_CASE("templates for the motivating context") {
  const Project p = rule_project();
  const TypeContext ctx = rule_context(p, "void");
  const ExcodeSequence context = X("TYPE(int) VAR(int) OP(ASSIGN)");
  CHECK(check_template(context, X("ZERO SEMI"), ctx));
  CHECK(check_template(context, X("VAR(NodeList) OP(ACC) CALL(NodeList,getLength,0,int) LP RP SEMI"), ctx));
  TypeError e;
  CHECK_FALSE(check_template(context, X("VAR(NodeList) SEMI"), ctx, &e));
  CHECK(e.rule == 11);
  CHECK(check_template(X("VAR(int) OP(ASSIGN) ZERO SEMI"), {}, ctx));
}

TEST_CASE("an assignment context rejects an incompatible right side") {
  const Project p = rule_project();
  const TypeContext ctx = rule_context(p, "void");
  TypeError e;
  CHECK_FALSE(check_template(X("VAR(int) OP(ASSIGN)"), X("VAR(NodeList) SEMI"), ctx, &e));
  CHECK(e.rule == 3);
}

TEST_CASE("templates cut at the length limit are checked as prefixes") {
  const Project p = rule_project();
  const TypeContext ctx = rule_context(p, "void");
  CHECK(check_template(X("TYPE(int) VAR(int) OP(ASSIGN)"), X("VAR(int) OP(plus)"), ctx));
  CHECK_FALSE(check_template(X("TYPE(int) VAR(int) OP(ASSIGN)"), X("VAR(boolean) OP(plus)"), ctx));
}

TEST_CASE("Unknown never turns an accept into a reject") {
  const Project p = rule_project();
  const MutationStats s = unknown_monotonicity(p, 200, 11);
  CHECK(s.tried == 200);
  for (const std::string& ex : s.examples) MESSAGE(ex);
  CHECK(s.flips == 0);
}

TEST_CASE("inference is deterministic") {
  const Project p = rule_project();
  for (const RuleCase& c : rule_cases()) {
    const TypeResult a = infer_type(X(c.seq), rule_context(p, c.ret));
    const TypeResult b = infer_type(X(c.seq), rule_context(p, c.ret));
    CHECK(a.ok() == b.ok());
    CHECK(a.type == b.type);
  }
}
