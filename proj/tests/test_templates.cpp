#include <doctest.h>

#include <algorithm>
#include <limits>
#include <set>

#include "stmtc/complete.hpp"
#include "stmtc/templates.hpp"
#include "support.hpp"

using namespace stmtc;
using namespace stmtc::fixture;

namespace {

struct Setup {
  Project project = walker_project();
  Models models;
  ScopeEnv env;

  Setup() {
    std::vector<const TypedProgram*> all;
    for (const TypedProgram& t : project.typed) all.push_back(&t);
    models = Models::train(all, 6);
    const TypedProgram& w = project.typed[1];
    env = accessible_env(w, token_at(w, "int", 1));
  }

  std::set<std::string> next(const ExcodeSequence& E, bool syntax_only = false) const {
    const auto idx = syntax_only ? syntax_candidates(E, models.vocab)
                                 : valid_next(E, env, *project.index, models.vocab);
    std::set<std::string> out;
    for (std::size_t i : idx) out.insert(models.vocab.rendering(i));
    return out;
  }

  std::vector<Template> templates(const ExcodeSequence& E, int K, int max_len = 12) const {
    ExpansionConfig cfg;
    cfg.K = K;
    cfg.max_len = max_len;
    return identify_templates(E, {}, env, *project.index, models.excode, models.vocab, cfg);
  }
};

std::set<std::string> rendered(const std::vector<Template>& ts) {
  std::set<std::string> out;
  for (const Template& t : ts) out.insert(render(t.tokens));
  return out;
}

bool has_kind(const std::set<std::string>& s, std::string_view prefix) {
  return std::any_of(s.begin(), s.end(), [&](const std::string& r) { return r.rfind(prefix, 0) == 0; });
}

}  // namespace

TEST_CASE("after an assignment sign") {
  const Setup s;
  const auto next = s.next(X("TYPE(int) VAR(int) OP(ASSIGN)"), true);
  CHECK_FALSE(next.contains("OP(ASSIGN)"));
  CHECK_FALSE(next.contains("OP(ACC)"));
  CHECK_FALSE(next.contains("SEMI"));
  for (const char* k : {"LIT(", "VAR(", "CALL(", "FIELD(", "LP"}) {
    CAPTURE(std::string(k));
    CHECK(has_kind(next, k));
  }
  // the subset has no casts, so a type cannot start an operand
  CHECK_FALSE(has_kind(next, "TYPE("));
  CHECK(next.contains("OP(not)"));
  CHECK(next.contains("OP(minus)"));
}

TEST_CASE("a call is followed by its parenthesis") {
  const Setup s;
  CHECK(s.next(X("VAR(NodeList) OP(ACC) CALL(NodeList,getLength,0,int)"), true) == std::set<std::string>{"LP"});
}

TEST_CASE("syntax candidates agree with a full parse of every one-token extension") {
  const Setup s;
  for (const char* ctx : {"", "TYPE(int)", "VAR(int) OP(ASSIGN)", "IF LP VAR(boolean)", "RETURN", "FOR LP SEMI",
                          "NEW", "LP VAR(int) OP(plus)", "VAR(Node) OP(ACC) CALL(Node,appendChild,1,void) LP"}) {
    CAPTURE(ctx);
    const ExcodeSequence E = X(ctx);
    std::set<std::string> brute;
    for (std::size_t i = 0; i < s.models.vocab.size(); ++i) {
      ExcodeSequence probe = E;
      probe.push_back(s.models.vocab.tokens()[i]);
      if (parse_excode(probe).status != XParse::Status::Invalid) brute.insert(s.models.vocab.rendering(i));
    }
    CHECK(s.next(E, true) == brute);
  }
}

TEST_CASE("locals are accessible") {
  const Setup s;
  for (const char* v : {"VAR(Node)", "VAR(NodeFilter)", "VAR(NodeListImpl)", "VAR(NodeList)"}) {
    CAPTURE(std::string(v));
    CHECK(accessible_next({}, X(v)[0], s.env, *s.project.index));
  }
  CHECK_FALSE(accessible_next({}, X("VAR(String)")[0], s.env, *s.project.index));
  CHECK(s.next({}).contains("VAR(NodeList)"));
}

TEST_CASE("after a receiver only its members") {
  const Setup s;
  const auto next = s.next(X("VAR(NodeList) OP(ACC)"));
  CHECK(next.contains("CALL(NodeList,getLength,0,int)"));
  CHECK(accessible_next(X("VAR(NodeList) OP(ACC)"), X("CALL(NodeList,item,1,Node)")[0], s.env, *s.project.index));
  CHECK(next.contains("FIELD(NodeList,length,int)"));
  CHECK_FALSE(next.contains("CALL(Node,getChildNodes,0,NodeList)"));
  CHECK_FALSE(has_kind(next, "VAR("));
  // inherited members through the subclass
  CHECK(s.next(X("VAR(NodeListImpl) OP(ACC)")).contains("CALL(NodeList,getLength,0,int)"));
}

TEST_CASE("own methods without a receiver") {
  Project p = project({{"a.aj", "class C {\n  int m() { return 0; }\n}\n"}});
  std::vector<const TypedProgram*> all{&p.typed[0]};
  const Models m = Models::train(all, 3);
  const TypedProgram& t = p.typed[0];
  const ScopeEnv env = accessible_env(t, token_at(t, "return"));
  CHECK(env.variables.empty());
  CHECK(accessible_next({}, X("CALL(C,m,0,int)")[0], env, *p.index));
  CHECK_FALSE(accessible_next({}, X("CALL(D,m,0,int)")[0], env, *p.index));
}

TEST_CASE("declaration name must match the type") {
  const Setup s;
  const auto next = s.next(X("TYPE(int)"));
  CHECK(next.contains("VAR(int)"));
  CHECK_FALSE(next.contains("VAR(NodeList)"));
  CHECK_FALSE(next.contains("TYPE(int)"));
}

TEST_CASE("rules combined at the motivating position") {
  const Setup s;
  const auto next = s.next(X("TYPE(int) VAR(int) OP(ASSIGN)"));
  CHECK(next.contains("VAR(NodeList)"));
  CHECK_FALSE(next.contains("OP(ASSIGN)"));
  for (const std::string& r : next) CHECK(s.next(X("TYPE(int) VAR(int) OP(ASSIGN)"), true).contains(r));
}

TEST_CASE("statement start offers leading tokens only") {
  const Setup s;
  const auto next = s.next({});
  for (const char* k : {"IF", "WHILE", "FOR", "RETURN", "NEW", "THIS", "LP", "OP(inc)"}) {
    CAPTURE(std::string(k));
    CHECK(next.contains(k));
  }
  for (const char* k : {"SEMI", "RP", "OP(ASSIGN)", "OP(ACC)", "COMMA", "OP(times)", "OP(and)"}) {
    CAPTURE(std::string(k));
    CHECK_FALSE(next.contains(k));
  }
}

TEST_CASE("open parenthesis blocks the semicolon") {
  const Setup s;
  CHECK_FALSE(s.next(X("VAR(int) OP(ASSIGN) LP VAR(int)")).contains("SEMI"));
  CHECK(s.next(X("VAR(int) OP(ASSIGN) LP VAR(int)")).contains("RP"));
}

TEST_CASE("finished statement gives one empty template") {
  const Setup s;
  const auto ts = s.templates(X("VAR(int) OP(ASSIGN) ZERO SEMI"), 5);
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].tokens.empty());
  CHECK(ts[0].ended);
}

TEST_CASE("the motivating template is found") {
  const Setup s;
  const auto ts = rendered(s.templates(X("TYPE(int) VAR(int) OP(ASSIGN)"), 5));
  CHECK(ts.contains("VAR(NodeList) OP(ACC) CALL(NodeList,getLength,0,int) LP RP SEMI"));
}

TEST_CASE("an argument that is itself a call") {
  Project p = project({{"lib.aj",
                        "class ColumnFamilyStore {\n  String name;\n  String getColumnFamilyName() { return name; }\n}\n"
                        "class Names {\n  void add(String s) { }\n}\n"},
                       {"flush.aj",
                        "class Flush {\n  void run(ColumnFamilyStore cfs, Names cfnames) {\n"
                        "    cfnames.add(cfs.getColumnFamilyName());\n    cfnames.add(cfs.getColumnFamilyName());\n"
                        "  }\n  void again(ColumnFamilyStore cfs, Names cfnames) {\n"
                        "    cfnames.add(cfs.getColumnFamilyName());\n  }\n}\n"}});
  std::vector<const TypedProgram*> all;
  for (const TypedProgram& t : p.typed) all.push_back(&t);
  const Models m = Models::train(all, 6);
  const TypedProgram& t = p.typed[1];
  const ScopeEnv env = accessible_env(t, token_at(t, "cfnames", 2));
  ExpansionConfig cfg;
  const auto ts = rendered(identify_templates(X("VAR(Names) OP(ACC) CALL(Names,add,1,void) LP"), {}, env, *p.index,
                                              m.excode, m.vocab, cfg));
  CHECK(ts.contains("VAR(ColumnFamilyStore) OP(ACC) CALL(ColumnFamilyStore,getColumnFamilyName,0,String) LP RP RP SEMI"));
}

TEST_CASE("templates parse and stop at the end or at the limit") {
  const Setup s;
  for (const char* ctx : {"", "TYPE(int) VAR(int) OP(ASSIGN)", "IF LP", "VAR(NodeList) OP(ACC)"}) {
    CAPTURE(ctx);
    const ExcodeSequence E = X(ctx);
    for (const Template& t : s.templates(E, 5, 8)) {
      ExcodeSequence full = E;
      full.insert(full.end(), t.tokens.begin(), t.tokens.end());
      const XParse p = parse_excode(full);
      CHECK(p.status != XParse::Status::Invalid);
      CHECK(t.ended == (p.status == XParse::Status::Complete));
      if (!t.ended) CHECK(full.size() == 8);
    }
  }
}

TEST_CASE("a larger beam keeps every template of a smaller one") {
  const Setup s;
  for (const char* ctx : {"", "TYPE(int) VAR(int) OP(ASSIGN)", "VAR(Node) OP(ACC)"}) {
    CAPTURE(ctx);
    std::set<std::string> prev;
    for (int K = 1; K <= 6; ++K) {
      const auto now = rendered(s.templates(X(ctx), K, 8));
      CHECK(std::includes(now.begin(), now.end(), prev.begin(), prev.end()));
      prev = now;
    }
  }
}

TEST_CASE("expansion is deterministic and ordered by score") {
  const Setup s;
  const auto a = s.templates(X("TYPE(int) VAR(int) OP(ASSIGN)"), 4);
  const auto b = s.templates(X("TYPE(int) VAR(int) OP(ASSIGN)"), 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(render(a[i].tokens) == render(b[i].tokens));
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].log_score >= a[i].log_score);
}

TEST_CASE("nothing valid at the root") {
  const Setup s;
  CHECK(error_code([&] { s.templates(X("VAR(String) OP(ACC)"), 5); }) == ErrorCode::NoCandidates);
  CHECK(error_code([&] { s.templates({}, 0); }) == ErrorCode::BadRequest);
}
