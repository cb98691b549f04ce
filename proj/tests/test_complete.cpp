#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "stmtc/complete.hpp"
#include "support.hpp"

using namespace stmtc;
using namespace stmtc::fixture;

namespace {

struct Setup {
  Project project;
  Models models;

  explicit Setup(Project p) : project(std::move(p)) {
    std::vector<const TypedProgram*> all;
    for (const TypedProgram& t : project.typed) all.push_back(&t);
    models = Models::train(all, 6);
  }
  Setup() : Setup(walker_project()) {}

  SuggestionList at(std::size_t file, std::size_t cursor, int K = 5) const {
    ExpansionConfig cfg;
    cfg.K = K;
    return complete_at(project.typed[file], cursor, models, cfg);
  }
};

std::vector<std::string> top(const SuggestionList& list, std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < list.size() && i < k; ++i) out.push_back(list[i].text());
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST_CASE("lexical keys") {
  const TokenStream s = tokenize("int childCount = 7; String s = \"\"; x = getNodeName(0);", "k.aj");
  const auto keys = lexical_keys(s.tokens, {0, s.tokens.size() - 1});
  CHECK(keys == std::vector<std::string>{"int", "<newvar>", "=", "<lit:int>", ";", "String", "<newvar>", "=",
                                         "\"\"", ";", "x", "=", "get", "node", "name", "(", "0", ")", ";"});
  CHECK(lexical_keys(CodeSequence{ConcreteToken::lit("int"), ConcreteToken::newvar(), ConcreteToken::lexeme("nodeList")}) ==
        std::vector<std::string>{"<lit:int>", "<newvar>", "node", "list"});
}

TEST_CASE("motivating completion") {
  const Setup s;
  const TypedProgram& t = s.project.typed[1];
  const auto list = s.at(1, token_at(t, "children", 1));
  CHECK(contains(top(list, 5), "children . getLength ( ) ;"));
}

TEST_CASE("before the closing semicolon") {
  const Setup s;
  const TypedProgram& t = s.project.typed[1];
  const std::size_t semi = token_at(t, ")", 2) + 1;
  REQUIRE(t.program.stream.tokens[semi].lexeme == ";");
  const auto list = s.at(1, semi);
  REQUIRE_FALSE(list.empty());
  CHECK(list[0].text() == ";");
}

TEST_CASE("declared names become placeholders") {
  const Setup s;
  const TypedProgram& t = s.project.typed[1];
  const auto list = s.at(1, token_at(t, "len"));
  REQUIRE_FALSE(list.empty());
  for (const Candidate& c : list) CHECK(c.tokens.front().kind == ConcreteToken::Kind::NewVar);
}

TEST_CASE("candidates are concretizations of type-correct templates") {
  const Setup s;
  const TypedProgram& t = s.project.typed[1];
  const std::size_t cursor = token_at(t, "children", 1);
  const ScopeEnv env = accessible_env(t, cursor);
  const std::size_t start = token_at(t, "int", 1);
  const ExcodeSequence context = annotate(t, {start, cursor - 1});
  const TypeContext ctx{s.project.index.get(), env.enclosing_method_return, env.enclosing_class};
  for (const Candidate& c : s.at(1, cursor)) {
    CAPTURE(c.text());
    CHECK(check_template(context, c.source.tokens, ctx));
    const auto all = texts(concretize_sequence(c.source.tokens, env, *s.project.index, &context.back()));
    CHECK(std::find(all.begin(), all.end(), c.text()) != all.end());
  }
}

TEST_CASE("every product of a two-variable template is a candidate") {
  Setup s(project({{"a.aj", "class A {\n  void m(int a, int b) {\n    a = b;\n    b = a;\n    a = a;\n  }\n}\n"}}));
  const TypedProgram& t = s.project.typed[0];
  const auto list = s.at(0, token_at(t, "a", 2), 10);
  const auto got = top(list, list.size());
  for (const char* want : {"a = b ;", "b = a ;", "a = a ;", "b = b ;"}) {
    CAPTURE(std::string(want));
    CHECK(contains(got, want));
  }
}

TEST_CASE("ranking merges duplicates and orders by score") {
  const Setup s;
  const auto c = [](std::vector<const char*> toks) {
    Candidate x;
    for (const char* t : toks) x.tokens.push_back(ConcreteToken::lexeme(t));
    return x;
  };
  const std::vector<std::string> ctx = {"int", "<newvar>", "="};
  const SuggestionList r =
      rank({c({"0", ";"}), c({"children", ".", "getLength", "(", ")", ";"}), c({"0", ";"})}, ctx, s.models.lexical);
  REQUIRE(r.size() == 2);
  CHECK(r[0].log_score >= r[1].log_score);
  std::set<std::string> texts_seen;
  for (const Candidate& x : r) CHECK(texts_seen.insert(x.text()).second);
  const SuggestionList one = rank({c({"0", ";"})}, ctx, s.models.lexical);
  REQUIRE(one.size() == 1);
  CHECK(format_suggestions(one, 5).rfind("1\t", 0) == 0);
}

TEST_CASE("lexical ranking prefers names that go together") {
  Setup s(project({{"lib.aj",
                    "class ReportList {\n  void addAll(ReportList other) { }\n}\n"},
                   {"run.aj",
                    "class Runner {\n  ReportList getReportExecutions() { return null; }\n"
                    "  void a(ReportList reports) {\n    reports.addAll(getReportExecutions());\n  }\n"
                    "  void b(ReportList reports) {\n    reports.addAll(getReportExecutions());\n  }\n"
                    "  void c(ReportList reports) {\n    reports.addAll(null);\n  }\n}\n"}}));
  const TypedProgram& t = s.project.typed[1];
  const std::size_t cursor = token_at(t, "getReportExecutions", 1);
  const auto list = s.at(1, cursor);
  const auto texts_top = top(list, list.size());
  const auto a = std::find(texts_top.begin(), texts_top.end(), "getReportExecutions ( ) ) ;");
  const auto b = std::find(texts_top.begin(), texts_top.end(), "null ) ;");
  REQUIRE(a != texts_top.end());
  REQUIRE(b != texts_top.end());
  CHECK(a < b);
}

TEST_CASE("completion from source text") {
  const Setup s;
  std::string src(kWalker);
  const std::size_t offset = src.find("children.getLength") ;
  src = src.substr(0, offset);  // the user stopped typing here
  const auto list = complete_source(src, offset, s.project.index, s.models, ExpansionConfig{});
  CHECK(contains(top(list, 5), "children . getLength ( ) ;"));
}

TEST_CASE("a token cut by the cursor counts as untyped") {
  const Setup s;
  std::string src(kWalker);
  const std::size_t offset = src.find("children.getLength") + 4;  // inside "children"
  const auto list = complete_source(src, offset, s.project.index, s.models, ExpansionConfig{});
  CHECK(contains(top(list, 5), "children . getLength ( ) ;"));
}

TEST_CASE("deterministic output") {
  const Setup s;
  const TypedProgram& t = s.project.typed[1];
  const auto a = format_suggestions(s.at(1, token_at(t, "children", 1)), 100);
  const auto b = format_suggestions(s.at(1, token_at(t, "children", 1)), 100);
  CHECK(a == b);
}

TEST_CASE("cursor outside a method") {
  const Setup s;
  CHECK(error_code([&] { s.at(1, 0); }) == ErrorCode::CursorOutsideMethod);
  CHECK(error_code([&] { complete_source(std::string(kWalker), 3, s.project.index, s.models, ExpansionConfig{}); }) ==
        ErrorCode::CursorOutsideMethod);
}

TEST_CASE("models survive a save and load") {
  const Setup s;
  const std::string dir = (std::filesystem::temp_directory_path() / "stmtc_models_test").string();
  s.models.save(dir);
  const Models l = Models::load(dir);
  CHECK(l.excode == s.models.excode);
  CHECK(l.lexical == s.models.lexical);
  CHECK(l.vocab.size() == s.models.vocab.size());
  std::filesystem::remove_all(dir);
  CHECK(error_code([&] { Models::load(dir); }) == ErrorCode::IoError);
}
