#include <doctest.h>

#include "stmtc/lexer.hpp"

using namespace stmtc;

TEST_CASE("keyword if") {
  const TokenStream s = tokenize("if");
  REQUIRE(s.tokens.size() == 1);
  CHECK(s.tokens[0].role == Role::Keyword);
  CHECK(s.tokens[0].lexeme == "if");
}

TEST_CASE("empty source") {
  const TokenStream s = tokenize("");
  CHECK(s.tokens.empty());
  CHECK(s.errors.empty());
}

TEST_CASE("declaration with literal") {
  const TokenStream s = tokenize("int len = 0;");
  REQUIRE(s.tokens.size() == 5);
  CHECK(s.tokens[0].role == Role::Keyword);
  CHECK(s.tokens[1].role == Role::Identifier);
  CHECK(s.tokens[1].lexeme == "len");
  CHECK(s.tokens[2].role == Role::Operator);
  CHECK(s.tokens[3].role == Role::Literal);
  CHECK(s.tokens[3].literal_kind == LiteralKind::Int);
  CHECK(s.tokens[4].role == Role::Separator);
  CHECK(s.tokens[4].lexeme == ";");
}

TEST_CASE("literal kinds") {
  const TokenStream s = tokenize("1 2L 1.5 1.5f 'c' \"s\" true null");
  REQUIRE(s.tokens.size() == 8);
  const LiteralKind want[] = {LiteralKind::Int,  LiteralKind::Long,   LiteralKind::Double,  LiteralKind::Float,
                              LiteralKind::Char, LiteralKind::String, LiteralKind::Boolean, LiteralKind::Null};
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(s.tokens[i].role == Role::Literal);
    CHECK(s.tokens[i].literal_kind == want[i]);
  }
}

TEST_CASE("spans reproduce the source") {
  const std::string src = "class A { // note\n  void m() { x = a.b(1, \"q\"); /* c */ } }";
  const TokenStream s = tokenize(src);
  CHECK(s.errors.empty());
  for (const CodeToken& t : s.tokens) {
    CHECK(t.span.start < t.span.end);
    CHECK(src.substr(t.span.start, t.span.end - t.span.start) == t.lexeme);
    CHECK(t.literal_kind.has_value() == (t.role == Role::Literal));
  }
}

TEST_CASE("operators take the longest match") {
  const TokenStream s = tokenize("a<=b&&c!=d++");
  std::vector<std::string> lex;
  for (const CodeToken& t : s.tokens) lex.push_back(t.lexeme);
  CHECK(lex == std::vector<std::string>{"a", "<=", "b", "&&", "c", "!=", "d", "++"});
}

TEST_CASE("malformed input is reported and lexing resumes") {
  const TokenStream s = tokenize("a # b \"open");
  REQUIRE(s.errors.size() == 2);
  CHECK(s.errors[0].kind == LexErrorKind::IllegalCharacter);
  CHECK(s.errors[1].kind == LexErrorKind::UnterminatedString);
  REQUIRE(s.tokens.size() >= 2);
  CHECK(s.tokens[0].lexeme == "a");
  CHECK(s.tokens[1].lexeme == "b");
}

TEST_CASE("unterminated comment") {
  const TokenStream s = tokenize("x /* never closed");
  REQUIRE(s.errors.size() == 1);
  CHECK(s.errors[0].kind == LexErrorKind::UnterminatedComment);
}

TEST_CASE("subtokens") {
  using V = std::vector<std::string>;
  CHECK(split_subtokens("getReportExecutions") == V{"get", "report", "executions"});
  CHECK(split_subtokens("x") == V{"x"});
  CHECK(split_subtokens("m_strName2") == V{"m", "str", "name", "2"});
  CHECK(split_subtokens("strName") == V{"str", "name"});
  CHECK(split_subtokens("childList") == V{"child", "list"});
}

TEST_CASE("subtokens are idempotent on their pieces") {
  for (const char* id : {"getReportExecutions", "m_strName2", "HTTPServer", "a1b2"}) {
    for (const std::string& piece : split_subtokens(id)) {
      CHECK(split_subtokens(piece) == std::vector<std::string>{piece});
    }
  }
}

TEST_CASE("keyword set") {
  CHECK(is_keyword("while"));
  CHECK(is_keyword("return"));
  CHECK_FALSE(is_keyword("len"));
  CHECK(is_primitive_type_keyword("boolean"));
  CHECK_FALSE(is_primitive_type_keyword("String"));
}
