#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stmtc {

enum class Role : std::uint8_t { Keyword, Identifier, Literal, Separator, Operator };

enum class LiteralKind : std::uint8_t { Int, Long, Float, Double, Char, String, Boolean, Null };

/// Half-open byte range [start, end) into the source text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

struct CodeToken {
  std::string lexeme;
  Role role = Role::Identifier;
  Span span;
  std::optional<LiteralKind> literal_kind;  // set iff role == Literal

  bool operator==(const CodeToken&) const = default;
};

enum class LexErrorKind : std::uint8_t { UnterminatedString, UnterminatedComment, IllegalCharacter };

struct LexError {
  LexErrorKind kind;
  Span span;
};

struct TokenStream {
  std::vector<CodeToken> tokens;
  std::string source_id;
  std::vector<LexError> errors;
};

/// Tokenizes source in the Java-like subset. Never throws; malformed input
/// is reported in TokenStream::errors and lexing resumes after the bad span.
///
/// `true`, `false` and `null` are reserved words but come out as Literal
/// tokens (Boolean / Null) so literal typing stays in one place.
TokenStream tokenize(std::string_view source, std::string source_id = {});

/// Splits an identifier at lower->upper case changes, letter/digit changes
/// and underscores; pieces are lowercased and never empty.
/// "m_strName2" -> {"m", "str", "name", "2"}
std::vector<std::string> split_subtokens(std::string_view identifier);

bool is_keyword(std::string_view word);
bool is_primitive_type_keyword(std::string_view word);  // int, long, ..., boolean
const char* to_string(Role role);
const char* to_string(LiteralKind kind);
const char* to_string(LexErrorKind kind);

}  // namespace stmtc
