#include "stmtc/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace stmtc {

namespace {

constexpr std::array<std::string_view, 20> kKeywords = {
    "class", "int",    "long", "short", "char", "boolean", "float", "double", "String", "void",
    "if",    "else",   "while", "for",  "return", "new",   "null",  "true",   "false",  "this"};

constexpr std::array<std::string_view, 7> kPrimitives = {"int",   "long",   "short",  "char",
                                                         "boolean", "float", "double"};

// Longest match first.
constexpr std::array<std::string_view, 18> kOperators = {
    "==", "!=", "<=", ">=", "&&", "||", "++", "--", "=", "<", ">", "+", "-", "*", "/", "%", "!", "."};

constexpr std::string_view kSeparators = "(){}[];,";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_part(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  void run(TokenStream& out) {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '/' && peek(1) == '*') {
        block_comment(out);
      } else if (ident_start(c)) {
        word(out);
      } else if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
        number(out);
      } else if (c == '"') {
        quoted(out, '"', LiteralKind::String);
      } else if (c == '\'') {
        quoted(out, '\'', LiteralKind::Char);
      } else if (kSeparators.find(c) != std::string_view::npos) {
        emit(out, pos_, pos_ + 1, Role::Separator);
        ++pos_;
      } else if (!op(out)) {
        out.errors.push_back({LexErrorKind::IllegalCharacter, {pos_, pos_ + 1}});
        ++pos_;
      }
    }
  }

 private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void emit(TokenStream& out, std::size_t b, std::size_t e, Role role,
            std::optional<LiteralKind> kind = std::nullopt) {
    out.tokens.push_back({std::string(src_.substr(b, e - b)), role, {b, e}, kind});
  }

  void block_comment(TokenStream& out) {
    const std::size_t start = pos_;
    const std::size_t close = src_.find("*/", pos_ + 2);
    if (close == std::string_view::npos) {
      out.errors.push_back({LexErrorKind::UnterminatedComment, {start, src_.size()}});
      pos_ = src_.size();
    } else {
      pos_ = close + 2;
    }
  }

  void word(TokenStream& out) {
    const std::size_t b = pos_;
    while (pos_ < src_.size() && ident_part(src_[pos_])) ++pos_;
    const std::string_view w = src_.substr(b, pos_ - b);
    if (w == "true" || w == "false") {
      emit(out, b, pos_, Role::Literal, LiteralKind::Boolean);
    } else if (w == "null") {
      emit(out, b, pos_, Role::Literal, LiteralKind::Null);
    } else {
      emit(out, b, pos_, is_keyword(w) ? Role::Keyword : Role::Identifier);
    }
  }

  void number(TokenStream& out) {
    const std::size_t b = pos_;
    bool fractional = false;
    while (is_digit(peek(0))) ++pos_;
    if (peek(0) == '.' && is_digit(peek(1))) {
      fractional = true;
      ++pos_;
      while (is_digit(peek(0))) ++pos_;
    }
    LiteralKind kind = fractional ? LiteralKind::Double : LiteralKind::Int;
    switch (peek(0)) {
      case 'L':
      case 'l':
        if (!fractional) {
          kind = LiteralKind::Long;
          ++pos_;
        }
        break;
      case 'F':
      case 'f':
        kind = LiteralKind::Float;
        ++pos_;
        break;
      case 'D':
      case 'd':
        kind = LiteralKind::Double;
        ++pos_;
        break;
      default:
        break;
    }
    emit(out, b, pos_, Role::Literal, kind);
  }

  void quoted(TokenStream& out, char quote, LiteralKind kind) {
    const std::size_t b = pos_++;
    while (pos_ < src_.size() && src_[pos_] != quote && src_[pos_] != '\n') {
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
      ++pos_;
    }
    if (pos_ >= src_.size() || src_[pos_] != quote) {
      out.errors.push_back({LexErrorKind::UnterminatedString, {b, pos_}});
      return;
    }
    ++pos_;
    emit(out, b, pos_, Role::Literal, kind);
  }

  bool op(TokenStream& out) {
    for (std::string_view o : kOperators) {
      if (src_.substr(pos_, o.size()) == o) {
        emit(out, pos_, pos_ + o.size(), Role::Operator);
        pos_ += o.size();
        return true;
      }
    }
    return false;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool is_primitive_type_keyword(std::string_view word) {
  return std::find(kPrimitives.begin(), kPrimitives.end(), word) != kPrimitives.end();
}

TokenStream tokenize(std::string_view source, std::string source_id) {
  TokenStream out;
  out.source_id = std::move(source_id);
  Lexer(source).run(out);
  return out;
}

std::vector<std::string> split_subtokens(std::string_view id) {
  std::vector<std::string> pieces;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) pieces.push_back(std::move(cur));
    cur.clear();
  };
  auto lower = [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); };
  auto is_up = [](char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; };
  auto is_lo = [](char c) { return std::islower(static_cast<unsigned char>(c)) != 0; };

  for (std::size_t i = 0; i < id.size(); ++i) {
    const char c = id[i];
    if (c == '_') {
      flush();
      continue;
    }
    if (i > 0 && !cur.empty()) {
      const char p = id[i - 1];
      const bool boundary =
          (is_lo(p) && is_up(c)) || (is_digit(p) != is_digit(c)) ||
          // "HTMLParser": split before the last capital of an acronym run
          (is_up(p) && is_up(c) && i + 1 < id.size() && is_lo(id[i + 1]));
      if (boundary) flush();
    }
    cur.push_back(lower(c));
  }
  flush();
  return pieces;
}

const char* to_string(Role role) {
  switch (role) {
    case Role::Keyword: return "Keyword";
    case Role::Identifier: return "Identifier";
    case Role::Literal: return "Literal";
    case Role::Separator: return "Separator";
    case Role::Operator: return "Operator";
  }
  return "?";
}

const char* to_string(LiteralKind kind) {
  switch (kind) {
    case LiteralKind::Int: return "Int";
    case LiteralKind::Long: return "Long";
    case LiteralKind::Float: return "Float";
    case LiteralKind::Double: return "Double";
    case LiteralKind::Char: return "Char";
    case LiteralKind::String: return "String";
    case LiteralKind::Boolean: return "Boolean";
    case LiteralKind::Null: return "Null";
  }
  return "?";
}

const char* to_string(LexErrorKind kind) {
  switch (kind) {
    case LexErrorKind::UnterminatedString: return "UnterminatedString";
    case LexErrorKind::UnterminatedComment: return "UnterminatedComment";
    case LexErrorKind::IllegalCharacter: return "IllegalCharacter";
  }
  return "?";
}

}  // namespace stmtc
