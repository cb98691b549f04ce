#pragma once

// Excode: an abstraction of code tokens that keeps the token kind and the
// data types involved (VAR(int), CALL(NodeList,getLength,0,int), ...).
// annotate() maps code to excode one token at a time; concretize_*() map
// excode back to the code tokens that are possible in a scope.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stmtc/analyzer.hpp"

namespace stmtc {

struct ExcodeToken {
  enum class Kind : std::uint8_t { Keyword, Op, Sep, Type, Var, Lit, Call, CCall, Field, Special };

  Kind kind = Kind::Sep;
  std::string name;  // Keyword/Op/Sep/Special: reserved name; Call/Field: member name
  TypeRef type;      // Type/Var/Lit: T; Call: return type; Field: field type; CCall: class
  TypeRef owner;     // Call/Field: declaring class
  int argcount = 0;  // Call/CCall

  static ExcodeToken keyword(std::string n) { return {Kind::Keyword, std::move(n), {}, {}, 0}; }
  static ExcodeToken op(std::string n) { return {Kind::Op, std::move(n), {}, {}, 0}; }
  static ExcodeToken sep(std::string n) { return {Kind::Sep, std::move(n), {}, {}, 0}; }
  static ExcodeToken special(std::string n) { return {Kind::Special, std::move(n), {}, {}, 0}; }
  static ExcodeToken type_tok(TypeRef t) { return {Kind::Type, {}, std::move(t), {}, 0}; }
  static ExcodeToken var(TypeRef t) { return {Kind::Var, {}, std::move(t), {}, 0}; }
  static ExcodeToken lit(TypeRef t) { return {Kind::Lit, {}, std::move(t), {}, 0}; }
  static ExcodeToken call(TypeRef owner, std::string name, int argc, TypeRef ret) {
    return {Kind::Call, std::move(name), std::move(ret), std::move(owner), argc};
  }
  static ExcodeToken ccall(TypeRef cls, int argc) { return {Kind::CCall, {}, std::move(cls), {}, argc}; }
  static ExcodeToken field(TypeRef owner, std::string name, TypeRef ft) {
    return {Kind::Field, std::move(name), std::move(ft), std::move(owner), 0};
  }

  /// Canonical text: TYPE(int), OP(ASSIGN), CALL(NodeList,getLength,0,int), LP, ...
  std::string render() const;
  /// Inverse of render(); nullopt on malformed text.
  static std::optional<ExcodeToken> parse(std::string_view text);

  bool operator==(const ExcodeToken& o) const { return render() == o.render(); }
  bool operator<(const ExcodeToken& o) const { return render() < o.render(); }
};

using ExcodeSequence = std::vector<ExcodeToken>;

std::string render(const ExcodeSequence& seq);

/// Reserved operator name for a code operator lexeme ("=" -> "ASSIGN"); empty if none.
std::string op_name(std::string_view lexeme);
/// Inverse of op_name.
std::string op_lexeme(std::string_view name);
/// Reserved separator name ("(" -> "LP"); empty if none.
std::string sep_name(std::string_view lexeme);
std::string sep_lexeme(std::string_view name);

/// α for one code token given its resolved meaning.
ExcodeToken annotate_token(const CodeToken& tok, const TokenSem& sem);

/// α over an inclusive token range of a typed program.
ExcodeSequence annotate(const TypedProgram& typed, TokRange range);

/// α for a statement prefix cut off anywhere: the prefix is analysed on its
/// own against `env`, so nothing after the cut influences the result. When
/// the cut leaves a member unresolved (trailing name, open argument list),
/// every reading consistent with the class index is returned. Empty when the
/// prefix is not the start of any statement.
std::vector<ExcodeSequence> annotate_prefix(const TokenStream& stream, TokRange prefix,
                                            const ScopeEnv& env, const ClassIndex& index);

// ---------------------------------------------------------------------------
// Concretization

/// A concretized code token. Placeholders stand for literals and for the name
/// of a newly declared variable.
struct ConcreteToken {
  enum class Kind : std::uint8_t { Text, LitPlaceholder, NewVar };
  Kind kind = Kind::Text;
  std::string text;  // Text: the lexeme; LitPlaceholder: the type name

  static ConcreteToken lexeme(std::string s) { return {Kind::Text, std::move(s)}; }
  static ConcreteToken lit(std::string type) { return {Kind::LitPlaceholder, std::move(type)}; }
  static ConcreteToken newvar() { return {Kind::NewVar, {}}; }

  /// `<lit:int>`, `<newvar>`, or the lexeme.
  std::string render() const;
  bool operator==(const ConcreteToken&) const = default;
  auto operator<=>(const ConcreteToken& o) const { return render() <=> o.render(); }
};

using CodeSequence = std::vector<ConcreteToken>;
std::string render(const CodeSequence& seq);

/// π. `decl_position` marks a VAR that names a new declaration (it follows a
/// TYPE token) and concretizes to <newvar>. Throws Error(EmptyConcretization)
/// when a VAR has no accessible variable of a compatible type.
std::vector<ConcreteToken> concretize_token(const ExcodeToken& e, const ScopeEnv& env,
                                            const ClassIndex& index, bool decl_position = false);

/// Π: Cartesian product of π over the sequence. `previous` is the excode
/// token right before the sequence (used to spot a declaration name at
/// position 0). Empty when some position has no concretization.
std::vector<CodeSequence> concretize_sequence(const ExcodeSequence& seq, const ScopeEnv& env,
                                              const ClassIndex& index,
                                              const ExcodeToken* previous = nullptr);

}  // namespace stmtc
