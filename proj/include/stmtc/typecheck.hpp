#pragma once

// The statement grammar over excode terminals, and type inference/checking
// on the resulting trees. Every rule treats Unknown permissively, so
// replacing a known type by Unknown can only turn a reject into an accept.

#include <optional>
#include <string>
#include <vector>

#include "stmtc/excode.hpp"

namespace stmtc {

// ---------------------------------------------------------------------------
// Excode trees

struct XNode {
  enum class Kind : std::uint8_t {
    // expressions
    Lit, Var, This, Field, Call, New, Paren, Prefix, Postfix, Binary, Assign, Missing,
    // statements
    VarDecl, ExprStmt, If, While, For, Return,
  };
  Kind kind = Kind::Missing;
  std::size_t tok = 0;        // the defining token: literal, var, member, operator, keyword
  std::size_t first = 0;      // first token of the subtree
  bool has_receiver = false;  // Field/Call: kids[0] is the receiver
  bool open = false;          // argument list or parenthesis cut off
  std::vector<XNode> kids;
  // For: kids = init..., cond, update...; the counts split them.
  std::size_t for_init = 0;
  bool for_has_cond = false;

  std::size_t arg_begin() const { return has_receiver ? 1 : 0; }
};

struct XParse {
  enum class Status : std::uint8_t { Invalid, Viable, Complete };
  Status status = Status::Invalid;
  XNode stmt;
  std::size_t error_at = 0;
  /// Set when the sequence ends right after OP(ACC): the receiver expression.
  std::optional<XNode> member_receiver;
  /// Set when the next token must name a declared variable: the declared type.
  std::optional<TypeRef> decl_type;
};

/// Parses one statement unit: `T v [= e];`, `e;`, `return [e];`, or the
/// header `if (e)`, `while (e)`, `for (i; c; u)`. The sequence may stop
/// anywhere (status Viable) but nothing may follow the end of the unit.
XParse parse_excode(const ExcodeSequence& seq);

/// Parses the whole sequence as one complete expression.
std::optional<XNode> parse_excode_expression(const ExcodeSequence& seq);

/// Syntactic class of an excode token: tokens of one class are
/// interchangeable for the grammar.
std::string syntax_class(const ExcodeToken& t);
/// A token of the given class (types Unknown).
ExcodeToken class_representative(const std::string& cls);

// ---------------------------------------------------------------------------
// Type checking

struct TypeContext {
  const ClassIndex* index = nullptr;
  TypeRef enclosing_method_return = TypeRef::unknown();
  std::string enclosing_class;
};

struct TypeError {
  int rule = 0;
  TypeRef expected;
  TypeRef found;
  std::size_t index = 0;  // excode index
  std::string message() const;
};

struct TypeResult {
  std::optional<TypeError> error;
  TypeRef type;
  bool ok() const { return !error.has_value(); }
};

/// Infers the type of an expression or statement sequence (statements are
/// typed void). Sequences that do not parse report rule 0.
TypeResult infer_type(const ExcodeSequence& seq, const TypeContext& ctx);

/// Type of a parsed subtree; Unknown when the subtree is ill-typed.
TypeRef infer_node_type(const XNode& node, const ExcodeSequence& seq, const TypeContext& ctx);

/// context ++ template parses (possibly cut at the length limit) and checks.
bool check_template(const ExcodeSequence& context, const ExcodeSequence& templ,
                    const TypeContext& ctx, TypeError* error = nullptr);

}  // namespace stmtc
