#pragma once

// Best-effort partial program analysis for the Java-like subset: an
// error-recovering parser, a project-wide class index, type resolution that
// degrades to Unknown instead of failing, and the accessible-variable
// environment at a token position.

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stmtc/lexer.hpp"

namespace stmtc {

// ---------------------------------------------------------------------------
// Types

struct TypeRef {
  // Null is the type of the `null` literal; it is a subtype of every class.
  enum class Kind : std::uint8_t { Primitive, Class, Unknown, Void, Null };

  Kind kind = Kind::Unknown;
  std::string name;  // empty unless Primitive or Class

  static TypeRef primitive(std::string n) { return {Kind::Primitive, std::move(n)}; }
  static TypeRef cls(std::string n) { return {Kind::Class, std::move(n)}; }
  static TypeRef unknown() { return {Kind::Unknown, {}}; }
  static TypeRef void_type() { return {Kind::Void, {}}; }
  static TypeRef null_type() { return {Kind::Null, {}}; }
  static TypeRef string_type() { return cls("String"); }

  /// "int" / "String" -> Primitive / Class; "Unk" -> Unknown; "void", "null".
  static TypeRef parse(std::string_view text);

  bool is_unknown() const { return kind == Kind::Unknown; }
  bool is_known() const { return kind != Kind::Unknown; }
  bool is_numeric() const;
  bool is_boolean() const { return kind == Kind::Primitive && name == "boolean"; }
  bool is_class() const { return kind == Kind::Class; }

  /// Canonical text, as used inside excode renderings.
  std::string render() const;

  bool operator==(const TypeRef&) const = default;
  std::strong_ordering operator<=>(const TypeRef& o) const { return render() <=> o.render(); }
};

TypeRef literal_type(LiteralKind kind);

// ---------------------------------------------------------------------------
// Class index

struct FieldDecl {
  std::string name;
  TypeRef type;
};

struct MethodDecl {
  std::string name;
  std::vector<TypeRef> params;
  TypeRef ret;
};

struct ClassInfo {
  std::string name;
  std::optional<std::string> supertype;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;       // unique by (name, arity)
  std::vector<MethodDecl> constructors;  // ret == the class type
  bool external = false;                 // came from a stub file
};

struct StubFile {
  std::string path;
  std::string text;
};

struct Diagnostic {
  std::string source_id;
  Span span;
  std::string message;
};

class ClassIndex {
 public:
  const ClassInfo* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  const std::map<std::string, ClassInfo, std::less<>>& classes() const { return classes_; }

  /// Looks up a field/method in `cls` and then up its supertype chain;
  /// `owner` receives the declaring class.
  const FieldDecl* find_field(std::string_view cls, std::string_view name,
                              std::string* owner = nullptr) const;
  const MethodDecl* find_method(std::string_view cls, std::string_view name, std::size_t arity,
                                std::string* owner = nullptr) const;
  /// All arities of `name` visible in `cls` (nearest declaration wins per arity).
  std::vector<std::pair<const MethodDecl*, std::string>> methods_named(std::string_view cls,
                                                                       std::string_view name) const;
  /// Supertype chain starting at `cls` itself; stops on unknown names or cycles.
  std::vector<std::string> lineage(std::string_view cls) const;

  /// Inserts or replaces a class (used by the builder and by tests).
  void put(ClassInfo info);

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }
  std::vector<Diagnostic>& mutable_diagnostics() { return diagnostics_; }

 private:
  std::map<std::string, ClassInfo, std::less<>> classes_;
  std::vector<Diagnostic> diagnostics_;
};

/// sub == sup, sub reaches sup through supertypes, numeric widening along
/// char < short < int < long < float < double, or null -> any class.
/// Unknown is never a subtype of anything here; callers handle it.
bool is_subtype(const TypeRef& sub, const TypeRef& sup, const ClassIndex& index);

/// Parses the line-oriented stub format:
///   class <Name> [extends <Name>]
///     field <name> : <Type>
///     method <name>(<Type>,...) : <ReturnType>
/// A method named like its class is a constructor.
std::vector<ClassInfo> parse_stub(const StubFile& stub, std::vector<Diagnostic>* diags = nullptr);

// ---------------------------------------------------------------------------
// Syntax tree

/// Inclusive token index range. `first > last` encodes an empty range.
struct TokRange {
  std::size_t first = 1;
  std::size_t last = 0;
  bool empty() const { return first > last; }
  bool contains(std::size_t i) const { return !empty() && i >= first && i <= last; }
  std::size_t size() const { return empty() ? 0 : last - first + 1; }
};

struct Expr {
  enum class Kind : std::uint8_t {
    Literal,
    Name,     // bare identifier: local, field of this class, or class name
    This,
    Field,    // kids[0] = receiver
    Call,     // has_receiver ? kids[0] = receiver, rest args : all args
    New,      // name = class, kids = args
    Prefix,   // op, kids[0]
    Postfix,  // op, kids[0]
    Binary,   // op, kids[0], kids[1]
    Assign,   // kids[0] = target, kids[1] = value
    Paren,    // kids[0]
    Missing,  // operand cut off by the end of a truncated prefix
  };

  Kind kind = Kind::Missing;
  std::string op;
  std::string name;
  std::size_t name_tok = 0;  // identifier token for Name/Field/Call/New
  bool has_receiver = false;
  bool open = false;       // call/new/paren whose ')' was never reached
  bool ambiguous = false;  // trailing identifier: call vs field vs name undetermined
  TokRange range;
  std::vector<Expr> kids;
  TypeRef type;  // filled by resolve_types

  std::size_t arg_begin() const { return (kind == Kind::Call && has_receiver) ? 1 : 0; }
  std::size_t argcount() const { return kids.size() - arg_begin(); }
};

struct Stmt;

struct ForParts {
  std::vector<Stmt> init;  // one VarDecl, or zero or more ExprStmt without ';'
  std::optional<Expr> cond;
  std::vector<Expr> update;
};

struct Stmt {
  enum class Kind : std::uint8_t { VarDecl, ExprStmt, If, While, For, Return, Block, Hole, Empty };

  Kind kind = Kind::Empty;
  TokRange range;
  /// The completable unit: the whole statement for simple statements, the
  /// `kw ( ... )` header for if/while/for; empty for blocks and holes.
  TokRange unit;
  bool truncated = false;  // statement cut off by the end of the token range

  // VarDecl
  TypeRef decl_type;
  std::size_t type_tok = 0;
  std::string var_name;
  std::size_t name_tok = 0;

  std::vector<Expr> exprs;  // VarDecl: [init?]; ExprStmt: [e]; If/While: [cond]; Return: [e?]
  std::vector<Stmt> body;   // If: [then, else?]; While/For: [body]; Block: statements
  std::shared_ptr<ForParts> for_parts;  // For only
  std::optional<std::size_t> else_tok;
};

struct Param {
  std::string name;
  TypeRef type;
  std::size_t name_tok = 0;
};

struct MethodAst {
  std::string name;
  TypeRef ret;
  bool is_constructor = false;
  std::vector<Param> params;
  Stmt body;  // Block
  TokRange range;
};

struct FieldAst {
  std::string name;
  TypeRef type;
  std::optional<Expr> init;
  TokRange range;
};

struct ClassAst {
  std::string name;
  std::optional<std::string> supertype;
  std::vector<FieldAst> fields;
  std::vector<MethodAst> methods;
  TokRange range;
};

struct PartialProgram {
  TokenStream stream;
  std::vector<ClassAst> classes;
  std::vector<TokRange> holes;
  std::vector<Diagnostic> diagnostics;
};

/// Error-recovering parse of a whole file. A statement that fails to parse
/// becomes a Hole covering its tokens; parsing resumes after the next ';'
/// or before the next '}'. Never throws.
PartialProgram parse_partial(TokenStream stream);

/// Parses one statement prefix (tokens [first, last] of `stream`) that may be
/// cut off anywhere. Cut-off operands become Missing, unclosed calls get
/// `open`, and a trailing identifier gets `ambiguous`. Returns nullopt when
/// the prefix is not a viable statement start.
std::optional<Stmt> parse_statement_prefix(const TokenStream& stream, TokRange range);

// ---------------------------------------------------------------------------
// Resolution

/// What a code token denotes, after resolution. This is the input of the
/// excode annotation function.
struct TokenSem {
  enum class Kind : std::uint8_t { Plain, TypeName, Variable, DeclName, Call, Field, Ctor };
  Kind kind = Kind::Plain;
  TypeRef type;   // TypeName/Variable/DeclName: the type; Field: field type; Call: return; Ctor: class
  TypeRef owner;  // Call/Field: declaring class (Unknown when unresolved)
  int argcount = 0;
  bool arity_open = false;        // call/ctor whose argument list is cut off
  bool member_ambiguous = false;  // trailing identifier: call vs field unknown
};

struct TypedProgram {
  PartialProgram program;
  std::shared_ptr<const ClassIndex> index;
  std::vector<TokenSem> sems;  // parallel to program.stream.tokens
  std::size_t expression_count = 0;
  std::size_t unresolved_count = 0;
};

ClassIndex build_class_index(const std::vector<const PartialProgram*>& programs,
                             const std::vector<StubFile>& stubs);

TypedProgram resolve_types(PartialProgram program, std::shared_ptr<const ClassIndex> index);

struct Variable {
  std::string name;
  TypeRef type;
  bool operator==(const Variable&) const = default;
};

struct ScopeEnv {
  std::vector<Variable> variables;  // innermost declaration wins; no duplicate names
  std::string enclosing_class;
  TypeRef enclosing_method_return;

  const Variable* find(std::string_view name) const;
};

/// Method whose body contains token `position`, or nullptr.
const MethodAst* enclosing_method(const PartialProgram& program, std::size_t position,
                                  const ClassAst** cls = nullptr);

/// Parameters plus locals declared before `position` in enclosing blocks.
/// A plain declaration becomes visible after its statement; a for-loop
/// initializer after its name token. Throws Error(PositionOutsideMethod).
ScopeEnv accessible_env(const TypedProgram& typed, std::size_t position);

/// Resolves a standalone statement prefix against an environment, filling
/// `sems` for the tokens of `stmt` (indices into `stream`).
void resolve_statement(Stmt& stmt, const ScopeEnv& env, const ClassIndex& index,
                       std::vector<TokenSem>& sems, const TokenStream& stream);

// ---------------------------------------------------------------------------
// Statement units

struct StatementUnit {
  TokRange tokens;
  bool header = false;  // if/while/for control header rather than a ';'-terminated statement
};

/// Units of a method body in token order.
std::vector<StatementUnit> statement_units(const MethodAst& method);

}  // namespace stmtc
