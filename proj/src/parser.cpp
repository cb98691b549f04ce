#include <algorithm>
#include <array>

#include "stmtc/analyzer.hpp"

namespace stmtc {

namespace {

struct SyntaxError {
  std::size_t at;
  std::string message;
};

constexpr std::array<std::string_view, 5> kPrefixOps = {"!", "-", "+", "++", "--"};

class Parser {
 public:
  Parser(const TokenStream& ts, std::size_t begin, std::size_t end, bool prefix_mode)
      : ts_(ts), pos_(begin), end_(end), prefix_(prefix_mode) {}

  PartialProgram* out = nullptr;

  // -- file level ----------------------------------------------------------

  void file() {
    while (!at_end()) {
      const std::size_t start = pos_;
      try {
        out->classes.push_back(class_decl());
      } catch (const SyntaxError& e) {
        report(e);
        // Skip to the next `class` keyword.
        pos_ = std::max(pos_, start + 1);
        while (!at_end() && !is("class")) ++pos_;
        add_hole(start, pos_ - 1);
      }
    }
  }

  ClassAst class_decl() {
    ClassAst c;
    c.range.first = pos_;
    expect("class");
    c.name = ident();
    if (is_ident_lexeme("extends")) {
      ++pos_;
      c.supertype = ident();
    }
    expect("{");
    while (!at_end() && !is("}")) {
      const std::size_t start = pos_;
      try {
        member(c);
      } catch (const SyntaxError& e) {
        report(e);
        pos_ = std::max(pos_, start);
        recover();
        add_hole(start, pos_ - 1);
      }
    }
    expect("}");
    c.range.last = pos_ - 1;
    return c;
  }

  void member(ClassAst& c) {
    const std::size_t start = pos_;
    // Constructor: ClassName '('
    if (peek() && peek()->role == Role::Identifier && peek()->lexeme == c.name && is("(", 1)) {
      MethodAst m;
      m.name = c.name;
      m.is_constructor = true;
      m.ret = TypeRef::cls(c.name);
      ++pos_;
      params(m);
      m.body = block();
      m.range = {start, pos_ - 1};
      c.methods.push_back(std::move(m));
      return;
    }
    TypeRef t;
    if (is("void")) {
      ++pos_;
      t = TypeRef::void_type();
    } else {
      t = type_name(nullptr);
    }
    std::string name = ident();
    if (is("(")) {
      MethodAst m;
      m.name = std::move(name);
      m.ret = t;
      params(m);
      m.body = block();
      m.range = {start, pos_ - 1};
      c.methods.push_back(std::move(m));
      return;
    }
    if (t.kind == TypeRef::Kind::Void) fail("field of type void");
    FieldAst f;
    f.name = std::move(name);
    f.type = t;
    if (is("=")) {
      ++pos_;
      f.init = expr();
    }
    expect(";");
    f.range = {start, pos_ - 1};
    c.fields.push_back(std::move(f));
  }

  void params(MethodAst& m) {
    expect("(");
    if (!is(")")) {
      for (;;) {
        Param p;
        p.type = type_name(nullptr);
        p.name_tok = pos_;
        p.name = ident();
        m.params.push_back(std::move(p));
        if (!is(",")) break;
        ++pos_;
      }
    }
    expect(")");
  }

  // -- statements ----------------------------------------------------------

  Stmt block() {
    Stmt b;
    b.kind = Stmt::Kind::Block;
    b.range.first = pos_;
    expect("{");
    while (!at_end() && !is("}")) b.body.push_back(statement_recovering());
    expect("}");
    b.range.last = pos_ - 1;
    return b;
  }

  Stmt statement_recovering() {
    const std::size_t start = pos_;
    try {
      return statement();
    } catch (const SyntaxError& e) {
      report(e);
      pos_ = start;
      recover();
      if (pos_ == start) ++pos_;  // always make progress
      Stmt h;
      h.kind = Stmt::Kind::Hole;
      h.range = {start, pos_ - 1};
      add_hole(start, pos_ - 1);
      return h;
    }
  }

  Stmt statement() {
    Stmt s;
    s.range.first = pos_;
    if (cut()) {
      s.truncated = true;
      return s;
    }
    if (is("{")) return block();
    if (is(";")) {
      ++pos_;
      s.kind = Stmt::Kind::Empty;
      s.range.last = pos_ - 1;
      s.unit = s.range;
      return s;
    }
    if (is("if")) return if_stmt();
    if (is("while")) return while_stmt();
    if (is("for")) return for_stmt();
    if (is("return")) {
      s.kind = Stmt::Kind::Return;
      ++pos_;
      if (!cut() && !is(";")) s.exprs.push_back(expr());
      finish_simple(s);
      return s;
    }
    if (starts_decl()) {
      var_decl(s);
      finish_simple(s);
      return s;
    }
    s.kind = Stmt::Kind::ExprStmt;
    s.exprs.push_back(expr());
    finish_simple(s);
    return s;
  }

  void finish_simple(Stmt& s) {
    if (cut() || s.truncated || (!s.exprs.empty() && incomplete(s.exprs.back()))) {
      s.truncated = true;
      s.range.last = pos_ - 1;
      s.unit = s.range;
      return;
    }
    expect(";");
    s.range.last = pos_ - 1;
    s.unit = s.range;
  }

  bool starts_decl() const {
    if (!peek()) return false;
    if (peek()->role == Role::Keyword &&
        (is_primitive_type_keyword(peek()->lexeme) || peek()->lexeme == "String"))
      return true;
    return peek()->role == Role::Identifier && peek(1) && peek(1)->role == Role::Identifier;
  }

  void var_decl(Stmt& s) {
    s.kind = Stmt::Kind::VarDecl;
    s.decl_type = type_name(&s.type_tok);
    if (cut()) {
      s.truncated = true;
      return;
    }
    s.name_tok = pos_;
    s.var_name = ident();
    if (cut()) {
      s.truncated = true;
      return;
    }
    if (is("=")) {
      ++pos_;
      s.exprs.push_back(expr());
    }
  }

  Stmt if_stmt() {
    Stmt s;
    s.kind = Stmt::Kind::If;
    s.range.first = pos_;
    ++pos_;
    if (!header_cond(s)) return s;
    s.body.push_back(statement());
    if (s.body.back().truncated) return truncate(s);
    if (is("else")) {
      s.else_tok = pos_;
      ++pos_;
      s.body.push_back(statement());
      if (s.body.back().truncated) return truncate(s);
    }
    s.range.last = pos_ - 1;
    return s;
  }

  Stmt while_stmt() {
    Stmt s;
    s.kind = Stmt::Kind::While;
    s.range.first = pos_;
    ++pos_;
    if (!header_cond(s)) return s;
    s.body.push_back(statement());
    if (s.body.back().truncated) return truncate(s);
    s.range.last = pos_ - 1;
    return s;
  }

  // `( cond )` of if/while. Returns false when the prefix ends inside it.
  bool header_cond(Stmt& s) {
    if (cut()) return (truncate(s), false);
    expect("(");
    s.exprs.push_back(expr());
    if (cut() || incomplete(s.exprs.back())) return (truncate(s), false);
    expect(")");
    s.unit = {s.range.first, pos_ - 1};
    if (cut()) return (truncate(s), false);
    return true;
  }

  Stmt for_stmt() {
    Stmt s;
    s.kind = Stmt::Kind::For;
    s.range.first = pos_;
    s.for_parts = std::make_shared<ForParts>();
    ForParts& fp = *s.for_parts;
    ++pos_;
    if (cut()) return truncate(s);
    expect("(");
    // init
    if (cut()) return truncate(s);
    if (!is(";")) {
      if (starts_decl()) {
        Stmt d;
        d.range.first = pos_;
        var_decl(d);
        d.range.last = pos_ - 1;
        const bool inc = d.truncated || (!d.exprs.empty() && incomplete(d.exprs.back()));
        fp.init.push_back(std::move(d));
        if (inc || cut()) return truncate(s);
      } else {
        for (;;) {
          Stmt e;
          e.kind = Stmt::Kind::ExprStmt;
          e.range.first = pos_;
          e.exprs.push_back(expr());
          e.range.last = pos_ - 1;
          const bool inc = incomplete(e.exprs.back());
          fp.init.push_back(std::move(e));
          if (inc || cut()) return truncate(s);
          if (!is(",")) break;
          ++pos_;
        }
      }
    }
    expect(";");
    if (cut()) return truncate(s);
    if (!is(";")) {
      fp.cond = expr();
      if (incomplete(*fp.cond) || cut()) return truncate(s);
    }
    expect(";");
    if (cut()) return truncate(s);
    if (!is(")")) {
      for (;;) {
        fp.update.push_back(expr());
        if (incomplete(fp.update.back()) || cut()) return truncate(s);
        if (!is(",")) break;
        ++pos_;
      }
    }
    expect(")");
    s.unit = {s.range.first, pos_ - 1};
    if (cut()) return truncate(s);
    s.body.push_back(statement());
    if (s.body.back().truncated) return truncate(s);
    s.range.last = pos_ - 1;
    return s;
  }

  Stmt& truncate(Stmt& s) {
    s.truncated = true;
    s.range.last = pos_ - 1;
    if (s.unit.empty()) s.unit = s.range;
    return s;
  }

  // -- expressions ---------------------------------------------------------

  Expr expr() { return assignment(); }

  Expr assignment() {
    Expr lhs = binary(0);
    if (!at_end() && is("=")) {
      if (!is_lvalue(lhs)) fail("assignment to a non-variable");
      ++pos_;
      Expr a;
      a.kind = Expr::Kind::Assign;
      a.op = "=";
      a.range.first = lhs.range.first;
      a.kids.push_back(std::move(lhs));
      a.kids.push_back(assignment());
      a.range.last = pos_ - 1;
      return a;
    }
    return lhs;
  }

  static bool is_lvalue(const Expr& e) {
    if (e.kind == Expr::Kind::Name || e.kind == Expr::Kind::Field) return true;
    return e.kind == Expr::Kind::Paren && !e.kids.empty() && is_lvalue(e.kids[0]);
  }

  static int precedence(std::string_view op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "/" || op == "%") return 6;
    return 0;
  }

  // Precedence climbing; all binary operators are left-associative.
  Expr binary(int min_prec) {
    Expr lhs = unary();
    for (;;) {
      if (at_end() || incomplete(lhs) || peek()->role != Role::Operator) return lhs;
      const int prec = precedence(peek()->lexeme);
      if (prec == 0 || prec <= min_prec) return lhs;
      Expr b;
      b.kind = Expr::Kind::Binary;
      b.op = peek()->lexeme;
      ++pos_;
      b.range.first = lhs.range.first;
      b.kids.push_back(std::move(lhs));
      b.kids.push_back(binary(prec));
      b.range.last = pos_ - 1;
      lhs = std::move(b);
    }
  }

  Expr unary() {
    if (cut()) return missing();
    if (!peek()) fail("unexpected end of input");
    if (peek()->role == Role::Operator &&
        std::find(kPrefixOps.begin(), kPrefixOps.end(), peek()->lexeme) != kPrefixOps.end()) {
      Expr u;
      u.kind = Expr::Kind::Prefix;
      u.op = peek()->lexeme;
      u.range.first = pos_++;
      u.kids.push_back(unary());
      u.range.last = pos_ - 1;
      return u;
    }
    return postfix();
  }

  Expr postfix() {
    Expr e = primary();
    while (!at_end() && !incomplete(e) && is(".")) {
      const std::size_t dot = pos_++;
      if (cut()) {
        // `x.` with nothing after it: keep the receiver, mark the access open.
        Expr f;
        f.kind = Expr::Kind::Field;
        f.has_receiver = true;
        f.ambiguous = true;
        f.range = {e.range.first, dot};
        f.name_tok = dot + 1;
        f.kids.push_back(std::move(e));
        return f;
      }
      Expr m = member_or_name();
      m.has_receiver = true;
      if (m.kind == Expr::Kind::Name) m.kind = Expr::Kind::Field;
      m.range.first = e.range.first;
      m.kids.insert(m.kids.begin(), std::move(e));
      e = std::move(m);
    }
    if (!at_end() && !incomplete(e) && (is("++") || is("--"))) {
      Expr p;
      p.kind = Expr::Kind::Postfix;
      p.op = peek()->lexeme;
      p.range.first = e.range.first;
      p.kids.push_back(std::move(e));
      p.range.last = pos_++;
      return p;
    }
    return e;
  }

  // Identifier, optionally followed by an argument list.
  Expr member_or_name() {
    Expr e;
    e.name_tok = pos_;
    e.range.first = pos_;
    e.name = ident();
    e.range.last = pos_ - 1;
    if (cut()) {
      e.kind = Expr::Kind::Name;
      e.ambiguous = true;
      return e;
    }
    if (is("(")) {
      e.kind = Expr::Kind::Call;
      args(e);
    } else {
      e.kind = Expr::Kind::Name;
    }
    return e;
  }

  void args(Expr& e) {
    expect("(");
    if (cut()) {
      e.open = true;
      e.range.last = pos_ - 1;
      return;
    }
    if (!is(")")) {
      for (;;) {
        e.kids.push_back(expr());
        if (cut() || incomplete(e.kids.back())) {
          e.open = true;
          e.range.last = pos_ - 1;
          return;
        }
        if (!is(",")) break;
        ++pos_;
      }
    }
    expect(")");
    e.range.last = pos_ - 1;
  }

  Expr primary() {
    if (cut()) return missing();
    if (!peek()) fail("unexpected end of input");
    const CodeToken& t = *peek();
    Expr e;
    e.range.first = pos_;
    if (t.role == Role::Literal) {
      e.kind = Expr::Kind::Literal;
      ++pos_;
    } else if (is("this")) {
      e.kind = Expr::Kind::This;
      ++pos_;
    } else if (is("(")) {
      ++pos_;
      e.kind = Expr::Kind::Paren;
      e.kids.push_back(expr());
      if (cut() || incomplete(e.kids.back())) {
        e.open = true;
        e.range.last = pos_ - 1;
        return e;
      }
      expect(")");
    } else if (is("new")) {
      ++pos_;
      e.kind = Expr::Kind::New;
      if (cut()) {
        e.open = true;
        e.name_tok = pos_;
        e.range.last = pos_ - 1;
        return e;
      }
      e.name_tok = pos_;
      std::size_t type_tok = 0;
      e.name = type_name(&type_tok).render();
      if (cut()) {
        e.open = true;
        e.ambiguous = true;  // argument count unknown
        e.range.last = pos_ - 1;
        return e;
      }
      args(e);
      return e;
    } else if (t.role == Role::Identifier) {
      return member_or_name();
    } else {
      fail("expected an expression");
    }
    e.range.last = pos_ - 1;
    return e;
  }

  Expr missing() const {
    Expr e;
    e.kind = Expr::Kind::Missing;
    return e;
  }

  // True when the prefix ended inside `e`.
  static bool incomplete(const Expr& e) {
    if (e.kind == Expr::Kind::Missing || e.open || e.ambiguous) return true;
    switch (e.kind) {
      case Expr::Kind::Prefix:
      case Expr::Kind::Binary:
      case Expr::Kind::Assign:
        return incomplete(e.kids.back());
      default:
        return false;
    }
  }

  // -- tokens --------------------------------------------------------------

  TypeRef type_name(std::size_t* tok) {
    if (!peek()) fail("expected a type");
    const CodeToken& t = *peek();
    if (tok) *tok = pos_;
    if (t.role == Role::Keyword && is_primitive_type_keyword(t.lexeme)) {
      ++pos_;
      return TypeRef::primitive(t.lexeme);
    }
    if ((t.role == Role::Keyword && t.lexeme == "String") || t.role == Role::Identifier) {
      ++pos_;
      return TypeRef::cls(t.lexeme);
    }
    fail("expected a type");
  }

  std::string ident() {
    if (!peek() || peek()->role != Role::Identifier) fail("expected an identifier");
    return ts_.tokens[pos_++].lexeme;
  }

  void expect(std::string_view lexeme) {
    if (!is(lexeme)) fail("expected '" + std::string(lexeme) + "'");
    ++pos_;
  }

  bool at_end() const { return pos_ >= end_; }
  bool cut() const { return prefix_ && at_end(); }

  const CodeToken* peek(std::size_t ahead = 0) const {
    return pos_ + ahead < end_ ? &ts_.tokens[pos_ + ahead] : nullptr;
  }

  // Matches keywords, operators and separators by lexeme.
  bool is(std::string_view lexeme, std::size_t ahead = 0) const {
    const CodeToken* t = peek(ahead);
    return t && t->role != Role::Identifier && t->role != Role::Literal && t->lexeme == lexeme;
  }

  bool is_ident_lexeme(std::string_view lexeme) const {
    return peek() && peek()->role == Role::Identifier && peek()->lexeme == lexeme;
  }

  [[noreturn]] void fail(std::string message) const { throw SyntaxError{pos_, std::move(message)}; }

  // Skips to just after the next ';' or to the next '}' at brace depth 0.
  void recover() {
    int depth = 0;
    while (!at_end()) {
      if (is("{")) {
        ++depth;
      } else if (is("}")) {
        if (depth == 0) return;
        --depth;
        if (depth == 0) {
          ++pos_;
          return;
        }
      } else if (is(";") && depth == 0) {
        ++pos_;
        return;
      }
      ++pos_;
    }
  }

  void report(const SyntaxError& e) {
    if (!out) return;
    Span span{};
    if (e.at < ts_.tokens.size()) span = ts_.tokens[e.at].span;
    else if (!ts_.tokens.empty()) span = {ts_.tokens.back().span.end, ts_.tokens.back().span.end};
    out->diagnostics.push_back({ts_.source_id, span, e.message});
  }

  void add_hole(std::size_t first, std::size_t last) {
    if (out && first <= last) out->holes.push_back({first, last});
  }

  const TokenStream& ts_;
  std::size_t pos_;
  std::size_t end_;
  bool prefix_;
};

}  // namespace

PartialProgram parse_partial(TokenStream stream) {
  PartialProgram prog;
  prog.stream = std::move(stream);
  Parser p(prog.stream, 0, prog.stream.tokens.size(), false);
  p.out = &prog;
  p.file();
  return prog;
}

std::optional<Stmt> parse_statement_prefix(const TokenStream& stream, TokRange range) {
  const std::size_t end = range.empty() ? range.first : range.last + 1;
  Parser p(stream, range.first, end, true);
  try {
    Stmt s = p.statement();
    // Header-only prefixes (`if (...)`) stop before the body.
    return s;
  } catch (const SyntaxError&) {
    return std::nullopt;
  }
}

std::vector<StatementUnit> statement_units(const MethodAst& method) {
  std::vector<StatementUnit> units;
  auto walk = [&](auto&& self, const Stmt& s) -> void {
    switch (s.kind) {
      case Stmt::Kind::VarDecl:
      case Stmt::Kind::ExprStmt:
      case Stmt::Kind::Return:
        units.push_back({s.unit, false});
        break;
      case Stmt::Kind::If:
      case Stmt::Kind::While:
      case Stmt::Kind::For:
        units.push_back({s.unit, true});
        for (const Stmt& b : s.body) self(self, b);
        break;
      case Stmt::Kind::Block:
        for (const Stmt& b : s.body) self(self, b);
        break;
      case Stmt::Kind::Hole:
      case Stmt::Kind::Empty:
        break;
    }
  };
  walk(walk, method.body);
  return units;
}

}  // namespace stmtc
