#include <algorithm>
#include <array>
#include <set>
#include <sstream>

#include "stmtc/analyzer.hpp"
#include "stmtc/error.hpp"

namespace stmtc {

namespace {

constexpr std::array<std::string_view, 6> kNumericChain = {"char", "short", "int", "long", "float", "double"};

int numeric_rank(const TypeRef& t) {
  if (t.kind != TypeRef::Kind::Primitive) return -1;
  for (std::size_t i = 0; i < kNumericChain.size(); ++i)
    if (kNumericChain[i] == t.name) return static_cast<int>(i);
  return -1;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

TokenSem plain_sem(TokenSem::Kind kind, const TypeRef& t) {
  TokenSem s;
  s.kind = kind;
  s.type = t;
  return s;
}

// Collapses class names that the index does not know to Unknown.
TypeRef resolve_type(const TypeRef& t, const ClassIndex& index) {
  if (t.kind == TypeRef::Kind::Class && !index.contains(t.name)) return TypeRef::unknown();
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// TypeRef

TypeRef TypeRef::parse(std::string_view text) {
  if (text == "Unk" || text.empty()) return unknown();
  if (text == "void") return void_type();
  if (text == "null") return null_type();
  if (is_primitive_type_keyword(text)) return primitive(std::string(text));
  return cls(std::string(text));
}

bool TypeRef::is_numeric() const { return numeric_rank(*this) >= 0; }

std::string TypeRef::render() const {
  switch (kind) {
    case Kind::Primitive:
    case Kind::Class: return name;
    case Kind::Unknown: return "Unk";
    case Kind::Void: return "void";
    case Kind::Null: return "null";
  }
  return "Unk";
}

TypeRef literal_type(LiteralKind kind) {
  switch (kind) {
    case LiteralKind::Int: return TypeRef::primitive("int");
    case LiteralKind::Long: return TypeRef::primitive("long");
    case LiteralKind::Float: return TypeRef::primitive("float");
    case LiteralKind::Double: return TypeRef::primitive("double");
    case LiteralKind::Char: return TypeRef::primitive("char");
    case LiteralKind::String: return TypeRef::string_type();
    case LiteralKind::Boolean: return TypeRef::primitive("boolean");
    case LiteralKind::Null: return TypeRef::null_type();
  }
  return TypeRef::unknown();
}

bool is_subtype(const TypeRef& sub, const TypeRef& sup, const ClassIndex& index) {
  if (sub.is_unknown() || sup.is_unknown()) return false;
  if (sub == sup) return true;
  const int rs = numeric_rank(sub);
  const int rp = numeric_rank(sup);
  if (rs >= 0 && rp >= 0) return rs <= rp;
  if (sub.kind == TypeRef::Kind::Null) return sup.kind == TypeRef::Kind::Class;
  if (sub.kind == TypeRef::Kind::Class && sup.kind == TypeRef::Kind::Class) {
    for (const std::string& c : index.lineage(sub.name))
      if (c == sup.name) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// ClassIndex

const ClassInfo* ClassIndex::find(std::string_view name) const {
  auto it = classes_.find(name);
  return it == classes_.end() ? nullptr : &it->second;
}

void ClassIndex::put(ClassInfo info) {
  std::string key = info.name;
  classes_.insert_or_assign(std::move(key), std::move(info));
}

std::vector<std::string> ClassIndex::lineage(std::string_view cls) const {
  std::vector<std::string> chain;
  std::string cur(cls);
  while (const ClassInfo* ci = find(cur)) {
    if (std::find(chain.begin(), chain.end(), cur) != chain.end()) break;
    chain.push_back(cur);
    if (!ci->supertype) break;
    cur = *ci->supertype;
  }
  if (chain.empty()) chain.emplace_back(cls);
  return chain;
}

const FieldDecl* ClassIndex::find_field(std::string_view cls, std::string_view name,
                                        std::string* owner) const {
  for (const std::string& c : lineage(cls)) {
    const ClassInfo* ci = find(c);
    if (!ci) break;
    for (const FieldDecl& f : ci->fields) {
      if (f.name == name) {
        if (owner) *owner = c;
        return &f;
      }
    }
  }
  return nullptr;
}

const MethodDecl* ClassIndex::find_method(std::string_view cls, std::string_view name,
                                          std::size_t arity, std::string* owner) const {
  for (const std::string& c : lineage(cls)) {
    const ClassInfo* ci = find(c);
    if (!ci) break;
    for (const MethodDecl& m : ci->methods) {
      if (m.name == name && m.params.size() == arity) {
        if (owner) *owner = c;
        return &m;
      }
    }
  }
  return nullptr;
}

std::vector<std::pair<const MethodDecl*, std::string>> ClassIndex::methods_named(
    std::string_view cls, std::string_view name) const {
  std::vector<std::pair<const MethodDecl*, std::string>> out;
  std::set<std::size_t> seen;
  for (const std::string& c : lineage(cls)) {
    const ClassInfo* ci = find(c);
    if (!ci) break;
    for (const MethodDecl& m : ci->methods) {
      if (m.name == name && seen.insert(m.params.size()).second) out.emplace_back(&m, c);
    }
  }
  return out;
}

std::vector<ClassInfo> parse_stub(const StubFile& stub, std::vector<Diagnostic>* diags) {
  std::vector<ClassInfo> out;
  std::istringstream in(stub.text);
  std::string raw;
  std::size_t offset = 0;
  auto complain = [&](std::size_t at, std::size_t len, std::string msg) {
    if (diags) diags->push_back({stub.path, {at, at + len}, std::move(msg)});
  };
  while (std::getline(in, raw)) {
    const std::size_t line_at = offset;
    offset += raw.size() + 1;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream words(line);
    std::string head;
    words >> head;
    if (head == "class") {
      ClassInfo ci;
      ci.external = true;
      words >> ci.name;
      std::string ext;
      if (words >> ext) {
        std::string super;
        if (ext == "extends" && (words >> super)) ci.supertype = super;
        else complain(line_at, raw.size(), "malformed class line");
      }
      if (ci.name.empty()) complain(line_at, raw.size(), "class without a name");
      else out.push_back(std::move(ci));
      continue;
    }
    if (out.empty()) {
      complain(line_at, raw.size(), "member outside of a class");
      continue;
    }
    ClassInfo& ci = out.back();
    const auto colon = line.rfind(':');
    if (colon == std::string::npos) {
      complain(line_at, raw.size(), "missing ':' type annotation");
      continue;
    }
    const TypeRef type = TypeRef::parse(trim(std::string_view(line).substr(colon + 1)));
    std::string lhs = trim(std::string_view(line).substr(head.size(), colon - head.size()));
    if (head == "field") {
      ci.fields.push_back({lhs, type});
    } else if (head == "method") {
      const auto lp = lhs.find('(');
      const auto rp = lhs.rfind(')');
      if (lp == std::string::npos || rp == std::string::npos || rp < lp) {
        complain(line_at, raw.size(), "malformed method signature");
        continue;
      }
      MethodDecl m;
      m.name = trim(std::string_view(lhs).substr(0, lp));
      m.ret = type;
      std::string params = lhs.substr(lp + 1, rp - lp - 1);
      std::istringstream ps(params);
      std::string p;
      while (std::getline(ps, p, ',')) {
        const std::string t = trim(p);
        if (!t.empty()) m.params.push_back(TypeRef::parse(t));
      }
      if (m.name == ci.name) ci.constructors.push_back(std::move(m));
      else ci.methods.push_back(std::move(m));
    } else {
      complain(line_at, raw.size(), "unknown stub line '" + head + "'");
    }
  }
  return out;
}

namespace {

const StubFile& builtin_string_stub() {
  static const StubFile stub{"<builtin>",
                             "class String\n"
                             "  method length() : int\n"
                             "  method substring(int) : String\n"};
  return stub;
}

void add_unique_method(ClassInfo& ci, MethodDecl m, std::vector<Diagnostic>& diags,
                       const std::string& source) {
  auto& list = (m.name == ci.name) ? ci.constructors : ci.methods;
  for (const MethodDecl& existing : list) {
    if (existing.name == m.name && existing.params.size() == m.params.size()) {
      diags.push_back({source, {}, "duplicate method " + ci.name + "." + m.name + "/" +
                                       std::to_string(m.params.size())});
      return;
    }
  }
  list.push_back(std::move(m));
}

}  // namespace

ClassIndex build_class_index(const std::vector<const PartialProgram*>& programs,
                             const std::vector<StubFile>& stubs) {
  ClassIndex index;
  auto& diags = index.mutable_diagnostics();

  std::vector<StubFile> all_stubs{builtin_string_stub()};
  all_stubs.insert(all_stubs.end(), stubs.begin(), stubs.end());
  for (const StubFile& s : all_stubs) {
    for (ClassInfo& ci : parse_stub(s, &diags)) {
      ClassInfo merged;
      merged.name = ci.name;
      merged.supertype = ci.supertype;
      merged.external = true;
      for (MethodDecl& m : ci.methods) add_unique_method(merged, std::move(m), diags, s.path);
      for (MethodDecl& m : ci.constructors) add_unique_method(merged, std::move(m), diags, s.path);
      merged.fields = std::move(ci.fields);
      index.put(std::move(merged));
    }
  }

  // Name-ordered merge so the result does not depend on input order.
  std::vector<const PartialProgram*> sorted(programs.begin(), programs.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const PartialProgram* a, const PartialProgram* b) {
    return a->stream.source_id < b->stream.source_id;
  });
  std::set<std::string> from_source;
  for (const PartialProgram* p : sorted) {
    for (const ClassAst& c : p->classes) {
      if (!from_source.insert(c.name).second) {
        Span span = c.range.empty() ? Span{} : p->stream.tokens[c.range.first].span;
        diags.push_back({p->stream.source_id, span, "DuplicateClass " + c.name});
        continue;
      }
      ClassInfo ci;
      ci.name = c.name;
      ci.supertype = c.supertype;
      for (const FieldAst& f : c.fields) ci.fields.push_back({f.name, f.type});
      for (const MethodAst& m : c.methods) {
        MethodDecl d;
        d.name = m.name;
        d.ret = m.ret;
        for (const Param& prm : m.params) d.params.push_back(prm.type);
        add_unique_method(ci, std::move(d), diags, p->stream.source_id);
      }
      index.put(std::move(ci));
    }
  }

  // Break supertype cycles and drop edges to unknown classes' cycles.
  std::vector<std::string> names;
  for (const auto& [name, _] : index.classes()) names.push_back(name);
  for (const std::string& name : names) {
    std::vector<std::string> seen{name};
    std::string cur = name;
    for (;;) {
      const ClassInfo* ci = index.find(cur);
      if (!ci || !ci->supertype) break;
      if (std::find(seen.begin(), seen.end(), *ci->supertype) != seen.end()) {
        ClassInfo fixed = *ci;
        diags.push_back({"", {}, "supertype cycle through " + fixed.name + " removed"});
        fixed.supertype.reset();
        index.put(std::move(fixed));
        break;
      }
      cur = *ci->supertype;
      seen.push_back(cur);
    }
  }

  // Member types naming classes the index does not know collapse to Unknown.
  for (const std::string& name : names) {
    ClassInfo ci = *index.find(name);
    for (FieldDecl& f : ci.fields) f.type = resolve_type(f.type, index);
    for (MethodDecl& m : ci.methods) {
      m.ret = resolve_type(m.ret, index);
      for (TypeRef& t : m.params) t = resolve_type(t, index);
    }
    for (MethodDecl& m : ci.constructors)
      for (TypeRef& t : m.params) t = resolve_type(t, index);
    index.put(std::move(ci));
  }
  return index;
}

// ---------------------------------------------------------------------------
// Resolver

namespace {

class Resolver {
 public:
  Resolver(const ClassIndex& index, std::vector<TokenSem>& sems) : index_(index), sems_(sems) {}

  std::string cls;
  std::size_t expressions = 0;
  std::size_t unresolved = 0;

  void push() { scopes_.emplace_back(); }
  void pop() { scopes_.pop_back(); }
  void declare(const std::string& name, const TypeRef& t) { scopes_.back().push_back({name, t}); }

  const Variable* lookup(std::string_view name) const {
    for (auto s = scopes_.rbegin(); s != scopes_.rend(); ++s)
      for (auto v = s->rbegin(); v != s->rend(); ++v)
        if (v->name == name) return &*v;
    return nullptr;
  }

  TypeRef type_of(const TypeRef& t) const { return resolve_type(t, index_); }

  void method(MethodAst& m) {
    push();
    for (const Param& p : m.params) {
      const TypeRef t = type_of(p.type);
      declare(p.name, t);
      set(p.name_tok, plain_sem(TokenSem::Kind::DeclName, t));
    }
    stmt(m.body);
    pop();
  }

  void stmt(Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::VarDecl: {
        const TypeRef t = type_of(s.decl_type);
        set(s.type_tok, plain_sem(TokenSem::Kind::TypeName, t));
        for (Expr& e : s.exprs) expr(e);
        if (!s.var_name.empty()) {
          set(s.name_tok, plain_sem(TokenSem::Kind::DeclName, t));
          declare(s.var_name, t);
        }
        break;
      }
      case Stmt::Kind::ExprStmt:
      case Stmt::Kind::Return:
        for (Expr& e : s.exprs) expr(e);
        break;
      case Stmt::Kind::If:
      case Stmt::Kind::While:
        for (Expr& e : s.exprs) expr(e);
        for (Stmt& b : s.body) scoped(b);
        break;
      case Stmt::Kind::For: {
        push();
        ForParts& fp = *s.for_parts;
        for (Stmt& i : fp.init) stmt(i);
        if (fp.cond) expr(*fp.cond);
        for (Expr& u : fp.update) expr(u);
        for (Stmt& b : s.body) scoped(b);
        pop();
        break;
      }
      case Stmt::Kind::Block:
        push();
        for (Stmt& b : s.body) stmt(b);
        pop();
        break;
      case Stmt::Kind::Hole:
      case Stmt::Kind::Empty:
        break;
    }
  }

  void scoped(Stmt& s) {
    push();
    stmt(s);
    pop();
  }

  TypeRef expr(Expr& e) {
    ++expressions;
    e.type = compute(e);
    if (e.type.is_unknown() && e.kind != Expr::Kind::Missing) ++unresolved;
    return e.type;
  }

 private:
  TypeRef compute(Expr& e) {
    using K = Expr::Kind;
    switch (e.kind) {
      case K::Literal: {
        // The parser only builds Literal nodes from literal tokens.
        return literal_type(*token_kind(e.range.first));
      }
      case K::This: return cls.empty() ? TypeRef::unknown() : TypeRef::cls(cls);
      case K::Missing: return TypeRef::unknown();
      case K::Paren: return e.kids.empty() ? TypeRef::unknown() : expr(e.kids[0]);
      case K::Name: return name(e);
      case K::Field: return field(e);
      case K::Call: return call(e);
      case K::New: return construct(e);
      case K::Prefix: {
        const TypeRef t = expr(e.kids[0]);
        return e.op == "!" ? TypeRef::primitive("boolean") : t;
      }
      case K::Postfix: return expr(e.kids[0]);
      case K::Assign: {
        const TypeRef t = expr(e.kids[0]);
        expr(e.kids[1]);
        return t;
      }
      case K::Binary: {
        const TypeRef a = expr(e.kids[0]);
        const TypeRef b = expr(e.kids[1]);
        const std::string& op = e.op;
        if (op == "&&" || op == "||" || op == "==" || op == "!=" || op == "<" || op == "<=" ||
            op == ">" || op == ">=")
          return TypeRef::primitive("boolean");
        if (a.is_unknown()) return b;
        if (b.is_unknown()) return a;
        if (is_subtype(a, b, index_)) return b;
        if (is_subtype(b, a, index_)) return a;
        return TypeRef::unknown();
      }
    }
    return TypeRef::unknown();
  }

  std::optional<LiteralKind> token_kind(std::size_t tok) const { return literal_kinds_->at(tok); }

 public:
  const std::vector<std::optional<LiteralKind>>* literal_kinds_ = nullptr;

 private:
  TypeRef name(Expr& e) {
    TokenSem sem;
    sem.member_ambiguous = e.ambiguous;
    TypeRef result = TypeRef::unknown();
    std::string owner;
    if (const Variable* v = lookup(e.name)) {
      sem.kind = TokenSem::Kind::Variable;
      sem.type = v->type;
      result = v->type;
    } else if (const FieldDecl* f = cls.empty() ? nullptr : index_.find_field(cls, e.name, &owner)) {
      sem.kind = TokenSem::Kind::Field;
      sem.type = f->type;
      sem.owner = TypeRef::cls(owner);
      result = f->type;
    } else if (index_.contains(e.name)) {
      sem.kind = TokenSem::Kind::TypeName;
      sem.type = TypeRef::cls(e.name);
    } else {
      sem.kind = TokenSem::Kind::Variable;
      sem.type = TypeRef::unknown();
    }
    set(e.name_tok, sem);
    return result;
  }

  TypeRef receiver(Expr& e, bool* implicit) {
    if (e.has_receiver) {
      *implicit = false;
      return expr(e.kids[0]);
    }
    *implicit = true;
    return cls.empty() ? TypeRef::unknown() : TypeRef::cls(cls);
  }

  TypeRef field(Expr& e) {
    bool implicit = false;
    const TypeRef r = receiver(e, &implicit);
    TokenSem sem;
    sem.kind = TokenSem::Kind::Field;
    sem.member_ambiguous = e.ambiguous;
    sem.owner = TypeRef::unknown();
    sem.type = TypeRef::unknown();
    std::string owner;
    if (r.is_class() && !e.name.empty()) {
      if (const FieldDecl* f = index_.find_field(r.name, e.name, &owner)) {
        sem.owner = TypeRef::cls(owner);
        sem.type = f->type;
      }
    }
    if (!e.name.empty()) set(e.name_tok, sem);
    return sem.type;
  }

  TypeRef call(Expr& e) {
    bool implicit = false;
    const TypeRef r = receiver(e, &implicit);
    for (std::size_t i = e.arg_begin(); i < e.kids.size(); ++i) expr(e.kids[i]);
    TokenSem sem;
    sem.kind = TokenSem::Kind::Call;
    sem.argcount = static_cast<int>(e.argcount());
    sem.arity_open = e.open;
    sem.owner = TypeRef::unknown();
    sem.type = TypeRef::unknown();
    std::string owner;
    if (r.is_class() && !e.open) {
      if (const MethodDecl* m = index_.find_method(r.name, e.name, e.argcount(), &owner)) {
        sem.owner = TypeRef::cls(owner);
        sem.type = m->ret;
      }
    } else if (r.is_class()) {
      // Arity still open: remember the receiver class as owner if the name exists there.
      auto named = index_.methods_named(r.name, e.name);
      if (!named.empty()) sem.owner = TypeRef::cls(named.front().second);
    }
    set(e.name_tok, sem);
    return sem.type;
  }

  TypeRef construct(Expr& e) {
    for (Expr& a : e.kids) expr(a);
    if (e.name.empty()) return TypeRef::unknown();
    const TypeRef t = type_of(TypeRef::parse(e.name));
    TokenSem sem;
    sem.kind = TokenSem::Kind::Ctor;
    sem.type = t;
    sem.argcount = static_cast<int>(e.kids.size());
    sem.arity_open = e.open;
    set(e.name_tok, sem);
    return t;
  }

  void set(std::size_t tok, TokenSem sem) {
    if (tok < sems_.size()) sems_[tok] = std::move(sem);
  }

  const ClassIndex& index_;
  std::vector<TokenSem>& sems_;
  std::vector<std::vector<Variable>> scopes_;
};

std::vector<std::optional<LiteralKind>> literal_kinds(const TokenStream& ts) {
  std::vector<std::optional<LiteralKind>> out;
  out.reserve(ts.tokens.size());
  for (const CodeToken& t : ts.tokens) out.push_back(t.literal_kind);
  return out;
}

}  // namespace

TypedProgram resolve_types(PartialProgram program, std::shared_ptr<const ClassIndex> index) {
  TypedProgram typed;
  typed.program = std::move(program);
  typed.index = std::move(index);
  typed.sems.assign(typed.program.stream.tokens.size(), TokenSem{});
  const auto kinds = literal_kinds(typed.program.stream);
  Resolver r(*typed.index, typed.sems);
  r.literal_kinds_ = &kinds;
  for (ClassAst& c : typed.program.classes) {
    r.cls = c.name;
    r.push();
    for (FieldAst& f : c.fields)
      if (f.init) r.expr(*f.init);
    r.pop();
    for (MethodAst& m : c.methods) r.method(m);
  }
  typed.expression_count = r.expressions;
  typed.unresolved_count = r.unresolved;
  return typed;
}

void resolve_statement(Stmt& stmt, const ScopeEnv& env, const ClassIndex& index,
                       std::vector<TokenSem>& sems, const TokenStream& stream) {
  const auto kinds = literal_kinds(stream);
  Resolver r(index, sems);
  r.literal_kinds_ = &kinds;
  r.cls = env.enclosing_class;
  r.push();
  for (const Variable& v : env.variables) r.declare(v.name, v.type);
  r.push();
  r.stmt(stmt);
}

// ---------------------------------------------------------------------------
// Environment

const Variable* ScopeEnv::find(std::string_view name) const {
  for (const Variable& v : variables)
    if (v.name == name) return &v;
  return nullptr;
}

const MethodAst* enclosing_method(const PartialProgram& program, std::size_t position,
                                  const ClassAst** cls) {
  for (const ClassAst& c : program.classes) {
    for (const MethodAst& m : c.methods) {
      if (m.body.range.contains(position)) {
        if (cls) *cls = &c;
        return &m;
      }
    }
  }
  return nullptr;
}

namespace {

class EnvWalker {
 public:
  EnvWalker(const ClassIndex& index, std::size_t pos) : index_(index), pos_(pos) {}

  std::vector<Variable> vars;

  TypeRef type_of(const TypeRef& t) const { return resolve_type(t, index_); }

  // `s` contains the position strictly after its first token.
  void inside(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Block:
        for (const Stmt& c : s.body) {
          if (c.range.first >= pos_) break;
          if (c.range.last < pos_) {
            if (c.kind == Stmt::Kind::VarDecl && !c.var_name.empty())
              vars.push_back({c.var_name, type_of(c.decl_type)});
          } else {
            inside(c);
          }
        }
        break;
      case Stmt::Kind::For: {
        for (const Stmt& i : s.for_parts->init)
          if (i.kind == Stmt::Kind::VarDecl && !i.var_name.empty() && pos_ > i.name_tok)
            vars.push_back({i.var_name, type_of(i.decl_type)});
        for (const Stmt& b : s.body)
          if (b.range.first < pos_ && pos_ <= b.range.last) inside(b);
        break;
      }
      case Stmt::Kind::If:
      case Stmt::Kind::While:
        for (const Stmt& b : s.body)
          if (b.range.first < pos_ && pos_ <= b.range.last) inside(b);
        break;
      default:
        break;
    }
  }

 private:
  const ClassIndex& index_;
  std::size_t pos_;
};

}  // namespace

ScopeEnv accessible_env(const TypedProgram& typed, std::size_t position) {
  const ClassAst* cls = nullptr;
  const MethodAst* m = enclosing_method(typed.program, position, &cls);
  if (!m) throw Error(ErrorCode::PositionOutsideMethod, "token " + std::to_string(position));
  ScopeEnv env;
  env.enclosing_class = cls->name;
  env.enclosing_method_return = resolve_type(m->ret, *typed.index);
  EnvWalker w(*typed.index, position);
  for (const Param& p : m->params) w.vars.push_back({p.name, w.type_of(p.type)});
  if (m->body.range.first < position) w.inside(m->body);
  // Innermost declaration wins.
  for (const Variable& v : w.vars) {
    auto it = std::find_if(env.variables.begin(), env.variables.end(),
                           [&](const Variable& x) { return x.name == v.name; });
    if (it != env.variables.end()) *it = v;
    else env.variables.push_back(v);
  }
  return env;
}

}  // namespace stmtc
