#include "stmtc/excode.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <set>
#include <utility>

#include "stmtc/error.hpp"

namespace stmtc {

namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 18> kOps = {{
    {"=", "ASSIGN"},  {".", "ACC"},        {"==", "equals"},  {"!=", "notEquals"}, {"<", "less"},
    {"<=", "lessEquals"}, {">", "greater"}, {">=", "greaterEquals"}, {"+", "plus"}, {"-", "minus"},
    {"*", "times"},   {"/", "divide"},     {"%", "remainder"}, {"&&", "and"},     {"||", "or"},
    {"!", "not"},     {"++", "inc"},       {"--", "dec"},
}};

constexpr std::array<std::pair<std::string_view, std::string_view>, 8> kSeps = {{
    {"(", "LP"}, {")", "RP"}, {"{", "LB"}, {"}", "RB"}, {"[", "LBRACK"}, {"]", "RBRACK"},
    {";", "SEMI"}, {",", "COMMA"},
}};

constexpr std::array<std::pair<std::string_view, std::string_view>, 3> kSpecials = {{
    {"null", "NULL"}, {"0", "ZERO"}, {"\"\"", "EMPTY"},
}};

template <std::size_t N>
std::string lookup(const std::array<std::pair<std::string_view, std::string_view>, N>& table,
                   std::string_view key, bool forward) {
  for (const auto& [a, b] : table) {
    if ((forward ? a : b) == key) return std::string(forward ? b : a);
  }
  return {};
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string_view> split_args(std::string_view inner) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= inner.size(); ++i) {
    if (i == inner.size() || inner[i] == ',') {
      parts.push_back(inner.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 0) return std::nullopt;
  return v;
}

}  // namespace

std::string op_name(std::string_view lexeme) { return lookup(kOps, lexeme, true); }
std::string op_lexeme(std::string_view name) { return lookup(kOps, name, false); }
std::string sep_name(std::string_view lexeme) { return lookup(kSeps, lexeme, true); }
std::string sep_lexeme(std::string_view name) { return lookup(kSeps, name, false); }

std::string ExcodeToken::render() const {
  switch (kind) {
    case Kind::Keyword:
    case Kind::Sep:
    case Kind::Special: return name;
    case Kind::Op: return "OP(" + name + ")";
    case Kind::Type: return "TYPE(" + type.render() + ")";
    case Kind::Var: return "VAR(" + type.render() + ")";
    case Kind::Lit: return "LIT(" + type.render() + ")";
    case Kind::Call:
      return "CALL(" + owner.render() + "," + name + "," + std::to_string(argcount) + "," +
             type.render() + ")";
    case Kind::CCall: return "CCALL(" + type.render() + "," + std::to_string(argcount) + ")";
    case Kind::Field: return "FIELD(" + owner.render() + "," + name + "," + type.render() + ")";
  }
  return {};
}

std::optional<ExcodeToken> ExcodeToken::parse(std::string_view text) {
  const auto lp = text.find('(');
  if (lp == std::string_view::npos) {
    if (text.empty()) return std::nullopt;
    if (!sep_lexeme(text).empty()) return sep(std::string(text));
    if (text == "NULL" || text == "ZERO" || text == "EMPTY") return special(std::string(text));
    for (char c : text)
      if (!std::isupper(static_cast<unsigned char>(c))) return std::nullopt;
    return keyword(std::string(text));
  }
  if (text.back() != ')') return std::nullopt;
  const std::string_view head = text.substr(0, lp);
  const std::string_view inner = text.substr(lp + 1, text.size() - lp - 2);
  const auto args = split_args(inner);
  auto type = [](std::string_view s) { return TypeRef::parse(s); };
  if (head == "OP" && args.size() == 1 && !op_lexeme(args[0]).empty()) return op(std::string(args[0]));
  if (head == "TYPE" && args.size() == 1) return type_tok(type(args[0]));
  if (head == "VAR" && args.size() == 1) return var(type(args[0]));
  if (head == "LIT" && args.size() == 1) return lit(type(args[0]));
  if (head == "CALL" && args.size() == 4) {
    const auto n = to_int(args[2]);
    if (!n || args[1].empty()) return std::nullopt;
    return call(type(args[0]), std::string(args[1]), *n, type(args[3]));
  }
  if (head == "CCALL" && args.size() == 2) {
    const auto n = to_int(args[1]);
    if (!n) return std::nullopt;
    return ccall(type(args[0]), *n);
  }
  if (head == "FIELD" && args.size() == 3 && !args[1].empty())
    return field(type(args[0]), std::string(args[1]), type(args[2]));
  return std::nullopt;
}

std::string render(const ExcodeSequence& seq) {
  std::string out;
  for (const ExcodeToken& t : seq) {
    if (!out.empty()) out += ' ';
    out += t.render();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Annotation

ExcodeToken annotate_token(const CodeToken& tok, const TokenSem& sem) {
  switch (sem.kind) {
    case TokenSem::Kind::TypeName: return ExcodeToken::type_tok(sem.type);
    case TokenSem::Kind::Variable:
    case TokenSem::Kind::DeclName: return ExcodeToken::var(sem.type);
    case TokenSem::Kind::Call: return ExcodeToken::call(sem.owner, tok.lexeme, sem.argcount, sem.type);
    case TokenSem::Kind::Field: return ExcodeToken::field(sem.owner, tok.lexeme, sem.type);
    case TokenSem::Kind::Ctor: return ExcodeToken::ccall(sem.type, sem.argcount);
    case TokenSem::Kind::Plain: break;
  }
  switch (tok.role) {
    case Role::Literal: {
      const LiteralKind k = tok.literal_kind.value_or(LiteralKind::Int);
      if (k == LiteralKind::Null) return ExcodeToken::special("NULL");
      if (k == LiteralKind::Int && tok.lexeme == "0") return ExcodeToken::special("ZERO");
      if (k == LiteralKind::String && tok.lexeme == "\"\"") return ExcodeToken::special("EMPTY");
      return ExcodeToken::lit(literal_type(k));
    }
    case Role::Keyword:
      if (is_primitive_type_keyword(tok.lexeme)) return ExcodeToken::type_tok(TypeRef::primitive(tok.lexeme));
      if (tok.lexeme == "String") return ExcodeToken::type_tok(TypeRef::string_type());
      return ExcodeToken::keyword(upper(tok.lexeme));
    case Role::Operator: return ExcodeToken::op(op_name(tok.lexeme));
    case Role::Separator: return ExcodeToken::sep(sep_name(tok.lexeme));
    case Role::Identifier: return ExcodeToken::var(TypeRef::unknown());
  }
  return ExcodeToken::var(TypeRef::unknown());
}

ExcodeSequence annotate(const TypedProgram& typed, TokRange range) {
  ExcodeSequence out;
  if (range.empty()) return out;
  out.reserve(range.size());
  for (std::size_t i = range.first; i <= range.last; ++i)
    out.push_back(annotate_token(typed.program.stream.tokens[i], typed.sems[i]));
  return out;
}

namespace {

// Readings of one token whose meaning the cut left open.
struct Slot {
  std::size_t tok;
  std::vector<ExcodeToken> options;
};

class SlotCollector {
 public:
  SlotCollector(const ScopeEnv& env, const ClassIndex& index, TokRange prefix)
      : env_(env), index_(index), prefix_(prefix) {}

  std::vector<Slot> slots;

  void stmt(const Stmt& s) {
    for (const Expr& e : s.exprs) expr(e);
    if (s.for_parts) {
      for (const Stmt& i : s.for_parts->init) stmt(i);
      if (s.for_parts->cond) expr(*s.for_parts->cond);
      for (const Expr& u : s.for_parts->update) expr(u);
    }
    for (const Stmt& b : s.body) stmt(b);
  }

 private:
  void expr(const Expr& e) {
    for (const Expr& k : e.kids) expr(k);
    if (!prefix_.contains(e.name_tok) || e.name.empty()) return;
    switch (e.kind) {
      case Expr::Kind::Call:
        if (e.open) add(e.name_tok, calls(receiver(e), e.name, e.argcount()));
        break;
      case Expr::Kind::New:
        if (e.open) add(e.name_tok, ctors(e.name, e.open && e.ambiguous ? 0 : e.kids.size()));
        break;
      case Expr::Kind::Name:
        if (e.ambiguous) add(e.name_tok, bare_name(e.name));
        break;
      case Expr::Kind::Field:
        if (e.ambiguous) add(e.name_tok, member(receiver(e), e.name));
        break;
      default:
        break;
    }
  }

  void add(std::size_t tok, std::vector<ExcodeToken> options) {
    if (!options.empty()) slots.push_back({tok, std::move(options)});
  }

  TypeRef receiver(const Expr& e) const {
    if (e.has_receiver) return e.kids.empty() ? TypeRef::unknown() : e.kids[0].type;
    return env_.enclosing_class.empty() ? TypeRef::unknown() : TypeRef::cls(env_.enclosing_class);
  }

  std::vector<ExcodeToken> calls(const TypeRef& recv, const std::string& name, std::size_t min_arity) const {
    std::vector<ExcodeToken> out;
    if (recv.is_class()) {
      for (const auto& [m, owner] : index_.methods_named(recv.name, name))
        if (m->params.size() >= min_arity)
          out.push_back(ExcodeToken::call(TypeRef::cls(owner), name, static_cast<int>(m->params.size()), m->ret));
    }
    if (out.empty() && !recv.is_class()) {
      for (std::size_t a = min_arity; a <= min_arity + 2; ++a)
        out.push_back(ExcodeToken::call(TypeRef::unknown(), name, static_cast<int>(a), TypeRef::unknown()));
    }
    return out;
  }

  std::vector<ExcodeToken> ctors(const std::string& cls, std::size_t min_arity) const {
    std::vector<ExcodeToken> out;
    const ClassInfo* ci = index_.find(cls);
    if (!ci) {
      for (std::size_t a = min_arity; a <= min_arity + 2; ++a)
        out.push_back(ExcodeToken::ccall(TypeRef::unknown(), static_cast<int>(a)));
      return out;
    }
    std::set<std::size_t> arities;
    for (const MethodDecl& c : ci->constructors) arities.insert(c.params.size());
    if (ci->constructors.empty()) arities.insert(0);
    for (std::size_t a : arities)
      if (a >= min_arity) out.push_back(ExcodeToken::ccall(TypeRef::cls(cls), static_cast<int>(a)));
    return out;
  }

  std::vector<ExcodeToken> member(const TypeRef& recv, const std::string& name) const {
    std::vector<ExcodeToken> out;
    std::string owner;
    if (recv.is_class()) {
      if (const FieldDecl* f = index_.find_field(recv.name, name, &owner))
        out.push_back(ExcodeToken::field(TypeRef::cls(owner), name, f->type));
      auto c = calls(recv, name, 0);
      out.insert(out.end(), c.begin(), c.end());
    }
    if (out.empty()) {
      out.push_back(ExcodeToken::field(TypeRef::unknown(), name, TypeRef::unknown()));
      auto c = calls(TypeRef::unknown(), name, 0);
      out.insert(out.end(), c.begin(), c.end());
    }
    return out;
  }

  std::vector<ExcodeToken> bare_name(const std::string& name) const {
    std::vector<ExcodeToken> out;
    if (const Variable* v = env_.find(name)) out.push_back(ExcodeToken::var(v->type));
    if (!env_.enclosing_class.empty()) {
      std::string owner;
      if (!env_.find(name)) {
        if (const FieldDecl* f = index_.find_field(env_.enclosing_class, name, &owner))
          out.push_back(ExcodeToken::field(TypeRef::cls(owner), name, f->type));
      }
      for (const auto& [m, o] : index_.methods_named(env_.enclosing_class, name))
        out.push_back(ExcodeToken::call(TypeRef::cls(o), name, static_cast<int>(m->params.size()), m->ret));
    }
    if (index_.contains(name)) out.push_back(ExcodeToken::type_tok(TypeRef::cls(name)));
    if (out.empty()) out.push_back(ExcodeToken::var(TypeRef::unknown()));
    return out;
  }

  const ScopeEnv& env_;
  const ClassIndex& index_;
  TokRange prefix_;
};

}  // namespace

std::vector<ExcodeSequence> annotate_prefix(const TokenStream& stream, TokRange prefix,
                                            const ScopeEnv& env, const ClassIndex& index) {
  if (prefix.empty()) return {ExcodeSequence{}};
  std::optional<Stmt> stmt = parse_statement_prefix(stream, prefix);
  if (!stmt) return {};
  std::vector<TokenSem> sems(stream.tokens.size());
  resolve_statement(*stmt, env, index, sems, stream);

  ExcodeSequence base;
  base.reserve(prefix.size());
  for (std::size_t i = prefix.first; i <= prefix.last; ++i)
    base.push_back(annotate_token(stream.tokens[i], sems[i]));

  SlotCollector collector(env, index, prefix);
  collector.stmt(*stmt);

  std::vector<ExcodeSequence> out{base};
  for (const Slot& slot : collector.slots) {
    std::vector<ExcodeSequence> next;
    next.reserve(out.size() * slot.options.size());
    for (const ExcodeSequence& seq : out) {
      for (const ExcodeToken& opt : slot.options) {
        ExcodeSequence s = seq;
        s[slot.tok - prefix.first] = opt;
        next.push_back(std::move(s));
      }
    }
    out = std::move(next);
  }
  std::sort(out.begin(), out.end(),
            [](const ExcodeSequence& a, const ExcodeSequence& b) { return render(a) < render(b); });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const ExcodeSequence& a, const ExcodeSequence& b) { return render(a) == render(b); }),
            out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Concretization

std::string ConcreteToken::render() const {
  switch (kind) {
    case Kind::Text: return text;
    case Kind::LitPlaceholder: return "<lit:" + text + ">";
    case Kind::NewVar: return "<newvar>";
  }
  return text;
}

std::string render(const CodeSequence& seq) {
  std::string out;
  for (const ConcreteToken& t : seq) {
    if (!out.empty()) out += ' ';
    out += t.render();
  }
  return out;
}

std::vector<ConcreteToken> concretize_token(const ExcodeToken& e, const ScopeEnv& env,
                                            const ClassIndex& index, bool decl_position) {
  using K = ExcodeToken::Kind;
  auto empty = [&]() -> std::vector<ConcreteToken> {
    throw Error(ErrorCode::EmptyConcretization, e.render());
  };
  switch (e.kind) {
    case K::Var: {
      if (decl_position) return {ConcreteToken::newvar()};
      std::vector<ConcreteToken> out;
      for (const Variable& v : env.variables) {
        if (e.type.is_unknown() || v.type == e.type || is_subtype(v.type, e.type, index))
          out.push_back(ConcreteToken::lexeme(v.name));
      }
      if (out.empty()) return empty();
      std::sort(out.begin(), out.end(),
                [](const ConcreteToken& a, const ConcreteToken& b) { return a.text < b.text; });
      return out;
    }
    case K::Lit: return {ConcreteToken::lit(e.type.render())};
    case K::Special: {
      if (e.name == "NULL") return {ConcreteToken::lexeme("null")};
      if (e.name == "ZERO") return {ConcreteToken::lexeme("0")};
      return {ConcreteToken::lexeme("\"\"")};
    }
    case K::Keyword: return {ConcreteToken::lexeme(lower(e.name))};
    case K::Op: return {ConcreteToken::lexeme(op_lexeme(e.name))};
    case K::Sep: return {ConcreteToken::lexeme(sep_lexeme(e.name))};
    case K::Type:
    case K::CCall:
      if (e.type.is_unknown()) return empty();
      return {ConcreteToken::lexeme(e.type.render())};
    case K::Call:
    case K::Field: return {ConcreteToken::lexeme(e.name)};
  }
  return empty();
}

std::vector<CodeSequence> concretize_sequence(const ExcodeSequence& seq, const ScopeEnv& env,
                                              const ClassIndex& index, const ExcodeToken* previous) {
  std::vector<CodeSequence> out{CodeSequence{}};
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const ExcodeToken* prev = i > 0 ? &seq[i - 1] : previous;
    const bool decl = seq[i].kind == ExcodeToken::Kind::Var && prev && prev->kind == ExcodeToken::Kind::Type;
    std::vector<ConcreteToken> options;
    try {
      options = concretize_token(seq[i], env, index, decl);
    } catch (const Error&) {
      return {};
    }
    std::vector<CodeSequence> next;
    next.reserve(out.size() * options.size());
    for (const CodeSequence& s : out) {
      for (const ConcreteToken& t : options) {
        CodeSequence c = s;
        c.push_back(t);
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace stmtc
