// Recursive descent over excode terminals. The shape follows the code
// parser in parser.cpp, but token classes are explicit here: a CALL must be
// followed by exactly `argcount` arguments, only FIELD/CALL may follow ACC,
// and TYPE only starts a declaration.

#include <string_view>

#include "stmtc/typecheck.hpp"

namespace stmtc {

namespace {

using K = ExcodeToken::Kind;

bool is_compare(std::string_view op) {
  return op == "equals" || op == "notEquals" || op == "less" || op == "lessEquals" || op == "greater" ||
         op == "greaterEquals";
}

int precedence(std::string_view op) {
  if (op == "or") return 1;
  if (op == "and") return 2;
  if (op == "equals" || op == "notEquals") return 3;
  if (is_compare(op)) return 4;
  if (op == "plus" || op == "minus") return 5;
  if (op == "times" || op == "divide" || op == "remainder") return 6;
  return 0;
}

bool is_prefix_op(std::string_view op) {
  return op == "not" || op == "minus" || op == "plus" || op == "inc" || op == "dec";
}

class XParser {
 public:
  XParser(const ExcodeSequence& s, bool prefix, XParse* out) : s_(s), prefix_(prefix), out_(out) {}

  bool ended = false;
  bool failed = false;
  std::size_t pos = 0;
  std::size_t error_at = 0;

  XNode statement() {
    XNode st;
    st.first = pos;
    if (cut()) {
      st.kind = XNode::Kind::ExprStmt;
      st.kids.push_back(missing());
      return st;
    }
    if (kw("IF") || kw("WHILE")) {
      st.kind = kw("IF") ? XNode::Kind::If : XNode::Kind::While;
      st.tok = pos++;
      if (cut()) return st;
      expect_sep("LP");
      st.kids.push_back(expr());
      if (cut() || incomplete(st.kids.back())) return st;
      expect_sep("RP");
      ended = true;
      return st;
    }
    if (kw("FOR")) return for_header();
    if (kw("RETURN")) {
      st.kind = XNode::Kind::Return;
      st.tok = pos++;
      st.open = true;
      if (cut()) return st;
      if (!sep("SEMI")) {
        st.kids.push_back(expr());
        if (cut() || incomplete(st.kids.back())) return st;
      }
      expect_sep("SEMI");
      st.open = false;
      ended = true;
      return st;
    }
    if (kind(K::Type)) {
      st = decl();
      if (cut() || st.open) return st;
      expect_sep("SEMI");
      ended = true;
      return st;
    }
    st.kind = XNode::Kind::ExprStmt;
    st.kids.push_back(expr());
    if (cut() || incomplete(st.kids.back())) return st;
    expect_sep("SEMI");
    ended = true;
    return st;
  }

  XNode expr() { return assignment(); }

  bool at_end() const { return failed || pos >= s_.size(); }

 private:
  // TYPE VAR [= e]; `open` when the prefix ends inside it.
  XNode decl() {
    XNode d;
    d.kind = XNode::Kind::VarDecl;
    d.first = d.tok = pos++;
    d.open = true;
    if (cut()) {
      if (out_) out_->decl_type = s_[d.tok].type;
      return d;
    }
    if (!kind(K::Var)) {
      reject();
      return d;
    }
    XNode v;
    v.kind = XNode::Kind::Var;
    v.first = v.tok = pos++;
    d.kids.push_back(std::move(v));
    if (cut()) return d;
    if (op("ASSIGN")) {
      ++pos;
      d.kids.push_back(expr());
      if (cut() || incomplete(d.kids.back())) return d;
    }
    d.open = false;
    return d;
  }

  XNode for_header() {
    XNode f;
    f.kind = XNode::Kind::For;
    f.first = f.tok = pos++;
    if (cut()) return f;
    expect_sep("LP");
    if (cut()) return f;
    if (!sep("SEMI")) {
      if (kind(K::Type)) {
        f.kids.push_back(decl());
        ++f.for_init;
        if (cut() || f.kids.back().open) return f;
      } else {
        for (;;) {
          XNode e;
          e.kind = XNode::Kind::ExprStmt;
          e.first = pos;
          e.kids.push_back(expr());
          const bool inc = incomplete(e.kids.back());
          f.kids.push_back(std::move(e));
          ++f.for_init;
          if (inc || cut()) return f;
          if (!sep("COMMA")) break;
          ++pos;
        }
      }
    }
    expect_sep("SEMI");
    if (cut()) return f;
    if (!sep("SEMI")) {
      f.kids.push_back(expr());
      f.for_has_cond = true;
      if (cut() || incomplete(f.kids.back())) return f;
    }
    expect_sep("SEMI");
    if (cut()) return f;
    if (!sep("RP")) {
      for (;;) {
        f.kids.push_back(expr());
        if (cut() || incomplete(f.kids.back())) return f;
        if (!sep("COMMA")) break;
        ++pos;
      }
    }
    expect_sep("RP");
    ended = true;
    return f;
  }

  XNode assignment() {
    XNode lhs = binary(0);
    if (!at_end() && !incomplete(lhs) && op("ASSIGN")) {
      if (!lvalue(lhs)) reject();
      XNode a;
      a.kind = XNode::Kind::Assign;
      a.first = lhs.first;
      a.tok = pos++;
      a.kids.push_back(std::move(lhs));
      a.kids.push_back(assignment());
      return a;
    }
    return lhs;
  }

  static bool lvalue(const XNode& n) {
    if (n.kind == XNode::Kind::Var || n.kind == XNode::Kind::Field) return true;
    return n.kind == XNode::Kind::Paren && !n.kids.empty() && lvalue(n.kids[0]);
  }

  XNode binary(int min_prec) {
    XNode lhs = unary();
    for (;;) {
      if (at_end() || incomplete(lhs) || s_[pos].kind != K::Op) return lhs;
      const int prec = precedence(s_[pos].name);
      if (prec == 0 || prec <= min_prec) return lhs;
      XNode b;
      b.kind = XNode::Kind::Binary;
      b.first = lhs.first;
      b.tok = pos++;
      b.kids.push_back(std::move(lhs));
      b.kids.push_back(binary(prec));
      lhs = std::move(b);
    }
  }

  XNode unary() {
    if (cut()) return missing();
    if (at_end()) return rejected();
    if (s_[pos].kind == K::Op && is_prefix_op(s_[pos].name)) {
      XNode u;
      u.kind = XNode::Kind::Prefix;
      u.first = u.tok = pos++;
      u.kids.push_back(unary());
      const std::string& name = s_[u.tok].name;
      if (name == "inc" || name == "dec") {
        // no extension turns a prefix or postfix operand into a variable
        const XNode::Kind k = u.kids[0].kind;
        if (k == XNode::Kind::Prefix || k == XNode::Kind::Postfix) reject();
        // any other complete operand is fatal only once nothing can extend it
        if (!at_end() && !incomplete(u.kids[0]) && !lvalue(u.kids[0])) reject();
      }
      return u;
    }
    return postfix();
  }

  XNode postfix() {
    XNode e = primary();
    while (!at_end() && !incomplete(e) && op("ACC")) {
      const std::size_t acc = pos++;
      if (cut()) {
        if (out_) out_->member_receiver = e;
        XNode f;
        f.kind = XNode::Kind::Field;
        f.has_receiver = true;
        f.open = true;
        f.first = e.first;
        f.tok = acc;
        f.kids.push_back(std::move(e));
        return f;
      }
      XNode m;
      m.first = e.first;
      m.has_receiver = true;
      m.kids.push_back(std::move(e));
      if (kind(K::Field)) {
        m.kind = XNode::Kind::Field;
        m.tok = pos++;
      } else if (kind(K::Call)) {
        m.kind = XNode::Kind::Call;
        m.tok = pos++;
        args(m, s_[m.tok].argcount);
      } else {
        reject();
      }
      e = std::move(m);
    }
    if (!at_end() && !incomplete(e) && (op("inc") || op("dec"))) {
      if (!lvalue(e)) reject();
      XNode p;
      p.kind = XNode::Kind::Postfix;
      p.first = e.first;
      p.tok = pos++;
      p.kids.push_back(std::move(e));
      return p;
    }
    return e;
  }

  void args(XNode& call, int argcount) {
    if (cut()) {
      call.open = true;
      return;
    }
    expect_sep("LP");
    for (int i = 0; i < argcount; ++i) {
      if (cut()) {
        call.open = true;
        return;
      }
      call.kids.push_back(expr());
      if (cut() || incomplete(call.kids.back())) {
        call.open = true;
        return;
      }
      if (i + 1 < argcount) expect_sep("COMMA");
    }
    if (cut()) {
      call.open = true;
      return;
    }
    expect_sep("RP");
  }

  XNode primary() {
    if (cut()) return missing();
    if (at_end()) return rejected();
    const ExcodeToken& t = s_[pos];
    XNode e;
    e.first = e.tok = pos;
    switch (t.kind) {
      case K::Lit:
      case K::Special:
        e.kind = XNode::Kind::Lit;
        ++pos;
        return e;
      case K::Var:
        e.kind = XNode::Kind::Var;
        ++pos;
        return e;
      case K::Field:
        e.kind = XNode::Kind::Field;
        ++pos;
        return e;
      case K::Call:
        e.kind = XNode::Kind::Call;
        ++pos;
        args(e, t.argcount);
        return e;
      case K::Keyword:
        if (t.name == "THIS") {
          e.kind = XNode::Kind::This;
          ++pos;
          return e;
        }
        if (t.name == "NEW") {
          e.kind = XNode::Kind::New;
          ++pos;
          if (cut()) {
            e.open = true;
            return e;
          }
          if (!kind(K::CCall)) return rejected();
          e.tok = pos++;
          args(e, s_[e.tok].argcount);
          return e;
        }
        return rejected();
      case K::Sep:
        if (t.name == "LP") {
          e.kind = XNode::Kind::Paren;
          ++pos;
          e.kids.push_back(expr());
          if (cut() || incomplete(e.kids.back())) {
            e.open = true;
            return e;
          }
          expect_sep("RP");
          return e;
        }
        return rejected();
      default:
        return rejected();
    }
  }

  static XNode missing() { return XNode{}; }
  XNode rejected() {
    reject();
    return missing();
  }

  static bool incomplete(const XNode& n) {
    if (n.kind == XNode::Kind::Missing || n.open) return true;
    switch (n.kind) {
      case XNode::Kind::Prefix:
      case XNode::Kind::Binary:
      case XNode::Kind::Assign:
        return incomplete(n.kids.back());
      default:
        return false;
    }
  }

  bool cut() const { return failed || (prefix_ && pos >= s_.size()); }
  bool kind(K k) const { return !at_end() && s_[pos].kind == k; }
  bool kw(std::string_view n) const { return kind(K::Keyword) && s_[pos].name == n; }
  bool op(std::string_view n) const { return kind(K::Op) && s_[pos].name == n; }
  bool sep(std::string_view n) const { return kind(K::Sep) && s_[pos].name == n; }
  void expect_sep(std::string_view n) {
    if (!sep(n)) reject();
    ++pos;
  }
  // After a rejection the parser behaves as if the input were cut, so every
  // routine unwinds through its early returns.
  void reject() {
    if (!failed) error_at = pos;
    failed = true;
  }

  const ExcodeSequence& s_;
  bool prefix_;
  XParse* out_;
};

}  // namespace

XParse parse_excode(const ExcodeSequence& seq) {
  XParse out;
  XParser p(seq, true, &out);
  out.stmt = p.statement();
  if (p.failed || p.pos < seq.size()) {
    out.status = XParse::Status::Invalid;
    out.error_at = p.failed ? p.error_at : p.pos;
    out.member_receiver.reset();
    out.decl_type.reset();
    return out;
  }
  out.status = p.ended ? XParse::Status::Complete : XParse::Status::Viable;
  return out;
}

std::optional<XNode> parse_excode_expression(const ExcodeSequence& seq) {
  XParser p(seq, false, nullptr);
  XNode e = p.expr();
  if (p.failed || p.pos < seq.size()) return std::nullopt;
  return e;
}

std::string syntax_class(const ExcodeToken& t) {
  switch (t.kind) {
    case K::Keyword: return "K:" + t.name;
    case K::Op: return "O:" + t.name;
    case K::Sep: return "S:" + t.name;
    case K::Type: return "T";
    case K::Var: return "V";
    case K::Lit:
    case K::Special: return "L";
    case K::Field: return "F";
    case K::Call: return "C" + std::to_string(t.argcount);
    case K::CCall: return "N" + std::to_string(t.argcount);
  }
  return "?";
}

ExcodeToken class_representative(const std::string& cls) {
  const TypeRef unk = TypeRef::unknown();
  if (cls.rfind("K:", 0) == 0) return ExcodeToken::keyword(cls.substr(2));
  if (cls.rfind("O:", 0) == 0) return ExcodeToken::op(cls.substr(2));
  if (cls.rfind("S:", 0) == 0) return ExcodeToken::sep(cls.substr(2));
  if (cls == "T") return ExcodeToken::type_tok(unk);
  if (cls == "V") return ExcodeToken::var(unk);
  if (cls == "L") return ExcodeToken::lit(TypeRef::primitive("int"));
  if (cls == "F") return ExcodeToken::field(unk, "f", unk);
  if (cls[0] == 'C') return ExcodeToken::call(unk, "m", std::stoi(cls.substr(1)), unk);
  return ExcodeToken::ccall(unk, std::stoi(cls.substr(1)));
}

}  // namespace stmtc
