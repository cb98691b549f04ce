#include "stmtc/typecheck.hpp"

#include <string_view>

namespace stmtc {

namespace {

using K = XNode::Kind;

const TypeRef kBool = TypeRef::primitive("boolean");
// Stands for "any numeric type" in diagnostics only.
const TypeRef kNum = TypeRef::primitive("num");

bool is_compare(std::string_view op) {
  return op == "equals" || op == "notEquals" || op == "less" || op == "lessEquals" || op == "greater" ||
         op == "greaterEquals";
}

class Checker {
 public:
  Checker(const ExcodeSequence& s, const TypeContext& ctx) : s_(s), ctx_(ctx) {}

  std::optional<TypeError> error;

  TypeRef expr(const XNode& n) {
    switch (n.kind) {
      case K::Missing: return TypeRef::unknown();
      case K::Lit: return literal(s_[n.tok]);
      case K::Var: return s_[n.tok].type;
      case K::This: return ctx_.enclosing_class.empty() ? TypeRef::unknown() : TypeRef::cls(ctx_.enclosing_class);
      case K::Paren: return n.kids.empty() ? TypeRef::unknown() : expr(n.kids[0]);
      case K::Field: return field(n);
      case K::Call: return call(n);
      case K::New: return construct(n);
      case K::Prefix: return prefix(n);
      case K::Postfix: {
        const TypeRef t = expr(n.kids[0]);
        if (t.is_known() && !t.is_numeric()) fail(5, kNum, t, n.kids[0].first);
        return t.is_numeric() ? t : TypeRef::unknown();
      }
      case K::Binary: return binary(n);
      case K::Assign: {
        const TypeRef t1 = expr(n.kids[0]);
        const TypeRef t2 = expr(n.kids[1]);
        if (t1.is_known() && t2.is_known()) {
          if (!is_subtype(t2, t1, index())) fail(3, t1, t2, n.kids[1].first);
          return t1;
        }
        return t1.is_known() ? t1 : t2;
      }
      default:
        stmt(n);
        return TypeRef::void_type();
    }
  }

  void stmt(const XNode& n) {
    switch (n.kind) {
      case K::VarDecl: decl(n); break;
      case K::ExprStmt:
        for (const XNode& k : n.kids) expr(k);
        break;
      case K::If:
      case K::While:
        if (!n.kids.empty()) condition(n.kids[0]);
        break;
      case K::For: {
        std::size_t i = 0;
        for (; i < n.for_init && i < n.kids.size(); ++i) {
          if (n.kids[i].kind == K::VarDecl || n.kids[i].kind == K::ExprStmt) stmt(n.kids[i]);
          else expr(n.kids[i]);
        }
        if (n.for_has_cond && i < n.kids.size()) condition(n.kids[i++]);
        for (; i < n.kids.size(); ++i) expr(n.kids[i]);
        break;
      }
      case K::Return: ret(n); break;
      default: expr(n); break;
    }
  }

 private:
  const ClassIndex& index() const { return *ctx_.index; }

  void fail(int rule, const TypeRef& expected, const TypeRef& found, std::size_t at) {
    if (!error) error = TypeError{rule, expected, found, at};
  }

  static bool fits(const TypeRef& sub, const TypeRef& sup, const ClassIndex& idx) {
    return sub.is_unknown() || sup.is_unknown() || is_subtype(sub, sup, idx);
  }

  static TypeRef literal(const ExcodeToken& t) {
    if (t.kind == ExcodeToken::Kind::Lit) return t.type;
    if (t.name == "NULL") return TypeRef::null_type();
    if (t.name == "ZERO") return TypeRef::primitive("int");
    return TypeRef::string_type();
  }

  TypeRef receiver(const XNode& n) {
    if (n.has_receiver) return expr(n.kids[0]);
    return ctx_.enclosing_class.empty() ? TypeRef::unknown() : TypeRef::cls(ctx_.enclosing_class);
  }

  TypeRef field(const XNode& n) {
    const TypeRef r = receiver(n);
    if (n.open) return TypeRef::unknown();  // `e.` with the member still to come
    const ExcodeToken& t = s_[n.tok];
    if (!fits(r, t.owner, index())) fail(10, t.owner, r, n.has_receiver ? n.kids[0].first : n.tok);
    return t.type;
  }

  void check_args(const XNode& n, const std::vector<TypeRef>* params, int rule) {
    for (std::size_t i = n.arg_begin(); i < n.kids.size(); ++i) {
      const TypeRef a = expr(n.kids[i]);
      const std::size_t k = i - n.arg_begin();
      if (params && k < params->size() && !fits(a, (*params)[k], index()))
        fail(rule, (*params)[k], a, n.kids[i].first);
    }
  }

  TypeRef call(const XNode& n) {
    const TypeRef r = receiver(n);
    const ExcodeToken& t = s_[n.tok];
    if (!fits(r, t.owner, index())) fail(8, t.owner, r, n.has_receiver ? n.kids[0].first : n.tok);
    const MethodDecl* decl = nullptr;
    if (t.owner.is_class()) decl = index().find_method(t.owner.name, t.name, static_cast<std::size_t>(t.argcount));
    check_args(n, decl ? &decl->params : nullptr, 8);
    return t.type;
  }

  TypeRef construct(const XNode& n) {
    if (n.tok == n.first && s_[n.tok].kind != ExcodeToken::Kind::CCall) return TypeRef::unknown();  // `new` cut
    const ExcodeToken& t = s_[n.tok];
    const MethodDecl* decl = nullptr;
    if (t.type.is_class()) {
      if (const ClassInfo* ci = index().find(t.type.name)) {
        for (const MethodDecl& c : ci->constructors)
          if (c.params.size() == static_cast<std::size_t>(t.argcount)) decl = &c;
      }
    }
    check_args(n, decl ? &decl->params : nullptr, 9);
    return t.type;
  }

  TypeRef prefix(const XNode& n) {
    const TypeRef t = expr(n.kids[0]);
    if (s_[n.tok].name == "not") {
      if (t.is_known() && !t.is_boolean()) fail(4, kBool, t, n.kids[0].first);
      return kBool;
    }
    if (t.is_known() && !t.is_numeric()) fail(4, kNum, t, n.kids[0].first);
    return t.is_numeric() ? t : TypeRef::unknown();
  }

  TypeRef binary(const XNode& n) {
    const TypeRef t1 = expr(n.kids[0]);
    const TypeRef t2 = expr(n.kids[1]);
    const std::string& op = s_[n.tok].name;
    const ClassIndex& idx = index();
    if (is_compare(op)) {
      if (t1.is_known() && t2.is_known() && !is_subtype(t1, t2, idx) && !is_subtype(t2, t1, idx))
        fail(6, t1, t2, n.kids[1].first);
      return kBool;
    }
    // and/or want booleans; arithmetic wants numbers (no String concatenation).
    const bool logical = op == "and" || op == "or";
    auto operand_ok = [&](const TypeRef& t) { return t.is_unknown() || (logical ? t.is_boolean() : t.is_numeric()); };
    if (!operand_ok(t1)) fail(7, logical ? kBool : kNum, t1, n.kids[0].first);
    if (!operand_ok(t2)) fail(7, logical ? kBool : kNum, t2, n.kids[1].first);
    if (t1.is_known() && t2.is_known()) {
      if (is_subtype(t1, t2, idx)) return t2;
      if (is_subtype(t2, t1, idx)) return t1;
    }
    if (t1.is_known()) return t1;
    return t2;
  }

  void condition(const XNode& c) {
    const TypeRef t = expr(c);
    if (c.kind != K::Missing && t.is_known() && !t.is_boolean()) fail(12, kBool, t, c.first);
  }

  void decl(const XNode& n) {
    const TypeRef declared = s_[n.tok].type;
    TypeRef var = declared;
    if (!n.kids.empty()) {
      var = s_[n.kids[0].tok].type;
      if (declared.is_known() && var.is_known() && !(declared == var)) fail(11, declared, var, n.kids[0].tok);
      if (var.is_unknown()) var = declared;
    }
    if (n.kids.size() > 1) {
      const TypeRef init = expr(n.kids[1]);
      if (!fits(init, var, index())) fail(11, var, init, n.kids[1].first);
    }
  }

  void ret(const XNode& n) {
    const TypeRef want = ctx_.enclosing_method_return;
    if (n.kids.empty()) {
      if (!n.open && want.is_known() && want.kind != TypeRef::Kind::Void) fail(14, want, TypeRef::void_type(), n.tok);
      return;
    }
    const TypeRef got = expr(n.kids[0]);
    if (n.kids[0].kind == K::Missing || want.is_unknown() || got.is_unknown()) return;
    if (want.kind == TypeRef::Kind::Void || !is_subtype(got, want, index())) fail(14, want, got, n.kids[0].first);
  }

  const ExcodeSequence& s_;
  const TypeContext& ctx_;
};

}  // namespace

std::string TypeError::message() const {
  return "RULE" + std::to_string(rule) + ": expected " + expected.render() + ", found " + found.render() +
         " at excode index " + std::to_string(index);
}

TypeResult infer_type(const ExcodeSequence& seq, const TypeContext& ctx) {
  TypeResult r;
  XParse p = parse_excode(seq);
  if (p.status == XParse::Status::Complete) {
    Checker c(seq, ctx);
    c.stmt(p.stmt);
    r.error = c.error;
    r.type = TypeRef::void_type();
    return r;
  }
  if (auto e = parse_excode_expression(seq)) {
    Checker c(seq, ctx);
    r.type = c.expr(*e);
    r.error = c.error;
    if (r.error) r.type = TypeRef::unknown();
    return r;
  }
  r.error = TypeError{0, TypeRef::unknown(), TypeRef::unknown(), p.error_at};
  return r;
}

TypeRef infer_node_type(const XNode& node, const ExcodeSequence& seq, const TypeContext& ctx) {
  Checker c(seq, ctx);
  const TypeRef t = c.expr(node);
  return c.error ? TypeRef::unknown() : t;
}

bool check_template(const ExcodeSequence& context, const ExcodeSequence& templ, const TypeContext& ctx,
                    TypeError* error) {
  ExcodeSequence full = context;
  full.insert(full.end(), templ.begin(), templ.end());
  XParse p = parse_excode(full);
  if (p.status == XParse::Status::Invalid) {
    if (error) *error = TypeError{0, TypeRef::unknown(), TypeRef::unknown(), p.error_at};
    return false;
  }
  Checker c(full, ctx);
  c.stmt(p.stmt);
  if (c.error && error) *error = *c.error;
  return !c.error.has_value();
}

}  // namespace stmtc
