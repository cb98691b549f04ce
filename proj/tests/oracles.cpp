#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace stmtc::oracle {

namespace {

using EK = ExcodeToken::Kind;
using Syms = std::vector<std::string>;

constexpr int kMaxArgs = 3;

}  // namespace

std::string terminal(const ExcodeToken& t) {
  switch (t.kind) {
    case EK::Keyword:
    case EK::Sep: return t.name;
    case EK::Op: return "op:" + t.name;
    case EK::Type: return "TYPE";
    case EK::Var: return "VAR";
    case EK::Lit:
    case EK::Special: return "LIT";
    case EK::Field: return "FIELD";
    case EK::Call: return "CALL" + std::to_string(t.argcount);
    case EK::CCall: return "CCALL" + std::to_string(t.argcount);
  }
  return "?";
}

Grammar::Grammar() {
  add("S", {"Stmt"});
  add("Stmt", {"IF", "LP", "Expr", "RP"});
  add("Stmt", {"WHILE", "LP", "Expr", "RP"});
  add("Stmt", {"FOR", "LP", "Init", "SEMI", "Cond", "SEMI", "Update", "RP"});
  add("Stmt", {"RETURN", "SEMI"});
  add("Stmt", {"RETURN", "Expr", "SEMI"});
  add("Stmt", {"Decl", "SEMI"});
  add("Stmt", {"Expr", "SEMI"});
  add("Init", {});
  add("Init", {"Decl"});
  add("Init", {"List"});
  add("Cond", {});
  add("Cond", {"Expr"});
  add("Update", {});
  add("Update", {"List"});
  add("List", {"Expr"});
  add("List", {"List", "COMMA", "Expr"});
  add("Decl", {"TYPE", "VAR"});
  add("Decl", {"TYPE", "VAR", "op:ASSIGN", "Expr"});

  add("Expr", {"Assign"});
  add("Assign", {"LV", "op:ASSIGN", "Assign"});
  add("Assign", {"Or"});
  add("Or", {"Or", "op:or", "And"});
  add("Or", {"And"});
  add("And", {"And", "op:and", "Eq"});
  add("And", {"Eq"});
  for (const char* o : {"op:equals", "op:notEquals"}) add("Eq", {"Eq", o, "Rel"});
  add("Eq", {"Rel"});
  for (const char* o : {"op:less", "op:lessEquals", "op:greater", "op:greaterEquals"}) add("Rel", {"Rel", o, "Add"});
  add("Rel", {"Add"});
  for (const char* o : {"op:plus", "op:minus"}) add("Add", {"Add", o, "Mul"});
  add("Add", {"Mul"});
  for (const char* o : {"op:times", "op:divide", "op:remainder"}) add("Mul", {"Mul", o, "Unary"});
  add("Mul", {"Unary"});
  for (const char* o : {"op:not", "op:minus", "op:plus"}) add("Unary", {o, "Unary"});
  for (const char* o : {"op:inc", "op:dec"}) {
    add("Unary", {o, "LV"});
    add("Unary", {"LV", o});
  }
  add("Unary", {"Chain"});
  // chains of member accesses; a variable is anything that ends in a field
  add("Chain", {"Primary"});
  add("Chain", {"Chain", "op:ACC", "FIELD"});
  add("LV", {"VAR"});
  add("LV", {"FIELD"});
  add("LV", {"Chain", "op:ACC", "FIELD"});
  add("LV", {"LP", "LV", "RP"});
  for (const char* p : {"LIT", "VAR", "FIELD", "THIS"}) add("Primary", {p});
  add("Primary", {"LP", "Expr", "RP"});
  for (int n = 0; n <= kMaxArgs; ++n) {
    const std::string args = "Args" + std::to_string(n);
    Syms rhs = {"LP"};
    for (int i = 0; i < n; ++i) {
      if (i) rhs.push_back("COMMA");
      rhs.push_back("Expr");
    }
    rhs.push_back("RP");
    add(args, rhs);
    add("Primary", {"CALL" + std::to_string(n), args});
    add("Primary", {"NEW", "CCALL" + std::to_string(n), args});
    add("Chain", {"Chain", "op:ACC", "CALL" + std::to_string(n), args});
  }

  for (bool grew = true; grew;) {
    grew = false;
    for (const Rule& r : rules_)
      if (!nullable_.contains(r.lhs) &&
          std::all_of(r.rhs.begin(), r.rhs.end(), [&](const std::string& s) { return nullable_.contains(s); })) {
        nullable_.insert(r.lhs);
        grew = true;
      }
  }
}

void Grammar::add(std::string lhs, std::vector<std::string> rhs) {
  by_lhs_[lhs].push_back(rules_.size());
  rules_.push_back({std::move(lhs), std::move(rhs)});
}

Recognizer::Recognizer(const Grammar& g) : g_(g) {
  chart_.emplace_back();
  for (std::size_t r : g_.productions("S")) chart_[0].insert({r, 0, 0});
  close(0);
}

void Recognizer::close(std::size_t k) {
  std::vector<Item> work(chart_[k].begin(), chart_[k].end());
  auto add = [&](const Item& it) {
    if (chart_[k].insert(it).second) work.push_back(it);
  };
  while (!work.empty()) {
    const Item it = work.back();
    work.pop_back();
    const auto& rhs = g_.rules()[it.rule].rhs;
    if (it.dot == rhs.size()) {
      const std::string& lhs = g_.rules()[it.rule].lhs;
      const Set origin = chart_[it.origin];  // copy: chart_[k] may be the same set
      for (const Item& p : origin) {
        const auto& prhs = g_.rules()[p.rule].rhs;
        if (p.dot < prhs.size() && prhs[p.dot] == lhs) add({p.rule, p.dot + 1, p.origin});
      }
      continue;
    }
    const std::string& next = rhs[it.dot];
    if (!g_.nonterminal(next)) continue;
    for (std::size_t r : g_.productions(next)) add({r, 0, k});
    if (g_.nullable(next)) add({it.rule, it.dot + 1, it.origin});
  }
}

bool Recognizer::push(const std::string& terminal) {
  Set next;
  for (const Item& it : chart_.back()) {
    const auto& rhs = g_.rules()[it.rule].rhs;
    if (it.dot < rhs.size() && rhs[it.dot] == terminal) next.insert({it.rule, it.dot + 1, it.origin});
  }
  if (next.empty()) return false;
  chart_.push_back(std::move(next));
  close(chart_.size() - 1);
  return true;
}

void Recognizer::pop() { chart_.pop_back(); }

bool Recognizer::complete() const {
  for (const Item& it : chart_.back())
    if (it.origin == 0 && g_.rules()[it.rule].lhs == "S" && it.dot == g_.rules()[it.rule].rhs.size()) return true;
  return false;
}

// ---------------------------------------------------------------------------

namespace {

const ClassTable* find_class(const World& w, const std::string& name) {
  for (const ClassTable& c : w.classes)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<const ClassTable*> ancestry(const World& w, std::string name) {
  std::vector<const ClassTable*> out;
  while (const ClassTable* c = find_class(w, name)) {
    if (std::find(out.begin(), out.end(), c) != out.end()) break;
    out.push_back(c);
    name = c->super;
  }
  return out;
}

bool has_member(const World& w, const std::string& cls, const ExcodeToken& t) {
  if (t.kind != EK::Field && t.kind != EK::Call) return false;
  for (const ClassTable* c : ancestry(w, cls)) {
    if (c->name != t.owner.render()) continue;
    for (const ClassTable::Member& m : c->members)
      if (m.name == t.name && m.argc == (t.kind == EK::Field ? -1 : t.argcount)) return m.type == t.type.render();
  }
  return false;
}

bool widens(const std::string& from, const std::string& to) {
  static const std::vector<std::string> chain = {"char", "short", "int", "long", "float", "double"};
  const auto a = std::find(chain.begin(), chain.end(), from), b = std::find(chain.begin(), chain.end(), to);
  return a != chain.end() && b != chain.end() && a <= b;
}

bool assignable(const World& w, const std::string& from, const std::string& to) {
  if (from == to || widens(from, to)) return true;
  if (from == "null") return find_class(w, to) != nullptr || to == "String";
  for (const ClassTable* c : ancestry(w, from))
    if (c->name == to) return true;
  return false;
}

// Type of an expression that the access rule may have to look through:
// chains, parentheses and assignments. Anything else is an operator result,
// which never has members; "Unk" stands for both.
std::string expr_type(const ExcodeSequence& E, std::size_t a, std::size_t b, const World& w);

std::size_t matching_lp(const ExcodeSequence& E, std::size_t rp, std::size_t lo) {
  int depth = 0;
  for (std::size_t i = rp + 1; i-- > lo;) {
    if (E[i].kind == EK::Sep && E[i].name == "RP") ++depth;
    if (E[i].kind == EK::Sep && E[i].name == "LP" && --depth == 0) return i;
  }
  throw std::logic_error("unbalanced");
}

std::string expr_type(const ExcodeSequence& E, std::size_t a, std::size_t b, const World& w) {
  // top-level assignment (right associative: the first one splits)
  int depth = 0;
  for (std::size_t i = a; i < b; ++i) {
    if (E[i].kind == EK::Sep && E[i].name == "LP") ++depth;
    if (E[i].kind == EK::Sep && E[i].name == "RP") --depth;
    if (depth == 0 && E[i].kind == EK::Op && E[i].name == "ASSIGN") {
      const std::string l = expr_type(E, a, i, w), r = expr_type(E, i + 1, b, w);
      if (l == "Unk" || r == "Unk") return l == "Unk" ? r : l;
      return assignable(w, r, l) ? l : "Unk";
    }
  }
  for (std::size_t i = a; i < b; ++i) {
    if (E[i].kind == EK::Sep && E[i].name == "LP") ++depth;
    if (E[i].kind == EK::Sep && E[i].name == "RP") --depth;
    if (depth == 0 && E[i].kind == EK::Op && E[i].name != "ACC") return "Unk";
  }
  if (b - a == 0) return "Unk";
  const ExcodeToken& last = E[b - 1];
  if (last.kind == EK::Sep && last.name == "RP") {
    const std::size_t lp = matching_lp(E, b - 1, a);
    if (lp == a) return expr_type(E, a + 1, b - 1, w);
    const ExcodeToken& head = E[lp - 1];
    if (head.kind == EK::CCall) return head.type.render();
    if (head.kind == EK::Call) return head.type.render();
    return "Unk";
  }
  switch (last.kind) {
    case EK::Var:
    case EK::Lit:
    case EK::Field: return last.type.render();
    case EK::Special: return last.name == "NULL" ? "null" : last.name == "ZERO" ? "int" : "String";
    case EK::Keyword: return last.name == "THIS" ? w.enclosing_class : "Unk";
    default: return "Unk";
  }
}

// Start of the receiver chain that ends right before index `end`.
std::size_t chain_start(const ExcodeSequence& E, std::size_t end) {
  std::size_t i = end;
  for (;;) {
    if (i == 0) return 0;
    const ExcodeToken& t = E[i - 1];
    std::size_t start;
    if (t.kind == EK::Sep && t.name == "RP") {
      const std::size_t lp = matching_lp(E, i - 1, 0);
      start = lp;
      if (lp > 0 && (E[lp - 1].kind == EK::Call || E[lp - 1].kind == EK::CCall)) {
        start = lp - 1;
        if (E[start].kind == EK::CCall) --start;  // NEW
      }
    } else {
      start = i - 1;
    }
    if (start >= 2 && E[start - 1].kind == EK::Op && E[start - 1].name == "ACC" &&
        (E[start].kind == EK::Field || E[start].kind == EK::Call)) {
      i = start - 1;
      continue;
    }
    return start;
  }
}

}  // namespace

bool accessible(const ExcodeSequence& E, const ExcodeToken& t, const World& w) {
  if (t.kind == EK::Keyword || t.kind == EK::Op || t.kind == EK::Sep) return true;
  if (!E.empty() && E.back().kind == EK::Type) return t.kind == EK::Var && t.type.render() == E.back().type.render();
  if (!E.empty() && E.back().kind == EK::Op && E.back().name == "ACC") {
    const std::size_t acc = E.size() - 1;
    const std::string recv = expr_type(E, chain_start(E, acc), acc, w);
    if (recv == "Unk") return (t.kind == EK::Field || t.kind == EK::Call) && t.owner.is_unknown();
    return has_member(w, recv, t);
  }
  switch (t.kind) {
    case EK::Type:
    case EK::Lit:
    case EK::Special: return true;
    case EK::Var:
      return std::find(w.var_types.begin(), w.var_types.end(), t.type.render()) != w.var_types.end();
    case EK::Field:
    case EK::Call: return has_member(w, w.enclosing_class, t);
    case EK::CCall: {
      const ClassTable* c = find_class(w, t.type.render());
      if (!c) return false;
      if (c->ctor_argcs.empty()) return t.argcount == 0;
      return std::find(c->ctor_argcs.begin(), c->ctor_argcs.end(), t.argcount) != c->ctor_argcs.end();
    }
    default: return false;
  }
}

std::set<std::string> enumerate_templates(const ExcodeSequence& context, const std::vector<ExcodeToken>& vocab,
                                          const World& w, int max_len) {
  static const Grammar grammar;
  Recognizer rec(grammar);
  for (const ExcodeToken& t : context)
    if (!rec.push(terminal(t))) return {};
  std::set<std::string> out;
  ExcodeSequence E = context;
  std::function<void()> dfs = [&] {
    if (rec.complete() || E.size() >= static_cast<std::size_t>(max_len)) {
      out.insert(render(ExcodeSequence(E.begin() + static_cast<std::ptrdiff_t>(context.size()), E.end())));
      return;
    }
    for (const ExcodeToken& t : vocab) {
      if (!accessible(E, t, w) || !rec.push(terminal(t))) continue;
      E.push_back(t);
      dfs();
      E.pop_back();
      rec.pop();
    }
  };
  dfs();
  return out;
}

// ---------------------------------------------------------------------------

BackoffOracle::BackoffOracle(const std::vector<std::vector<std::string>>& sequences, int n, double lambda)
    : n_(n), lambda_(lambda) {
  std::set<std::string> keys = {"<unk>", "<s>", "</s>"};
  for (const auto& s : sequences) {
    std::vector<std::string> p(static_cast<std::size_t>(n - 1), "<s>");
    p.insert(p.end(), s.begin(), s.end());
    p.push_back("</s>");
    for (std::size_t i = 0; i < p.size(); ++i) {
      keys.insert(p[i]);
      ++total_;
      for (std::size_t k = 1; k <= static_cast<std::size_t>(n) && i + k <= p.size(); ++k)
        ++counts_[std::vector<std::string>(p.begin() + static_cast<std::ptrdiff_t>(i),
                                           p.begin() + static_cast<std::ptrdiff_t>(i + k))];
    }
  }
  vocab_.assign(keys.begin(), keys.end());
}

std::size_t BackoffOracle::count(const std::vector<std::string>& g) const {
  auto it = counts_.find(g);
  return it == counts_.end() ? 0 : it->second;
}

double BackoffOracle::raw(const std::vector<std::string>& h, const std::string& w) const {
  // longest usable context first; every step down costs a factor lambda
  const std::size_t longest = std::min(h.size(), static_cast<std::size_t>(n_ - 1));
  for (std::size_t k = longest; k >= 1; --k) {
    const std::vector<std::string> ctx(h.end() - static_cast<std::ptrdiff_t>(k), h.end());
    std::vector<std::string> gram = ctx;
    gram.push_back(w);
    if (count(ctx) > 0 && count(gram) > 0)
      return std::pow(lambda_, static_cast<double>(longest - k)) * static_cast<double>(count(gram)) /
             static_cast<double>(count(ctx));
  }
  const double uni = (static_cast<double>(count({w})) + 1.0) / static_cast<double>(total_ + vocab_.size());
  return std::pow(lambda_, static_cast<double>(longest)) * uni;
}

double BackoffOracle::prob(const std::vector<std::string>& context, const std::string& token) const {
  std::vector<std::string> h(static_cast<std::size_t>(n_ - 1), "<s>");
  for (const std::string& k : context) h.push_back(counts_.contains({k}) ? k : "<unk>");
  const std::string w = counts_.contains({token}) ? token : "<unk>";
  double z = 0;
  for (const std::string& v : vocab_) z += raw(h, v);
  return raw(h, w) / z;
}

}  // namespace stmtc::oracle
