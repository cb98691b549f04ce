#include "stmtc/templates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <unordered_map>

#include "stmtc/error.hpp"

namespace stmtc {

namespace {

using K = ExcodeToken::Kind;

std::string class_key(const ExcodeSequence& E) {
  std::string key;
  for (const ExcodeToken& t : E) {
    key += syntax_class(t);
    key += ' ';
  }
  return key;
}

// A member token is accessible only if the class index really declares it
// with the same shape.
bool declared(const ExcodeToken& t, const ClassIndex& index) {
  if (!t.owner.is_class()) return false;
  const ClassInfo* ci = index.find(t.owner.name);
  if (!ci) return false;
  if (t.kind == K::Field) {
    for (const FieldDecl& f : ci->fields)
      if (f.name == t.name) return f.type.render() == t.type.render();
    return false;
  }
  for (const MethodDecl& m : ci->methods)
    if (m.name == t.name && m.params.size() == static_cast<std::size_t>(t.argcount))
      return m.ret.render() == t.type.render();
  return false;
}

bool constructible(const ExcodeToken& t, const ClassIndex& index) {
  if (!t.type.is_class()) return false;
  const ClassInfo* ci = index.find(t.type.name);
  if (!ci) return false;
  if (ci->constructors.empty()) return t.argcount == 0;
  return std::any_of(ci->constructors.begin(), ci->constructors.end(),
                     [&](const MethodDecl& c) { return c.params.size() == static_cast<std::size_t>(t.argcount); });
}

bool member_of(const ExcodeToken& t, const std::vector<std::string>& owners, const ClassIndex& index) {
  if (t.kind != K::Field && t.kind != K::Call) return false;
  if (!t.owner.is_class()) return false;
  return std::find(owners.begin(), owners.end(), t.owner.name) != owners.end() && declared(t, index);
}

// What the accessibility rule allows after E.
struct AccessState {
  enum class Kind : std::uint8_t { Default, Member, Decl } kind = Kind::Default;
  TypeRef type;  // Member: receiver type; Decl: declared type
};

AccessState access_state(const ExcodeSequence& E, const ScopeEnv& env, const ClassIndex& index) {
  AccessState st;
  if (E.empty()) return st;
  const ExcodeToken& last = E.back();
  if (last.kind == K::Type) {
    st.kind = AccessState::Kind::Decl;
    st.type = last.type;
  } else if (last.kind == K::Op && last.name == "ACC") {
    st.kind = AccessState::Kind::Member;
    XParse p = parse_excode(E);
    if (p.member_receiver) {
      TypeContext ctx{&index, env.enclosing_method_return, env.enclosing_class};
      st.type = infer_node_type(*p.member_receiver, E, ctx);
    }
  }
  return st;
}

bool accessible(const ExcodeToken& t, const AccessState& st, const ScopeEnv& env, const ClassIndex& index,
                const std::vector<std::string>& this_lineage, const std::vector<std::string>& recv_lineage) {
  switch (t.kind) {
    case K::Keyword:
    case K::Op:
    case K::Sep:
      return true;
    default: break;
  }
  if (st.kind == AccessState::Kind::Decl) return t.kind == K::Var && t.type.render() == st.type.render();
  if (st.kind == AccessState::Kind::Member) {
    if (st.type.is_unknown()) return (t.kind == K::Field || t.kind == K::Call) && t.owner.is_unknown();
    return member_of(t, recv_lineage, index);
  }
  switch (t.kind) {
    case K::Type:
    case K::Lit:
    case K::Special:
      return true;
    case K::Var: {
      const std::string want = t.type.render();
      return std::any_of(env.variables.begin(), env.variables.end(),
                         [&](const Variable& v) { return v.type.render() == want; });
    }
    case K::Field:
    case K::Call:
      return member_of(t, this_lineage, index);
    case K::CCall:
      return constructible(t, index);
    default:
      return false;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Vocabulary

std::vector<ExcodeToken> closed_excode_tokens() {
  std::vector<ExcodeToken> out;
  for (const char* k : {"IF", "ELSE", "WHILE", "FOR", "RETURN", "NEW", "THIS"}) out.push_back(ExcodeToken::keyword(k));
  for (const char* o : {"=", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/", "%", "&&", "||", "!", "++", "--", "."})
    out.push_back(ExcodeToken::op(op_name(o)));
  for (const char* s : {"LP", "RP", "LB", "RB", "LBRACK", "RBRACK", "SEMI", "COMMA"}) out.push_back(ExcodeToken::sep(s));
  for (const char* s : {"NULL", "ZERO", "EMPTY"}) out.push_back(ExcodeToken::special(s));
  return out;
}

ExcodeVocabulary::ExcodeVocabulary(std::vector<ExcodeToken> tokens) {
  std::map<std::string, ExcodeToken> by_render;
  for (ExcodeToken& t : tokens) {
    std::string r = t.render();
    by_render.emplace(std::move(r), std::move(t));
  }
  std::map<std::string, std::vector<std::size_t>> groups;
  for (auto& [r, t] : by_render) {
    groups[syntax_class(t)].push_back(tokens_.size());
    renders_.push_back(r);
    tokens_.push_back(std::move(t));
  }
  for (auto& [cls, idx] : groups) {
    classes_.push_back(cls);
    members_.push_back(std::move(idx));
  }
}

ExcodeVocabulary ExcodeVocabulary::from_model(const NGramModel& model) {
  std::vector<ExcodeToken> tokens = closed_excode_tokens();
  for (const std::string& key : model.vocab()) {
    if (key == kUnk || key == kBos || key == kEos) continue;
    if (auto t = ExcodeToken::parse(key)) tokens.push_back(std::move(*t));
  }
  return ExcodeVocabulary(std::move(tokens));
}

// ---------------------------------------------------------------------------
// Rules

namespace {

// Viability of E and of each one-token extension depends only on the syntax
// classes involved, so results are shared across all sequences with the
// same class sequence.
struct SyntaxEntry {
  XParse::Status status = XParse::Status::Invalid;
  std::vector<std::size_t> classes;  // indices into vocab.classes() that keep E viable
};

class SyntaxCache {
 public:
  const SyntaxEntry& get(const ExcodeSequence& E, const std::string& key, const ExcodeVocabulary& vocab) {
    std::lock_guard lock(mu_);
    // Entries hold class indices, so they stay valid while the class list does.
    if (classes_ != vocab.classes()) {
      entries_.clear();
      classes_ = vocab.classes();
    }
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
    if (entries_.size() > 200000) entries_.clear();
    SyntaxEntry e;
    e.status = parse_excode(E).status;
    if (e.status == XParse::Status::Viable) {
      ExcodeSequence probe = E;
      probe.emplace_back();
      for (std::size_t c = 0; c < vocab.classes().size(); ++c) {
        probe.back() = class_representative(vocab.classes()[c]);
        if (parse_excode(probe).status != XParse::Status::Invalid) e.classes.push_back(c);
      }
    }
    return entries_.emplace(key, std::move(e)).first->second;
  }

 private:
  std::mutex mu_;
  std::vector<std::string> classes_;
  std::unordered_map<std::string, SyntaxEntry> entries_;
};

SyntaxCache& syntax_cache() {
  thread_local SyntaxCache cache;
  return cache;
}

std::vector<std::size_t> syntax_indices(const SyntaxEntry& entry, const ExcodeVocabulary& vocab) {
  std::vector<std::size_t> out;
  for (std::size_t c : entry.classes) {
    const auto& m = vocab.members(c);
    out.insert(out.end(), m.begin(), m.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::size_t> syntax_candidates(const ExcodeSequence& E, const ExcodeVocabulary& vocab) {
  return syntax_indices(syntax_cache().get(E, class_key(E), vocab), vocab);
}

std::vector<std::size_t> access_candidates(const ExcodeSequence& E, const ScopeEnv& env, const ClassIndex& index,
                                           const ExcodeVocabulary& vocab) {
  const AccessState st = access_state(E, env, index);
  const auto this_lineage = env.enclosing_class.empty() ? std::vector<std::string>{} : index.lineage(env.enclosing_class);
  const auto recv_lineage = st.type.is_class() ? index.lineage(st.type.name) : std::vector<std::string>{};
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < vocab.size(); ++i)
    if (accessible(vocab.tokens()[i], st, env, index, this_lineage, recv_lineage)) out.push_back(i);
  return out;
}

bool accessible_next(const ExcodeSequence& E, const ExcodeToken& t, const ScopeEnv& env, const ClassIndex& index) {
  const AccessState st = access_state(E, env, index);
  const auto this_lineage = env.enclosing_class.empty() ? std::vector<std::string>{} : index.lineage(env.enclosing_class);
  const auto recv_lineage = st.type.is_class() ? index.lineage(st.type.name) : std::vector<std::string>{};
  return accessible(t, st, env, index, this_lineage, recv_lineage);
}

std::vector<std::size_t> valid_next(const ExcodeSequence& E, const ScopeEnv& env, const ClassIndex& index,
                                    const ExcodeVocabulary& vocab) {
  const std::vector<std::size_t> syn = syntax_candidates(E, vocab);
  const std::vector<std::size_t> acc = access_candidates(E, env, index, vocab);
  std::vector<std::size_t> out;
  std::set_intersection(syn.begin(), syn.end(), acc.begin(), acc.end(), std::back_inserter(out));
  return out;
}

// ---------------------------------------------------------------------------
// Expansion

namespace {

class Expander {
 public:
  Expander(const ScopeEnv& env, const ClassIndex& index, const NGramModel& model, const ExcodeVocabulary& vocab,
           const ExpansionConfig& cfg, std::size_t context_len)
      : env_(env), index_(index), model_(model), vocab_(vocab), cfg_(cfg), context_len_(context_len) {
    ids_.reserve(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) ids_.push_back(model.id(vocab.rendering(i)));
    // The default access set does not depend on E; compute it once.
    this_lineage_ = env.enclosing_class.empty() ? std::vector<std::string>{} : index.lineage(env.enclosing_class);
    default_ok_.resize(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i)
      default_ok_[i] = accessible(vocab.tokens()[i], AccessState{}, env, index, this_lineage_, {});
  }

  std::vector<Template> out;

  // Candidates at E, or nullopt-like empty with `ended` reporting completion.
  std::vector<std::size_t> next(const ExcodeSequence& E, const std::string& key, bool& ended) {
    const SyntaxEntry& entry = syntax_cache().get(E, key, vocab_);
    ended = entry.status == XParse::Status::Complete;
    std::vector<std::size_t> out;
    if (entry.status != XParse::Status::Viable) return out;
    const AccessState st = access_state(E, env_, index_);
    const std::vector<bool>* ok = &default_ok_;
    std::vector<bool> local;
    if (st.kind != AccessState::Kind::Default) {
      const std::string k = (st.kind == AccessState::Kind::Decl ? "D:" : "M:") + st.type.render();
      auto it = state_ok_.find(k);
      if (it == state_ok_.end()) {
        const auto recv = st.type.is_class() ? index_.lineage(st.type.name) : std::vector<std::string>{};
        local.resize(vocab_.size());
        for (std::size_t i = 0; i < vocab_.size(); ++i)
          local[i] = accessible(vocab_.tokens()[i], st, env_, index_, this_lineage_, recv);
        it = state_ok_.emplace(k, std::move(local)).first;
      }
      ok = &it->second;
    }
    for (std::size_t c : entry.classes)
      for (std::size_t i : vocab_.members(c))
        if ((*ok)[i]) out.push_back(i);
    return out;
  }

  void expand(ExcodeSequence& E, std::string& key, std::vector<NGramModel::Id>& hist, double score) {
    bool ended = false;
    std::vector<std::size_t> cand = next(E, key, ended);
    if (ended) {
      emit(E, true, score);
      return;
    }
    if (E.size() >= static_cast<std::size_t>(cfg_.max_len)) {
      // Truncated at the length limit; only viable prefixes count.
      if (parse_excode(E).status != XParse::Status::Invalid) emit(E, false, score);
      return;
    }
    if (cand.empty()) return;
    const double z = model_.normalizer(hist);
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(cand.size());
    for (std::size_t i : cand) scored.emplace_back(model_.raw(hist, ids_[i]) / z, i);
    const std::size_t keep = std::min(scored.size(), static_cast<std::size_t>(std::max(cfg_.K, 1)));
    auto better = [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return vocab_.rendering(a.second) < vocab_.rendering(b.second);
    };
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), better);
    for (std::size_t j = 0; j < keep; ++j) {
      const double s = score + std::log(scored[j].first);
      if (s < cfg_.min_path_logprob) continue;
      const std::size_t i = scored[j].second;
      const std::size_t key_len = key.size();
      E.push_back(vocab_.tokens()[i]);
      key += syntax_class(E.back());
      key += ' ';
      hist.push_back(ids_[i]);
      expand(E, key, hist, s);
      hist.pop_back();
      key.resize(key_len);
      E.pop_back();
    }
  }

  std::vector<std::size_t> root_candidates(const ExcodeSequence& E, const std::string& key, bool& ended) {
    return next(E, key, ended);
  }

 private:
  void emit(const ExcodeSequence& E, bool ended, double score) {
    Template t;
    t.tokens.assign(E.begin() + static_cast<std::ptrdiff_t>(context_len_), E.end());
    t.ended = ended;
    t.log_score = score;
    out.push_back(std::move(t));
  }

  const ScopeEnv& env_;
  const ClassIndex& index_;
  const NGramModel& model_;
  const ExcodeVocabulary& vocab_;
  const ExpansionConfig& cfg_;
  std::size_t context_len_;
  std::vector<NGramModel::Id> ids_;
  std::vector<std::string> this_lineage_;
  std::vector<bool> default_ok_;
  std::unordered_map<std::string, std::vector<bool>> state_ok_;
};

}  // namespace

std::vector<Template> identify_templates(const ExcodeSequence& context, const std::vector<std::string>& history,
                                         const ScopeEnv& env, const ClassIndex& index, const NGramModel& model,
                                         const ExcodeVocabulary& vocab, const ExpansionConfig& cfg) {
  if (cfg.K < 1 || cfg.max_len < 1) throw Error(ErrorCode::BadRequest, "K and max_len must be >= 1");
  Expander ex(env, index, model, vocab, cfg, context.size());
  ExcodeSequence E = context;
  std::string key = class_key(E);
  std::vector<std::string> keys = history;
  for (const ExcodeToken& t : context) keys.push_back(t.render());
  std::vector<NGramModel::Id> hist = model.history(keys);

  bool ended = false;
  const std::vector<std::size_t> root = ex.root_candidates(E, key, ended);
  if (!ended && E.size() < static_cast<std::size_t>(cfg.max_len) && root.empty())
    throw Error(ErrorCode::NoCandidates, "no valid next excode token after " + render(context));
  ex.expand(E, key, hist, 0.0);
  // Render each template once; ties on score are broken by the rendering.
  std::vector<std::pair<std::string, std::size_t>> order;
  order.reserve(ex.out.size());
  for (std::size_t i = 0; i < ex.out.size(); ++i) order.emplace_back(render(ex.out[i].tokens), i);
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    const double sa = ex.out[a.second].log_score, sb = ex.out[b.second].log_score;
    if (sa != sb) return sa > sb;
    return a.first < b.first;
  });
  std::vector<Template> out;
  out.reserve(order.size());
  for (const auto& [r, i] : order) out.push_back(std::move(ex.out[i]));
  return out;
}

}  // namespace stmtc
