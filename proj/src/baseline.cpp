// The two lexical baselines: token-by-token beam search over whole lexical
// tokens scored by the subtoken model, optionally filtered by the same
// syntax/accessibility/type rules AutoSC uses.

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "stmtc/error.hpp"
#include "stmtc/eval.hpp"
#include "stmtc/typecheck.hpp"

namespace stmtc {

namespace {

ConcreteToken concrete_of(const std::vector<CodeToken>& tokens, std::size_t i) {
  const CodeToken& t = tokens[i];
  if (t.role == Role::Identifier && is_decl_name(tokens, i)) return ConcreteToken::newvar();
  if (t.role == Role::Literal) {
    std::vector<std::string> keys;
    append_lexical_keys(tokens, i, keys);
    if (keys[0].rfind("<lit:", 0) == 0) return ConcreteToken::lit(literal_type(*t.literal_kind).render());
  }
  return ConcreteToken::lexeme(t.lexeme);
}

// A literal of the placeholder's type, so placeholders survive re-lexing.
std::string sample_literal(const std::string& type) {
  if (type == "long") return "1L";
  if (type == "float") return "1.5f";
  if (type == "double") return "1.5";
  if (type == "char") return "'c'";
  if (type == "boolean") return "true";
  if (type == "String") return "\"s\"";
  return "1";
}

std::string code_text(const CodeSequence& seq) {
  std::string out;
  for (const ConcreteToken& t : seq) {
    if (!out.empty()) out += ' ';
    switch (t.kind) {
      case ConcreteToken::Kind::Text: out += t.text; break;
      case ConcreteToken::Kind::LitPlaceholder: out += sample_literal(t.text); break;
      case ConcreteToken::Kind::NewVar: out += "fresh"; break;
    }
  }
  return out;
}

class LexSearch {
 public:
  LexSearch(const LexicalVocabulary& vocab, const NGramModel& model, const ExpansionConfig& cfg, double floor,
            bool pa, CodeSequence prefix, const ScopeEnv& env_start, const ScopeEnv& env_cursor,
            const ClassIndex& index)
      : vocab_(vocab), model_(model), cfg_(cfg), floor_(floor), pa_(pa), prefix_(std::move(prefix)),
        env_start_(env_start), env_cursor_(env_cursor), index_(index),
        tctx_{&index, env_start.enclosing_method_return, env_start.enclosing_class} {
    ids_.reserve(vocab.tokens.size());
    std::map<NGramModel::Id, std::vector<std::size_t>> by_first;
    for (std::size_t i = 0; i < vocab.tokens.size(); ++i) {
      ids_.push_back(model.encode(vocab.keys[i]));
      by_first[ids_.back()[0]].push_back(i);
    }
    for (auto& [id, words] : by_first) groups_.emplace_back(id, std::move(words));
  }

  std::vector<Candidate> out;

  struct Path {
    CodeSequence seq;
    std::vector<NGramModel::Id> hist;
    double score = 0;
  };

  // Beam of width K: each step keeps the K best extensions over the whole beam.
  void search(std::vector<NGramModel::Id> hist) {
    const std::size_t K = static_cast<std::size_t>(std::max(cfg_.K, 1));
    std::vector<Path> beam{Path{{}, std::move(hist), 0.0}};
    while (!beam.empty()) {
      std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> next;  // (score, (path, word))
      for (std::size_t b = 0; b < beam.size(); ++b) {
        Path& p = beam[b];
        if (prefix_.size() + p.seq.size() >= static_cast<std::size_t>(cfg_.max_len)) {
          emit(p.seq, p.score, false);
          continue;
        }
        for (const auto& [s, w] : best_words(p.seq, p.hist, K))
          if (p.score + s >= floor_) next.push_back({p.score + s, {b, w}});
      }
      std::stable_sort(next.begin(), next.end(), [&](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first > y.first;
        return render_of(x.second.second) < render_of(y.second.second);
      });
      if (next.size() > K) next.resize(K);
      std::vector<Path> live;
      for (const auto& [score, bw] : next) {
        Path p = beam[bw.first];
        p.seq.push_back(vocab_.tokens[bw.second]);
        p.hist.insert(p.hist.end(), ids_[bw.second].begin(), ids_[bw.second].end());
        p.score = score;
        if (ended(p.seq)) emit(p.seq, p.score, true);
        else live.push_back(std::move(p));
      }
      beam = std::move(live);
    }
  }

  // The K best next words after `hist`, best first.
  std::vector<std::pair<double, std::size_t>> best_words(CodeSequence& seq, const std::vector<NGramModel::Id>& hist,
                                                         std::size_t K) {
    // Upper bound of every word: the probability of its first subtoken.
    const double z = model_.normalizer(hist);
    std::vector<std::pair<double, std::size_t>> bounds;
    bounds.reserve(groups_.size());
    for (std::size_t g = 0; g < groups_.size(); ++g)
      bounds.emplace_back(std::log(model_.raw(hist, groups_[g].first) / z), g);
    std::sort(bounds.begin(), bounds.end(), [&](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });

    std::vector<std::pair<double, std::size_t>> best;  // (score, word), kept sorted best first
    auto better = [&](const std::pair<double, std::size_t>& a, const std::pair<double, std::size_t>& b) {
      if (a.first != b.first) return a.first > b.first;
      return render_of(a.second) < render_of(b.second);
    };
    for (const auto& [bound, g] : bounds) {
      if (best.size() == K && bound < best.back().first) break;
      for (std::size_t w : groups_[g].second) {
        double s = bound;
        const auto& ids = ids_[w];
        if (ids.size() > 1) {
          std::vector<NGramModel::Id> h = hist;
          h.push_back(ids[0]);
          for (std::size_t j = 1; j < ids.size(); ++j) {
            s += std::log(model_.prob(h, ids[j]));
            h.push_back(ids[j]);
          }
        }
        const std::pair<double, std::size_t> cand{s, w};
        if (best.size() == K && !better(cand, best.back())) continue;
        if (pa_) {
          seq.push_back(vocab_.tokens[w]);
          const bool ok = viable(seq);
          seq.pop_back();
          if (!ok) continue;
        }
        best.insert(std::upper_bound(best.begin(), best.end(), cand, better), cand);
        if (best.size() > K) best.pop_back();
      }
    }
    return best;
  }

 private:
  const std::string& render_of(std::size_t w) {
    auto it = renders_.find(w);
    if (it == renders_.end()) it = renders_.emplace(w, vocab_.tokens[w].render()).first;
    return it->second;
  }

  bool ended(const CodeSequence& seq) const {
    const ConcreteToken& first = prefix_.empty() ? seq.front() : prefix_.front();
    const bool header = first.kind == ConcreteToken::Kind::Text &&
                        (first.text == "if" || first.text == "while" || first.text == "for");
    if (!header) return seq.back().text == ";" && seq.back().kind == ConcreteToken::Kind::Text;
    int depth = 0;
    bool opened = false;
    auto walk = [&](const CodeSequence& s) {
      for (const ConcreteToken& t : s) {
        if (t.kind != ConcreteToken::Kind::Text) continue;
        if (t.text == "(") {
          ++depth;
          opened = true;
        } else if (t.text == ")") {
          --depth;
        }
      }
    };
    walk(prefix_);
    walk(seq);
    return opened && depth == 0 && seq.back().text == ")";
  }

  std::vector<ExcodeSequence> readings(const CodeSequence& seq) const {
    CodeSequence all = prefix_;
    all.insert(all.end(), seq.begin(), seq.end());
    const TokenStream stream = tokenize(code_text(all));
    if (!stream.errors.empty() || stream.tokens.size() != all.size()) return {};
    return annotate_prefix(stream, {0, stream.tokens.size() - 1}, env_start_, index_);
  }

  // Parseable, and every generated token is accessible where it stands.
  bool viable(const CodeSequence& seq) const {
    for (const ExcodeSequence& alt : readings(seq)) {
      if (parse_excode(alt).status == XParse::Status::Invalid) continue;
      bool ok = true;
      for (std::size_t i = prefix_.size(); ok && i < alt.size(); ++i) {
        const ExcodeSequence before(alt.begin(), alt.begin() + static_cast<std::ptrdiff_t>(i));
        ok = accessible_next(before, alt[i], env_cursor_, index_);
      }
      if (ok) return true;
    }
    return false;
  }

  bool type_correct(const CodeSequence& seq) const {
    for (const ExcodeSequence& alt : readings(seq)) {
      const auto split = alt.begin() + static_cast<std::ptrdiff_t>(prefix_.size());
      if (check_template(ExcodeSequence(alt.begin(), split), ExcodeSequence(split, alt.end()), tctx_)) return true;
    }
    return false;
  }

  void emit(const CodeSequence& seq, double score, bool ended) {
    if (pa_ && !type_correct(seq)) return;
    Candidate c;
    c.tokens = seq;
    c.log_score = score;
    c.source.ended = ended;
    out.push_back(std::move(c));
  }

  const LexicalVocabulary& vocab_;
  const NGramModel& model_;
  const ExpansionConfig& cfg_;
  double floor_;
  bool pa_;
  CodeSequence prefix_;
  const ScopeEnv& env_start_;
  const ScopeEnv& env_cursor_;
  const ClassIndex& index_;
  TypeContext tctx_;
  std::vector<std::vector<NGramModel::Id>> ids_;
  std::vector<std::pair<NGramModel::Id, std::vector<std::size_t>>> groups_;
  std::unordered_map<std::size_t, std::string> renders_;
};

}  // namespace

LexicalVocabulary LexicalVocabulary::build(const std::vector<const TypedProgram*>& programs) {
  std::map<std::string, ConcreteToken> uniq;
  for (const TypedProgram* p : programs) {
    const auto& tokens = p->program.stream.tokens;
    for (const ClassAst& c : p->program.classes) {
      for (const MethodAst& m : c.methods) {
        const TokRange r = m.body.range;
        for (std::size_t i = r.first; !r.empty() && i <= r.last; ++i) {
          ConcreteToken t = concrete_of(tokens, i);
          uniq.emplace(t.render(), std::move(t));
        }
      }
    }
  }
  LexicalVocabulary v;
  for (auto& [text, t] : uniq) {
    v.keys.push_back(lexical_keys(CodeSequence{t}));
    v.tokens.push_back(std::move(t));
  }
  return v;
}

SuggestionList baseline_complete(const TypedProgram& typed, std::size_t cursor, const LexicalVocabulary& vocab,
                                 const NGramModel& lexical, const ExpansionConfig& cfg, double min_path_logprob,
                                 bool program_analysis) {
  const MethodAst* method = enclosing_method(typed.program, cursor);
  if (!method || cursor <= method->body.range.first)
    throw Error(ErrorCode::CursorOutsideMethod, "cursor at token " + std::to_string(cursor));
  if (vocab.tokens.empty()) throw Error(ErrorCode::NoCandidates, "empty lexical vocabulary");
  const auto& tokens = typed.program.stream.tokens;
  const std::size_t start = statement_start(typed, *method, cursor);
  CodeSequence prefix;
  for (std::size_t i = start; i < cursor; ++i) prefix.push_back(concrete_of(tokens, i));
  const ScopeEnv env_start = accessible_env(typed, start);
  const ScopeEnv env_cursor = accessible_env(typed, cursor);

  LexSearch search(vocab, lexical, cfg, min_path_logprob, program_analysis, std::move(prefix), env_start, env_cursor,
                   *typed.index);
  search.search(lexical.history(lexical_keys(tokens, {method->body.range.first, cursor - 1})));

  std::map<std::string, Candidate> best;
  for (Candidate& c : search.out) {
    std::string text = c.text();
    auto it = best.find(text);
    if (it == best.end()) best.emplace(std::move(text), std::move(c));
    else if (c.log_score > it->second.log_score) it->second = std::move(c);
  }
  SuggestionList list;
  for (auto& [text, c] : best) list.push_back(std::move(c));
  std::stable_sort(list.begin(), list.end(),
                   [](const Candidate& a, const Candidate& b) { return a.log_score > b.log_score; });
  return list;
}

}  // namespace stmtc
