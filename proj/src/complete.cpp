#include "stmtc/complete.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <map>

#include "stmtc/error.hpp"
#include "stmtc/typecheck.hpp"

namespace stmtc {

namespace {

bool is_special_literal(const CodeToken& t) {
  if (!t.literal_kind) return false;
  switch (*t.literal_kind) {
    case LiteralKind::Null: return true;
    case LiteralKind::Int: return t.lexeme == "0";
    case LiteralKind::String: return t.lexeme == "\"\"";
    default: return false;
  }
}

bool is_type_start(const CodeToken& t) {
  if (t.role == Role::Identifier) return true;
  return t.role == Role::Keyword && (is_primitive_type_keyword(t.lexeme) || t.lexeme == "String");
}

bool looks_like_identifier(const std::string& s) {
  if (s.empty() || is_keyword(s)) return false;
  const unsigned char c = static_cast<unsigned char>(s[0]);
  return std::isalpha(c) || c == '_';
}

}  // namespace

std::string lit_key(const TypeRef& type) { return "<lit:" + type.render() + ">"; }

bool is_decl_name(const std::vector<CodeToken>& tokens, std::size_t i) {
  return i > 0 && i < tokens.size() && tokens[i].role == Role::Identifier && is_type_start(tokens[i - 1]);
}

void append_lexical_keys(const std::vector<CodeToken>& tokens, std::size_t i, std::vector<std::string>& out) {
  const CodeToken& t = tokens[i];
  switch (t.role) {
    case Role::Identifier:
      if (is_decl_name(tokens, i)) {
        out.emplace_back(kNewVarKey);
      } else {
        for (std::string& s : split_subtokens(t.lexeme)) out.push_back(std::move(s));
      }
      return;
    case Role::Literal:
      if (is_special_literal(t)) out.push_back(t.lexeme);
      else out.push_back(lit_key(literal_type(*t.literal_kind)));
      return;
    default:
      out.push_back(t.lexeme);
  }
}

std::vector<std::string> lexical_keys(const std::vector<CodeToken>& tokens, TokRange range) {
  std::vector<std::string> out;
  for (std::size_t i = range.first; !range.empty() && i <= range.last; ++i) append_lexical_keys(tokens, i, out);
  return out;
}

std::vector<std::string> lexical_keys(const CodeSequence& seq) {
  std::vector<std::string> out;
  for (const ConcreteToken& t : seq) {
    if (t.kind != ConcreteToken::Kind::Text) {
      out.push_back(t.render());
    } else if (looks_like_identifier(t.text) && t.text != "true" && t.text != "false" && t.text != "null") {
      for (std::string& s : split_subtokens(t.text)) out.push_back(std::move(s));
    } else {
      out.push_back(t.text);
    }
  }
  return out;
}

std::vector<std::vector<std::string>> excode_method_streams(const TypedProgram& typed) {
  std::vector<std::vector<std::string>> out;
  for (const ClassAst& c : typed.program.classes) {
    for (const MethodAst& m : c.methods) {
      std::vector<std::string> keys;
      for (const ExcodeToken& t : annotate(typed, m.body.range)) keys.push_back(t.render());
      if (!keys.empty()) out.push_back(std::move(keys));
    }
  }
  return out;
}

std::vector<std::vector<std::string>> lexical_method_streams(const TypedProgram& typed) {
  std::vector<std::vector<std::string>> out;
  for (const ClassAst& c : typed.program.classes) {
    for (const MethodAst& m : c.methods) {
      auto keys = lexical_keys(typed.program.stream.tokens, m.body.range);
      if (!keys.empty()) out.push_back(std::move(keys));
    }
  }
  return out;
}

Models Models::train(const std::vector<const TypedProgram*>& programs, int n, double lambda) {
  std::vector<std::vector<std::string>> ex, lex;
  for (const TypedProgram* p : programs) {
    for (auto& s : excode_method_streams(*p)) ex.push_back(std::move(s));
    for (auto& s : lexical_method_streams(*p)) lex.push_back(std::move(s));
  }
  return from(NGramModel::train(ex, n, lambda), NGramModel::train(lex, n, lambda));
}

Models Models::from(NGramModel excode, NGramModel lexical) {
  Models m{std::move(excode), std::move(lexical), {}};
  m.vocab = ExcodeVocabulary::from_model(m.excode);
  return m;
}

void Models::save(const std::string& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  excode.save((std::filesystem::path(dir) / "excode.sclm").string());
  lexical.save((std::filesystem::path(dir) / "lexical.sclm").string());
}

Models Models::load(const std::string& dir) {
  return from(NGramModel::load((std::filesystem::path(dir) / "excode.sclm").string()),
              NGramModel::load((std::filesystem::path(dir) / "lexical.sclm").string()));
}

SuggestionList rank(std::vector<Candidate> candidates, const std::vector<std::string>& context_keys,
                    const NGramModel& lexical) {
  std::map<std::string, Candidate> best;
  for (Candidate& c : candidates) {
    c.log_score = lexical.score_continuation(context_keys, lexical_keys(c.tokens));
    std::string text = c.text();
    auto it = best.find(text);
    if (it == best.end()) best.emplace(std::move(text), std::move(c));
    else if (c.log_score > it->second.log_score) it->second = std::move(c);
  }
  SuggestionList out;
  out.reserve(best.size());
  for (auto& [text, c] : best) out.push_back(std::move(c));
  // map order is text order, so a stable sort on score alone breaks ties by text
  std::stable_sort(out.begin(), out.end(),
                   [](const Candidate& a, const Candidate& b) { return a.log_score > b.log_score; });
  return out;
}

std::size_t statement_start(const TypedProgram& typed, const MethodAst& method, std::size_t cursor) {
  for (const TokRange& h : typed.program.holes) {
    if (!method.body.range.contains(h.first)) continue;
    if (h.contains(cursor)) return h.first;
    if (h.last + 1 == cursor && typed.program.stream.tokens[h.last].lexeme != ";") return h.first;
  }
  for (const StatementUnit& u : statement_units(method))
    if (u.tokens.first < cursor && u.tokens.contains(cursor)) return u.tokens.first;
  return cursor;
}

SuggestionList complete_at(const TypedProgram& typed, std::size_t cursor, const Models& models,
                           const ExpansionConfig& cfg) {
  const ClassAst* cls = nullptr;
  const MethodAst* method = enclosing_method(typed.program, cursor, &cls);
  if (!method || cursor <= method->body.range.first)
    throw Error(ErrorCode::CursorOutsideMethod, "cursor at token " + std::to_string(cursor));
  const ClassIndex& index = *typed.index;
  const auto& tokens = typed.program.stream.tokens;
  const std::size_t start = statement_start(typed, *method, cursor);

  const ScopeEnv env_start = accessible_env(typed, start);
  const ScopeEnv env_cursor = accessible_env(typed, cursor);
  const TokRange prefix{start, cursor - 1};
  const std::vector<ExcodeSequence> contexts = annotate_prefix(typed.program.stream, prefix, env_start, index);

  std::vector<std::string> history;
  if (start > method->body.range.first) {
    for (const ExcodeToken& t : annotate(typed, {method->body.range.first, start - 1})) history.push_back(t.render());
  }
  const TypeContext tctx{&index, env_start.enclosing_method_return, env_start.enclosing_class};

  std::vector<Candidate> candidates;
  bool any_context = false;
  for (const ExcodeSequence& ctx : contexts) {
    if (parse_excode(ctx).status == XParse::Status::Invalid) continue;
    std::vector<Template> templates;
    try {
      templates = identify_templates(ctx, history, env_cursor, index, models.excode, models.vocab, cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoCandidates) throw;
      continue;
    }
    any_context = true;
    for (const Template& t : templates) {
      if (!check_template(ctx, t.tokens, tctx)) continue;
      const ExcodeToken* previous = ctx.empty() ? nullptr : &ctx.back();
      for (CodeSequence& code : concretize_sequence(t.tokens, env_cursor, index, previous))
        candidates.push_back(Candidate{std::move(code), 0.0, t});
    }
  }
  if (!any_context) throw Error(ErrorCode::NoCandidates, "no template continues the statement");

  const std::vector<std::string> context_keys = lexical_keys(tokens, {method->body.range.first, cursor - 1});
  return rank(std::move(candidates), context_keys, models.lexical);
}

SuggestionList complete_source(const std::string& source, std::size_t offset, std::shared_ptr<const ClassIndex> index,
                               const Models& models, const ExpansionConfig& cfg) {
  if (offset > source.size()) throw Error(ErrorCode::BadRequest, "offset past end of file");
  // A buffer that stops inside a method gets its braces closed so the
  // method (and the cursor) still exist for the analysis.
  std::string text = source;
  int open = 0;
  for (const CodeToken& t : tokenize(source).tokens) open += t.lexeme == "{" ? 1 : t.lexeme == "}" ? -1 : 0;
  for (; open > 0; --open) text += "\n}";
  PartialProgram program = parse_partial(tokenize(text, "<input>"));
  // Classes of the file itself take part in resolution unless the project
  // already knows them.
  const ClassIndex own = build_class_index({&program}, {});
  auto merged = std::make_shared<ClassIndex>(index ? *index : ClassIndex{});
  for (const auto& [name, info] : own.classes())
    if (!merged->contains(name)) merged->put(info);
  std::size_t cursor = 0;
  const auto& toks = program.stream.tokens;
  while (cursor < toks.size() && toks[cursor].span.end <= offset) ++cursor;
  TypedProgram typed = resolve_types(std::move(program), merged);
  return complete_at(typed, cursor, models, cfg);
}

std::string format_suggestions(const SuggestionList& list, std::size_t k) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < list.size() && i < k; ++i) {
    std::snprintf(buf, sizeof buf, "%zu\t%.6f\t", i + 1, list[i].log_score);
    out += buf;
    out += list[i].text();
    out += '\n';
  }
  return out;
}

}  // namespace stmtc
