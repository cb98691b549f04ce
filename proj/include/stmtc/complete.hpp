#pragma once

// Statement completion: templates -> type filter -> concretization -> lexical
// ranking.

#include <memory>
#include <string>
#include <vector>

#include "stmtc/excode.hpp"
#include "stmtc/lm.hpp"
#include "stmtc/templates.hpp"

namespace stmtc {

inline constexpr std::string_view kNewVarKey = "<newvar>";

/// Placeholder key of a literal type: "<lit:int>".
std::string lit_key(const TypeRef& type);

/// True when token `i` names a newly declared local: an identifier right
/// after a type (a primitive/String keyword or another identifier).
bool is_decl_name(const std::vector<CodeToken>& tokens, std::size_t i);

/// Lexical keys of one code token: identifier subtokens, literal
/// placeholders (except null, 0 and ""), <newvar> for declared names, and
/// the lexeme for everything else.
void append_lexical_keys(const std::vector<CodeToken>& tokens, std::size_t i, std::vector<std::string>& out);
std::vector<std::string> lexical_keys(const std::vector<CodeToken>& tokens, TokRange range);
std::vector<std::string> lexical_keys(const CodeSequence& seq);

/// Training streams, one per method body.
std::vector<std::vector<std::string>> excode_method_streams(const TypedProgram& typed);
std::vector<std::vector<std::string>> lexical_method_streams(const TypedProgram& typed);

struct Models {
  NGramModel excode;
  NGramModel lexical;
  ExcodeVocabulary vocab;

  static Models train(const std::vector<const TypedProgram*>& programs, int n, double lambda = 0.4);
  static Models from(NGramModel excode, NGramModel lexical);

  /// Two files in `dir`: excode.sclm and lexical.sclm.
  void save(const std::string& dir) const;
  static Models load(const std::string& dir);
};

struct Candidate {
  CodeSequence tokens;
  double log_score = 0;
  Template source;

  std::string text() const { return render(tokens); }
};

using SuggestionList = std::vector<Candidate>;

/// Merges identical texts (keeping the best score) and sorts by
/// (-log_score, text).
SuggestionList rank(std::vector<Candidate> candidates, const std::vector<std::string>& context_keys,
                    const NGramModel& lexical);

/// Where the statement around `cursor` starts (token index).
std::size_t statement_start(const TypedProgram& typed, const MethodAst& method, std::size_t cursor);

/// Completion with the cursor right before token `cursor` of an analysed
/// file. Throws Error(CursorOutsideMethod) and Error(NoCandidates).
SuggestionList complete_at(const TypedProgram& typed, std::size_t cursor, const Models& models,
                           const ExpansionConfig& cfg);

/// Completion at a byte offset of source text; `index` holds the project's
/// classes. Tokens that end after `offset` count as not yet typed.
SuggestionList complete_source(const std::string& source, std::size_t offset, std::shared_ptr<const ClassIndex> index,
                               const Models& models, const ExpansionConfig& cfg);

/// `rank TAB log_score TAB tokens`, one line per candidate, at most `k` lines.
std::string format_suggestions(const SuggestionList& list, std::size_t k);

}  // namespace stmtc
