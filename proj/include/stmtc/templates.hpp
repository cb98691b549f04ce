#pragma once

// Candidate templates: the syntax rule, the accessibility rule, their
// intersection, and depth-first top-K expansion under the excode model.

#include <limits>
#include <string>
#include <vector>

#include "stmtc/excode.hpp"
#include "stmtc/lm.hpp"
#include "stmtc/typecheck.hpp"

namespace stmtc {

struct ExpansionConfig {
  int K = 5;         // beam per step
  int max_len = 12;  // tokens per statement, context included
  int n = 6;         // model order
  /// Branches whose cumulative log-probability falls below this are cut.
  /// -inf disables the cut (exhaustive expansion up to the beam). The cut
  /// does not depend on K, so larger beams still return supersets.
  double min_path_logprob = -20.0;
};

struct Template {
  ExcodeSequence tokens;  // remaining part only
  bool ended = false;     // closed the statement (SEMI, or RP of a control header)
  double log_score = 0;   // sum of excode log-probabilities of the remaining part
};

/// The excode alphabet available to expansion: everything the excode model
/// saw in training plus the closed keyword/operator/separator sets.
class ExcodeVocabulary {
 public:
  ExcodeVocabulary() = default;
  explicit ExcodeVocabulary(std::vector<ExcodeToken> tokens);
  static ExcodeVocabulary from_model(const NGramModel& model);

  const std::vector<ExcodeToken>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& classes() const { return classes_; }
  /// Indices of the tokens of one syntax class.
  const std::vector<std::size_t>& members(std::size_t class_idx) const { return members_[class_idx]; }
  const std::string& rendering(std::size_t i) const { return renders_[i]; }

 private:
  std::vector<ExcodeToken> tokens_;  // sorted by rendering, unique
  std::vector<std::string> renders_;
  std::vector<std::string> classes_;
  std::vector<std::vector<std::size_t>> members_;
};

/// Closed keyword, operator and separator tokens.
std::vector<ExcodeToken> closed_excode_tokens();

/// r_syntax: vocabulary indices whose token keeps E a viable statement prefix.
std::vector<std::size_t> syntax_candidates(const ExcodeSequence& E, const ExcodeVocabulary& vocab);

/// r_access: vocabulary indices reachable at the completion position.
std::vector<std::size_t> access_candidates(const ExcodeSequence& E, const ScopeEnv& env,
                                           const ClassIndex& index, const ExcodeVocabulary& vocab);

/// r_access for a single token.
bool accessible_next(const ExcodeSequence& E, const ExcodeToken& t, const ScopeEnv& env, const ClassIndex& index);

/// r_syntax ∩ r_access, in vocabulary order.
std::vector<std::size_t> valid_next(const ExcodeSequence& E, const ScopeEnv& env, const ClassIndex& index,
                                    const ExcodeVocabulary& vocab);

/// Depth-first expansion of `context` (the excode of the statement typed so
/// far). `history` is the excode of the method before the statement, as
/// model ids without padding. Returns the remaining parts, best first.
/// Throws Error(NoCandidates) when nothing is valid at the root.
std::vector<Template> identify_templates(const ExcodeSequence& context, const std::vector<std::string>& history,
                                         const ScopeEnv& env, const ClassIndex& index, const NGramModel& model,
                                         const ExcodeVocabulary& vocab, const ExpansionConfig& cfg);

}  // namespace stmtc
