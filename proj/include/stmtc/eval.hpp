#pragma once

// Evaluation: suggestion points, hit counting, fold-based cross-validation
// for AutoSC and the two lexical baselines, and sensitivity sweeps.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stmtc/complete.hpp"
#include "stmtc/corpus.hpp"

namespace stmtc {

enum class Mode : std::uint8_t { SC, NS };
enum class System : std::uint8_t { AutoSC, Lexical, LexicalPA };
/// Completion position inside a statement: every point, or the quartile
/// points (⌊n/4⌋+1, ⌊n/2⌋+1, ⌊3n/4⌋+1 tokens already typed).
enum class Position : std::uint8_t { All, Q1, Q2, Q3 };

const char* to_string(Mode m);
const char* to_string(System s);
const char* to_string(Position p);

struct SuggestionPoint {
  std::size_t file = 0;    // index into Project::files
  std::size_t cursor = 0;  // completion happens right before this token
  TokRange unit;           // the statement (or control header) being completed
  bool header = false;

  std::size_t typed() const { return cursor - unit.first; }
  std::size_t remaining() const { return unit.last + 1 - cursor; }
};

/// One point before every token of every unit no longer than `max_len`.
std::vector<SuggestionPoint> suggestion_points(const TypedProgram& typed, std::size_t file, int max_len);

/// Does some candidate among the top k reproduce tokens [cursor, unit.last]?
/// `<lit:T>` matches a literal whose type is a subtype of T and `<newvar>`
/// matches a declared name.
bool is_hit(const SuggestionList& list, const TypedProgram& typed, const SuggestionPoint& point, std::size_t k);

struct EvalConfig {
  ExpansionConfig expansion;
  int n = 6;
  double lambda = 0.4;
  int folds = 10;
  Mode mode = Mode::SC;
  Position position = Position::All;
  System system = System::AutoSC;
  /// Training folds per test fold: the next `train_folds` folds cyclically;
  /// <= 0 means all other folds.
  int train_folds = 0;
  /// Evaluate an evenly spaced subset of at most this many points; 0 = all.
  std::size_t max_points = 0;
  /// Path floor for the baselines' token-level search (their per-token
  /// scores are sums over subtokens, so the floor sits lower).
  double baseline_min_path_logprob = -40.0;
};

struct EvalReport {
  std::string system;
  std::string mode;
  std::size_t points = 0;
  std::array<std::size_t, 10> hits{};  // hits[k-1] = top-k hits
  std::size_t failures = 0;            // requests that returned no suggestion
  double total_ms = 0;
  double repeated_rate = 0;
  // remaining length -> {points, top-1 hits}
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> by_length;
  // excode kind of the first expected token -> {points, top-1 hits}
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_token;

  double accuracy(std::size_t k) const {
    return points == 0 ? 0.0 : static_cast<double>(hits[k - 1]) / static_cast<double>(points);
  }
  double mean_ms() const { return points == 0 ? 0.0 : total_ms / static_cast<double>(points); }
};

/// Deterministic fold of every file: files sorted by a hash of their path,
/// then dealt round-robin.
std::vector<int> assign_folds(const Project& project, int folds);

/// Throws Error(CorpusTooSmall) when folds < 2 or there are fewer files than folds.
EvalReport run_eval(const Project& project, const EvalConfig& cfg);

std::string format_report(const EvalReport& r);
/// One JSON object per line: {"project","system","mode","k","metric","value"}.
std::string report_jsonl(const EvalReport& r, const std::string& project);

enum class Axis : std::uint8_t { K, N, Position, TrainSize };
Axis parse_axis(const std::string& s);
const char* to_string(Axis a);

struct SweepRow {
  int value = 0;
  EvalReport report;
};

std::vector<SweepRow> sensitivity_sweep(const Project& project, const EvalConfig& base, Axis axis,
                                        const std::vector<int>& values);
std::string sweep_csv(Axis axis, const std::vector<SweepRow>& rows);

// Baselines ---------------------------------------------------------------

/// Whole lexical tokens seen in training (identifiers, keywords, operators,
/// separators, special literals, literal and new-variable placeholders).
struct LexicalVocabulary {
  std::vector<ConcreteToken> tokens;
  std::vector<std::vector<std::string>> keys;  // lexical keys of each token

  static LexicalVocabulary build(const std::vector<const TypedProgram*>& programs);
};

/// Token-by-token beam search (width K) with the lexical model only. With
/// `program_analysis` every step must also keep the statement parseable and
/// its names accessible, and finished statements must type-check.
SuggestionList baseline_complete(const TypedProgram& typed, std::size_t cursor, const LexicalVocabulary& vocab,
                                 const NGramModel& lexical, const ExpansionConfig& cfg, double min_path_logprob,
                                 bool program_analysis);

}  // namespace stmtc
