#pragma once

// Reference implementations for the acceptance checks. They share no code
// with the library beyond the token and type value types: the statement
// grammar is a declarative CFG run through an Earley recognizer, the access
// rule works on plain tables, and the language model is computed straight
// from the backoff formula with a brute-force normalizer.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stmtc/excode.hpp"

namespace stmtc::oracle {

// Statement grammar -----------------------------------------------------------

/// Terminal symbol of an excode token in the reference grammar.
std::string terminal(const ExcodeToken& t);

class Grammar {
 public:
  Grammar();

  struct Rule {
    std::string lhs;
    std::vector<std::string> rhs;
  };
  const std::vector<Rule>& rules() const { return rules_; }
  bool nonterminal(const std::string& s) const { return by_lhs_.contains(s); }
  const std::vector<std::size_t>& productions(const std::string& s) const { return by_lhs_.at(s); }
  bool nullable(const std::string& s) const { return nullable_.contains(s); }

 private:
  void add(std::string lhs, std::vector<std::string> rhs);
  std::vector<Rule> rules_;
  std::map<std::string, std::vector<std::size_t>> by_lhs_;
  std::set<std::string> nullable_;
};

/// Incremental Earley recognizer: push() one terminal at a time.
class Recognizer {
 public:
  explicit Recognizer(const Grammar& g);
  /// False (and no state change) when no derivation starts with the extended input.
  bool push(const std::string& terminal);
  void pop();
  /// The input so far is a complete statement.
  bool complete() const;

 private:
  struct Item {
    std::size_t rule, dot, origin;
    auto operator<=>(const Item&) const = default;
  };
  using Set = std::set<Item>;
  void close(std::size_t k);
  const Grammar& g_;
  std::vector<Set> chart_;
};

// Access rule -----------------------------------------------------------------

struct ClassTable {
  struct Member {
    std::string name;
    int argc = -1;  // -1: field
    std::string type;
  };
  std::string name, super;
  std::vector<Member> members;
  std::vector<int> ctor_argcs;
};

struct World {
  std::vector<ClassTable> classes;
  std::vector<std::string> var_types;  // types of the accessible variables
  std::string enclosing_class;
};

/// Is `t` accessible right after `E`?
bool accessible(const ExcodeSequence& E, const ExcodeToken& t, const World& w);

/// Every continuation of `context` reachable by adding, one at a time, tokens
/// of `vocab` that keep the statement derivable and pass the access rule,
/// stopping at a finished statement or at `max_len` tokens in total.
std::set<std::string> enumerate_templates(const ExcodeSequence& context, const std::vector<ExcodeToken>& vocab,
                                          const World& w, int max_len);

// Language model --------------------------------------------------------------

class BackoffOracle {
 public:
  BackoffOracle(const std::vector<std::vector<std::string>>& sequences, int n, double lambda);
  double prob(const std::vector<std::string>& context, const std::string& token) const;
  const std::vector<std::string>& vocab() const { return vocab_; }

 private:
  double raw(const std::vector<std::string>& h, const std::string& w) const;
  std::size_t count(const std::vector<std::string>& g) const;
  int n_;
  double lambda_;
  std::map<std::vector<std::string>, std::size_t> counts_;
  std::vector<std::string> vocab_;
  std::size_t total_ = 0;
};

}  // namespace stmtc::oracle
