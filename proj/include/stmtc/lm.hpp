#pragma once

// Count-based n-gram model with stupid backoff, an add-one unigram floor,
// and per-context renormalization. Used twice: over excode renderings and
// over lexical subtokens.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stmtc {

inline constexpr std::string_view kUnk = "<unk>";
inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";

class NGramModel {
 public:
  using Id = std::uint32_t;

  NGramModel() = default;

  /// Counts every k-gram (k <= n) of each sequence padded with n-1 <s> and
  /// one </s>. Throws Error(EmptyCorpus) when there is nothing to count.
  static NGramModel train(const std::vector<std::vector<std::string>>& sequences, int n,
                          double lambda = 0.4);

  int order() const { return n_; }
  double lambda() const { return lambda_; }
  /// Sorted keys, including <unk>, <s> and </s>.
  const std::vector<std::string>& vocab() const { return keys_; }
  std::size_t vocab_size() const { return keys_.size(); }
  std::uint64_t total() const { return total_; }

  Id id(std::string_view key) const;  // <unk> for unseen keys
  bool known(std::string_view key) const { return ids_.contains(std::string(key)); }
  std::vector<Id> encode(const std::vector<std::string>& keys) const;
  Id bos() const { return bos_; }
  Id eos() const { return eos_; }

  std::uint64_t count(const std::vector<std::string>& gram) const;
  std::uint64_t count_ids(std::span<const Id> gram) const;

  /// P(token | context). The context is implicitly preceded by n-1 <s>.
  double score_next(const std::vector<std::string>& context, std::string_view token) const;
  /// Sum of log P over the sequence, with start padding and no end term.
  double score_sequence(const std::vector<std::string>& sequence) const;
  /// Sum of log P over `continuation` given `context` (both unpadded keys).
  double score_continuation(const std::vector<std::string>& context,
                            const std::vector<std::string>& continuation) const;

  // Id-level scoring. `history` is already padded; only its last n-1 ids count.
  double raw(std::span<const Id> history, Id w) const;
  double normalizer(std::span<const Id> history) const;
  double prob(std::span<const Id> history, Id w) const { return raw(history, w) / normalizer(history); }
  /// Padded history for a context of keys.
  std::vector<Id> history(const std::vector<std::string>& context) const;

  void save(const std::string& path) const;
  static NGramModel load(const std::string& path);

  bool operator==(const NGramModel& o) const;

 private:
  struct Node {
    std::uint64_t count = 0;
    std::vector<std::pair<Id, std::uint32_t>> children;  // sorted by id
  };

  static NGramModel build(int n, double lambda, std::vector<std::string> keys,
                          const std::vector<std::pair<std::vector<Id>, std::uint64_t>>& grams);
  const Node* find(std::span<const Id> gram) const;
  const Node* child(const Node& node, Id w) const;
  std::span<const Id> tail(std::span<const Id> history) const;
  double unigram(Id w) const;
  std::vector<std::pair<std::vector<Id>, std::uint64_t>> records() const;

  int n_ = 1;
  double lambda_ = 0.4;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, Id> ids_;
  Id unk_ = 0, bos_ = 0, eos_ = 0;
  std::uint64_t total_ = 0;
  std::vector<Node> nodes_;  // nodes_[0] is the empty gram
};

}  // namespace stmtc
