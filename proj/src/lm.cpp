#include "stmtc/lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include "stmtc/error.hpp"

namespace stmtc {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'L', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error(ErrorCode::IoError, "truncated model file");
  return v;
}

}  // namespace

NGramModel NGramModel::train(const std::vector<std::vector<std::string>>& sequences, int n, double lambda) {
  if (n < 1) throw Error(ErrorCode::BadRequest, "n-gram order must be >= 1");
  std::set<std::string> keyset{std::string(kUnk), std::string(kBos), std::string(kEos)};
  bool any = false;
  for (const auto& s : sequences) {
    for (const std::string& k : s) keyset.insert(k);
    any = any || !s.empty();
  }
  if (!any) throw Error(ErrorCode::EmptyCorpus, "no tokens to train on");

  std::vector<std::string> keys(keyset.begin(), keyset.end());
  std::unordered_map<std::string, Id> ids;
  for (Id i = 0; i < keys.size(); ++i) ids.emplace(keys[i], i);
  const Id bos = ids.at(std::string(kBos));
  const Id eos = ids.at(std::string(kEos));

  std::map<std::vector<Id>, std::uint64_t> counts;
  std::vector<Id> padded;
  for (const auto& s : sequences) {
    if (s.empty()) continue;
    padded.assign(static_cast<std::size_t>(n - 1), bos);
    for (const std::string& k : s) padded.push_back(ids.at(k));
    padded.push_back(eos);
    for (std::size_t i = 0; i < padded.size(); ++i) {
      for (std::size_t k = 1; k <= static_cast<std::size_t>(n) && i + k <= padded.size(); ++k)
        ++counts[std::vector<Id>(padded.begin() + i, padded.begin() + i + k)];
    }
  }
  std::vector<std::pair<std::vector<Id>, std::uint64_t>> grams(counts.begin(), counts.end());
  return build(n, lambda, std::move(keys), grams);
}

NGramModel NGramModel::build(int n, double lambda, std::vector<std::string> keys,
                             const std::vector<std::pair<std::vector<Id>, std::uint64_t>>& grams) {
  NGramModel m;
  m.n_ = n;
  m.lambda_ = lambda;
  m.keys_ = std::move(keys);
  for (Id i = 0; i < m.keys_.size(); ++i) m.ids_.emplace(m.keys_[i], i);
  m.unk_ = m.ids_.at(std::string(kUnk));
  m.bos_ = m.ids_.at(std::string(kBos));
  m.eos_ = m.ids_.at(std::string(kEos));
  m.nodes_.assign(1, Node{});
  // Grams arrive in lexicographic order, so every prefix precedes its extensions
  // and children are appended in increasing id order.
  for (const auto& [gram, c] : grams) {
    std::uint32_t cur = 0;
    for (std::size_t i = 0; i < gram.size(); ++i) {
      const Node* existing = m.child(m.nodes_[cur], gram[i]);
      if (existing) {
        cur = static_cast<std::uint32_t>(existing - m.nodes_.data());
      } else {
        if (i + 1 != gram.size()) throw Error(ErrorCode::FormatVersionMismatch, "gram without its prefix");
        const auto next = static_cast<std::uint32_t>(m.nodes_.size());
        m.nodes_[cur].children.emplace_back(gram[i], next);
        m.nodes_.push_back(Node{});
        cur = next;
      }
    }
    m.nodes_[cur].count = c;
    if (gram.size() == 1) m.total_ += c;
  }
  m.nodes_[0].count = m.total_;
  return m;
}

NGramModel::Id NGramModel::id(std::string_view key) const {
  auto it = ids_.find(std::string(key));
  return it == ids_.end() ? unk_ : it->second;
}

std::vector<NGramModel::Id> NGramModel::encode(const std::vector<std::string>& keys) const {
  std::vector<Id> out;
  out.reserve(keys.size());
  for (const std::string& k : keys) out.push_back(id(k));
  return out;
}

const NGramModel::Node* NGramModel::child(const Node& node, Id w) const {
  auto it = std::lower_bound(node.children.begin(), node.children.end(), w,
                             [](const std::pair<Id, std::uint32_t>& c, Id v) { return c.first < v; });
  if (it == node.children.end() || it->first != w) return nullptr;
  return &nodes_[it->second];
}

const NGramModel::Node* NGramModel::find(std::span<const Id> gram) const {
  const Node* cur = &nodes_[0];
  for (Id w : gram) {
    cur = child(*cur, w);
    if (!cur) return nullptr;
  }
  return cur;
}

std::uint64_t NGramModel::count_ids(std::span<const Id> gram) const {
  if (gram.empty()) return total_;
  const Node* node = find(gram);
  return node ? node->count : 0;
}

std::uint64_t NGramModel::count(const std::vector<std::string>& gram) const {
  for (const std::string& k : gram)
    if (!known(k)) return 0;
  return count_ids(encode(gram));
}

std::span<const NGramModel::Id> NGramModel::tail(std::span<const Id> history) const {
  const std::size_t keep = std::min(history.size(), static_cast<std::size_t>(n_ - 1));
  return history.subspan(history.size() - keep);
}

double NGramModel::unigram(Id w) const {
  const Node* node = child(nodes_[0], w);
  const double c = node ? static_cast<double>(node->count) : 0.0;
  return (c + 1.0) / (static_cast<double>(total_) + static_cast<double>(keys_.size()));
}

double NGramModel::raw(std::span<const Id> history, Id w) const {
  std::span<const Id> h = tail(history);
  double scale = 1.0;
  while (!h.empty()) {
    const Node* ctx = find(h);
    if (ctx && ctx->count > 0) {
      if (const Node* hit = child(*ctx, w)) {
        if (hit->count > 0) return scale * static_cast<double>(hit->count) / static_cast<double>(ctx->count);
      }
    }
    scale *= lambda_;
    h = h.subspan(1);
  }
  return scale * unigram(w);
}

double NGramModel::normalizer(std::span<const Id> history) const {
  std::span<const Id> h = tail(history);
  if (h.empty()) return 1.0;
  const double lower = normalizer(h.subspan(1));
  const Node* ctx = find(h);
  if (!ctx || ctx->count == 0 || ctx->children.empty()) return lambda_ * lower;
  double seen = 0.0;
  double seen_lower = 0.0;
  for (const auto& [w, idx] : ctx->children) {
    if (nodes_[idx].count == 0) continue;
    seen += static_cast<double>(nodes_[idx].count) / static_cast<double>(ctx->count);
    seen_lower += raw(h.subspan(1), w);
  }
  return seen + lambda_ * (lower - seen_lower);
}

std::vector<NGramModel::Id> NGramModel::history(const std::vector<std::string>& context) const {
  std::vector<Id> h(static_cast<std::size_t>(n_ - 1), bos_);
  for (const std::string& k : context) h.push_back(id(k));
  return h;
}

double NGramModel::score_next(const std::vector<std::string>& context, std::string_view token) const {
  const std::vector<Id> h = history(context);
  return prob(h, id(token));
}

double NGramModel::score_continuation(const std::vector<std::string>& context,
                                      const std::vector<std::string>& continuation) const {
  std::vector<Id> h = history(context);
  double total = 0.0;
  for (const std::string& k : continuation) {
    const Id w = id(k);
    total += std::log(prob(h, w));
    h.push_back(w);
  }
  return total;
}

double NGramModel::score_sequence(const std::vector<std::string>& sequence) const {
  return score_continuation({}, sequence);
}

std::vector<std::pair<std::vector<NGramModel::Id>, std::uint64_t>> NGramModel::records() const {
  std::vector<std::pair<std::vector<Id>, std::uint64_t>> out;
  std::vector<Id> path;
  auto walk = [&](auto&& self, const Node& node) -> void {
    for (const auto& [w, idx] : node.children) {
      path.push_back(w);
      out.emplace_back(path, nodes_[idx].count);
      self(self, nodes_[idx]);
      path.pop_back();
    }
  };
  walk(walk, nodes_[0]);
  return out;
}

// Layout (little-endian as written by the host):
//   "SCLM" u32 version, u32 n, f64 lambda,
//   u32 vocab size, then per key: u32 byte length + bytes (sorted keys),
//   u64 record count, then per record: u8 k, k x u32 key id, u64 count,
//   records in depth-first (lexicographic) order.
void NGramModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(n_));
  put<double>(out, lambda_);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(keys_.size()));
  for (const std::string& k : keys_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(k.size()));
    out.write(k.data(), static_cast<std::streamsize>(k.size()));
  }
  const auto recs = records();
  put<std::uint64_t>(out, recs.size());
  for (const auto& [gram, c] : recs) {
    put<std::uint8_t>(out, static_cast<std::uint8_t>(gram.size()));
    for (Id w : gram) put<std::uint32_t>(out, w);
    put<std::uint64_t>(out, c);
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

NGramModel NGramModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  char magic[4] = {};
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw Error(ErrorCode::FormatVersionMismatch, path + ": not a model file");
  if (get<std::uint32_t>(in) != kVersion) throw Error(ErrorCode::FormatVersionMismatch, path + ": unsupported version");
  const int n = static_cast<int>(get<std::uint32_t>(in));
  const double lambda = get<double>(in);
  const auto nkeys = get<std::uint32_t>(in);
  std::vector<std::string> keys(nkeys);
  for (std::string& k : keys) {
    k.resize(get<std::uint32_t>(in));
    in.read(k.data(), static_cast<std::streamsize>(k.size()));
    if (!in) throw Error(ErrorCode::IoError, "truncated model file");
  }
  const auto nrec = get<std::uint64_t>(in);
  std::vector<std::pair<std::vector<Id>, std::uint64_t>> grams;
  grams.reserve(nrec);
  for (std::uint64_t i = 0; i < nrec; ++i) {
    std::vector<Id> gram(get<std::uint8_t>(in));
    for (Id& w : gram) {
      w = get<std::uint32_t>(in);
      if (w >= nkeys) throw Error(ErrorCode::FormatVersionMismatch, "key id out of range");
    }
    const auto c = get<std::uint64_t>(in);
    grams.emplace_back(std::move(gram), c);
  }
  if (n < 1 || !std::is_sorted(keys.begin(), keys.end()))
    throw Error(ErrorCode::FormatVersionMismatch, path + ": malformed header");
  for (std::string_view r : {kUnk, kBos, kEos})
    if (!std::binary_search(keys.begin(), keys.end(), std::string(r)))
      throw Error(ErrorCode::FormatVersionMismatch, path + ": reserved key missing");
  return build(n, lambda, std::move(keys), grams);
}

bool NGramModel::operator==(const NGramModel& o) const {
  return n_ == o.n_ && lambda_ == o.lambda_ && keys_ == o.keys_ && records() == o.records();
}

}  // namespace stmtc
