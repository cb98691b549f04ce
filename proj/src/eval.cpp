#include "stmtc/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "stmtc/error.hpp"

namespace stmtc {

const char* to_string(Mode m) { return m == Mode::SC ? "sc" : "ns"; }

const char* to_string(System s) {
  switch (s) {
    case System::AutoSC: return "autosc";
    case System::Lexical: return "lexical";
    case System::LexicalPA: return "lexical_pa";
  }
  return "?";
}

const char* to_string(Position p) {
  switch (p) {
    case Position::All: return "all";
    case Position::Q1: return "q1";
    case Position::Q2: return "q2";
    case Position::Q3: return "q3";
  }
  return "?";
}

const char* to_string(Axis a) {
  switch (a) {
    case Axis::K: return "K";
    case Axis::N: return "n";
    case Axis::Position: return "position";
    case Axis::TrainSize: return "train_size";
  }
  return "?";
}

Axis parse_axis(const std::string& s) {
  if (s == "K" || s == "k") return Axis::K;
  if (s == "n") return Axis::N;
  if (s == "position") return Axis::Position;
  if (s == "train_size" || s == "train-size") return Axis::TrainSize;
  throw Error(ErrorCode::BadRequest, "unknown sweep axis " + s);
}

std::vector<SuggestionPoint> suggestion_points(const TypedProgram& typed, std::size_t file, int max_len) {
  std::vector<SuggestionPoint> out;
  for (const ClassAst& c : typed.program.classes) {
    for (const MethodAst& m : c.methods) {
      for (const StatementUnit& u : statement_units(m)) {
        if (u.tokens.empty() || u.tokens.size() > static_cast<std::size_t>(max_len)) continue;
        for (std::size_t p = u.tokens.first; p <= u.tokens.last; ++p) out.push_back({file, p, u.tokens, u.header});
      }
    }
  }
  return out;
}

namespace {

bool token_matches(const ConcreteToken& c, const std::vector<CodeToken>& tokens, std::size_t i,
                   const ClassIndex& index) {
  const CodeToken& t = tokens[i];
  switch (c.kind) {
    case ConcreteToken::Kind::Text: return c.text == t.lexeme;
    case ConcreteToken::Kind::LitPlaceholder:
      return t.role == Role::Literal && is_subtype(literal_type(*t.literal_kind), TypeRef::parse(c.text), index);
    case ConcreteToken::Kind::NewVar: return is_decl_name(tokens, i);
  }
  return false;
}

bool matches(const Candidate& cand, const TypedProgram& typed, const SuggestionPoint& pt) {
  if (cand.tokens.size() != pt.remaining()) return false;
  for (std::size_t j = 0; j < cand.tokens.size(); ++j)
    if (!token_matches(cand.tokens[j], typed.program.stream.tokens, pt.cursor + j, *typed.index)) return false;
  return true;
}

// 1-based rank of the first hit, 0 when none.
std::size_t hit_rank(const SuggestionList& list, const TypedProgram& typed, const SuggestionPoint& pt) {
  for (std::size_t r = 0; r < list.size(); ++r)
    if (matches(list[r], typed, pt)) return r + 1;
  return 0;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

bool at_position(const SuggestionPoint& p, Position pos) {
  const std::size_t n = p.unit.size();
  switch (pos) {
    case Position::All: return true;
    case Position::Q1: return p.typed() == n / 4 + 1;
    case Position::Q2: return p.typed() == n / 2 + 1;
    case Position::Q3: return p.typed() == 3 * n / 4 + 1;
  }
  return false;
}

std::string token_kind(const TypedProgram& typed, std::size_t i) {
  const ExcodeSequence e = annotate(typed, {i, i});
  if (e.empty()) return "?";
  switch (e[0].kind) {
    case ExcodeToken::Kind::Keyword: return "KEYWORD";
    case ExcodeToken::Kind::Op: return "OP";
    case ExcodeToken::Kind::Sep: return "SEP";
    case ExcodeToken::Kind::Type: return "TYPE";
    case ExcodeToken::Kind::Var: return "VAR";
    case ExcodeToken::Kind::Lit:
    case ExcodeToken::Kind::Special: return "LIT";
    case ExcodeToken::Kind::Call: return "CALL";
    case ExcodeToken::Kind::CCall: return "CCALL";
    case ExcodeToken::Kind::Field: return "FIELD";
  }
  return "?";
}

}  // namespace

bool is_hit(const SuggestionList& list, const TypedProgram& typed, const SuggestionPoint& point, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::BadRequest, "k must be >= 1");
  const std::size_t r = hit_rank(list, typed, point);
  return r != 0 && r <= k;
}

std::vector<int> assign_folds(const Project& project, int folds) {
  if (folds < 1) throw Error(ErrorCode::BadRequest, "folds must be >= 1");
  std::vector<std::size_t> order(project.files.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const std::uint64_t ha = fnv1a(project.files[a].path), hb = fnv1a(project.files[b].path);
    return ha != hb ? ha < hb : project.files[a].path < project.files[b].path;
  });
  std::vector<int> fold(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) fold[order[r]] = static_cast<int>(r % static_cast<std::size_t>(folds));
  return fold;
}

EvalReport run_eval(const Project& project, const EvalConfig& cfg) {
  if (cfg.folds < 2 || project.files.size() < static_cast<std::size_t>(cfg.folds))
    throw Error(ErrorCode::CorpusTooSmall,
                std::to_string(project.files.size()) + " files for " + std::to_string(cfg.folds) + " folds");
  const std::vector<int> fold = assign_folds(project, cfg.folds);

  std::vector<SuggestionPoint> points;
  for (std::size_t f = 0; f < project.typed.size(); ++f) {
    for (const SuggestionPoint& p : suggestion_points(project.typed[f], f, cfg.expansion.max_len)) {
      if (cfg.mode == Mode::NS && p.cursor != p.unit.first) continue;
      if (!at_position(p, cfg.position)) continue;
      points.push_back(p);
    }
  }
  if (cfg.max_points > 0 && points.size() > cfg.max_points) {
    std::vector<SuggestionPoint> sample;
    sample.reserve(cfg.max_points);
    for (std::size_t j = 0; j < cfg.max_points; ++j) sample.push_back(points[j * points.size() / cfg.max_points]);
    points = std::move(sample);
  }

  EvalReport report;
  report.system = to_string(cfg.system);
  report.mode = to_string(cfg.mode);
  report.repeated_rate = repeated_statement_rate(project);

  for (int f = 0; f < cfg.folds; ++f) {
    std::vector<const SuggestionPoint*> mine;
    for (const SuggestionPoint& p : points)
      if (fold[p.file] == f) mine.push_back(&p);
    if (mine.empty()) continue;

    std::vector<bool> train_fold(static_cast<std::size_t>(cfg.folds), false);
    const int t = cfg.train_folds <= 0 ? cfg.folds - 1 : std::min(cfg.train_folds, cfg.folds - 1);
    for (int j = 1; j <= t; ++j) train_fold[static_cast<std::size_t>((f + j) % cfg.folds)] = true;
    std::vector<const TypedProgram*> train;
    for (std::size_t i = 0; i < project.typed.size(); ++i)
      if (train_fold[static_cast<std::size_t>(fold[i])]) train.push_back(&project.typed[i]);

    const Models models = Models::train(train, cfg.n, cfg.lambda);
    LexicalVocabulary lexvocab;
    if (cfg.system != System::AutoSC) lexvocab = LexicalVocabulary::build(train);

    for (const SuggestionPoint* p : mine) {
      const TypedProgram& typed = project.typed[p->file];
      SuggestionList list;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        if (cfg.system == System::AutoSC) list = complete_at(typed, p->cursor, models, cfg.expansion);
        else
          list = baseline_complete(typed, p->cursor, lexvocab, models.lexical, cfg.expansion,
                                   cfg.baseline_min_path_logprob, cfg.system == System::LexicalPA);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoCandidates) throw;
      }
      const auto t1 = std::chrono::steady_clock::now();
      report.total_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
      ++report.points;
      if (list.empty()) ++report.failures;
      const std::size_t r = hit_rank(list, typed, *p);
      for (std::size_t k = 1; k <= report.hits.size(); ++k)
        if (r != 0 && r <= k) ++report.hits[k - 1];
      auto& len = report.by_length[p->remaining()];
      ++len.first;
      len.second += r == 1;
      auto& kind = report.by_token[token_kind(typed, p->cursor)];
      ++kind.first;
      kind.second += r == 1;
    }
  }
  return report;
}

std::string format_report(const EvalReport& r) {
  std::ostringstream out;
  char buf[128];
  out << "system " << r.system << "  mode " << r.mode << "  points " << r.points << "  failures " << r.failures
      << '\n';
  for (std::size_t k : {1, 3, 5, 10}) {
    std::snprintf(buf, sizeof buf, "  top-%-2zu %6zu  %6.2f%%\n", k, r.hits[k - 1], 100.0 * r.accuracy(k));
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "  mean latency %.2f ms   repeated statements %.1f%%\n", r.mean_ms(),
                100.0 * r.repeated_rate);
  out << buf;
  out << "  top-1 by remaining length:";
  for (const auto& [len, v] : r.by_length) {
    std::snprintf(buf, sizeof buf, " %zu:%.1f%%(%zu)", len, v.first ? 100.0 * v.second / v.first : 0.0, v.first);
    out << buf;
  }
  out << "\n  top-1 by next token:";
  for (const auto& [kind, v] : r.by_token) {
    std::snprintf(buf, sizeof buf, " %s:%.1f%%(%zu)", kind.c_str(), v.first ? 100.0 * v.second / v.first : 0.0,
                  v.first);
    out << buf;
  }
  out << '\n';
  return out.str();
}

std::string report_jsonl(const EvalReport& r, const std::string& project) {
  std::string out;
  auto rec = [&](int k, const char* metric, double value) {
    nlohmann::json j = {{"project", project}, {"system", r.system}, {"mode", r.mode},
                        {"k", k},             {"metric", metric},   {"value", value}};
    out += j.dump();
    out += '\n';
  };
  for (std::size_t k = 1; k <= r.hits.size(); ++k) {
    rec(static_cast<int>(k), "hits", static_cast<double>(r.hits[k - 1]));
    rec(static_cast<int>(k), "accuracy", r.accuracy(k));
  }
  rec(0, "points", static_cast<double>(r.points));
  rec(0, "mean_ms", r.mean_ms());
  rec(0, "repeated_rate", r.repeated_rate);
  return out;
}

std::vector<SweepRow> sensitivity_sweep(const Project& project, const EvalConfig& base, Axis axis,
                                        const std::vector<int>& values) {
  std::vector<SweepRow> rows;
  for (int v : values) {
    EvalConfig cfg = base;
    switch (axis) {
      case Axis::K: cfg.expansion.K = v; break;
      case Axis::N:
        cfg.n = v;
        cfg.expansion.n = v;
        break;
      case Axis::Position:
        if (v < 1 || v > 3) throw Error(ErrorCode::BadRequest, "position quartile must be 1..3");
        cfg.position = static_cast<Position>(v);
        break;
      case Axis::TrainSize: cfg.train_folds = v; break;
    }
    rows.push_back({v, run_eval(project, cfg)});
  }
  return rows;
}

std::string sweep_csv(Axis axis, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "axis,value,system,points,top1,top3,top5,top10,mean_ms\n";
  char buf[256];
  for (const SweepRow& row : rows) {
    const EvalReport& r = row.report;
    std::snprintf(buf, sizeof buf, "%s,%d,%s,%zu,%.6f,%.6f,%.6f,%.6f,%.3f\n", to_string(axis), row.value,
                  r.system.c_str(), r.points, r.accuracy(1), r.accuracy(3), r.accuracy(5), r.accuracy(10),
                  r.mean_ms());
    out << buf;
  }
  return out.str();
}

}  // namespace stmtc
