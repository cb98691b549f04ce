// stmtc: train models, complete a statement, evaluate, generate a corpus.
//
// Exit codes: 0 ok, 1 internal error, 2 bad request.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stmtc/complete.hpp"
#include "stmtc/corpus.hpp"
#include "stmtc/error.hpp"
#include "stmtc/eval.hpp"

namespace fs = std::filesystem;
using namespace stmtc;

namespace {

constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kBadRequest = 2;

struct Options {
  std::string corpus;
  std::vector<std::string> stubs;
  std::string models = "models";
  int K = 5;
  int n = 6;
  int max_len = 12;
  int folds = 10;
  std::uint64_t seed = 7;
  std::string mode = "sc";
  std::size_t offset = 0;
  std::string file;
  std::string out;
  std::size_t top = 10;
  std::string system = "all";
  std::string axis;
  std::vector<int> values;
  std::size_t max_points = 0;
  int files = 200;
  int length_repeats = 6;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spill(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

Project open_project(const Options& o) {
  if (o.corpus.empty()) throw Error(ErrorCode::BadRequest, "--corpus is required");
  std::vector<SourceFile> files = read_corpus(o.corpus);
  if (files.empty()) throw Error(ErrorCode::EmptyCorpus, "no source files under " + o.corpus);
  return load_project(std::move(files), read_stubs(o.stubs));
}

ExpansionConfig expansion(const Options& o) {
  ExpansionConfig c;
  c.K = o.K;
  c.n = o.n;
  c.max_len = o.max_len;
  return c;
}

int cmd_train(const Options& o) {
  const Project p = open_project(o);
  std::vector<const TypedProgram*> all;
  for (const TypedProgram& t : p.typed) all.push_back(&t);
  const Models m = Models::train(all, o.n);
  const std::string dir = o.out.empty() ? o.models : o.out;
  m.save(dir);
  std::cout << "trained on " << p.files.size() << " files: " << m.excode.vocab().size() << " excode keys, "
            << m.lexical.vocab().size() << " lexical keys -> " << dir << "\n";
  return kOk;
}

int cmd_complete(const Options& o) {
  if (o.file.empty()) throw Error(ErrorCode::BadRequest, "--file is required");
  const Models m = Models::load(o.models);
  std::shared_ptr<const ClassIndex> index;
  if (!o.corpus.empty()) {
    index = open_project(o).index;
  } else {
    index = std::make_shared<const ClassIndex>(build_class_index({}, read_stubs(o.stubs)));
  }
  SuggestionList list;
  try {
    list = complete_source(slurp(o.file), o.offset, index, m, expansion(o));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoCandidates) throw;
    std::cerr << "no suggestion: " << e.what() << "\n";
    return kOk;
  }
  std::cout << format_suggestions(list, o.top);
  return kOk;
}

int cmd_eval(const Options& o) {
  const Project p = open_project(o);
  EvalConfig cfg;
  cfg.expansion = expansion(o);
  cfg.n = o.n;
  cfg.folds = o.folds;
  cfg.mode = o.mode == "ns" ? Mode::NS : Mode::SC;
  cfg.max_points = o.max_points;
  std::vector<System> systems;
  if (o.system == "all") systems = {System::AutoSC, System::Lexical, System::LexicalPA};
  else if (o.system == "autosc") systems = {System::AutoSC};
  else if (o.system == "lexical") systems = {System::Lexical};
  else if (o.system == "lexical_pa") systems = {System::LexicalPA};
  else throw Error(ErrorCode::BadRequest, "unknown system " + o.system);

  const std::string project = fs::path(o.corpus).filename().string();
  if (!o.out.empty()) fs::create_directories(o.out);
  if (!o.axis.empty()) {
    const Axis axis = parse_axis(o.axis);
    if (o.values.empty()) throw Error(ErrorCode::BadRequest, "--values is required with --axis");
    std::string csv;
    for (System s : systems) {
      cfg.system = s;
      const std::string part = sweep_csv(axis, sensitivity_sweep(p, cfg, axis, o.values));
      csv += csv.empty() ? part : part.substr(part.find('\n') + 1);
    }
    std::cout << csv;
    if (!o.out.empty()) spill(fs::path(o.out) / ("sweep_" + std::string(to_string(axis)) + ".csv"), csv);
    return kOk;
  }
  std::string text, jsonl;
  for (System s : systems) {
    cfg.system = s;
    const EvalReport r = run_eval(p, cfg);
    text += format_report(r);
    jsonl += report_jsonl(r, project);
  }
  std::cout << text;
  if (!o.out.empty()) {
    spill(fs::path(o.out) / "report.txt", text);
    spill(fs::path(o.out) / "report.jsonl", jsonl);
  }
  return kOk;
}

int cmd_gen_corpus(const Options& o) {
  if (o.out.empty()) throw Error(ErrorCode::BadRequest, "--out is required");
  GenConfig g;
  g.seed = o.seed;
  g.files = o.files;
  g.length_repeats = o.length_repeats;
  const std::vector<SourceFile> files = generate_corpus(g);
  fs::create_directories(o.out);
  if (files.empty()) std::cerr << "warning: corpus size 0, wrote an empty directory\n";
  write_corpus(o.out, files);
  std::cout << "wrote " << files.size() << " files to " << o.out << "\n";
  return kOk;
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::EmptyCorpus:
    case ErrorCode::IoError:
    case ErrorCode::FormatVersionMismatch:
    case ErrorCode::PositionOutsideMethod:
    case ErrorCode::CursorOutsideMethod:
    case ErrorCode::CorpusTooSmall:
    case ErrorCode::BadRequest: return kBadRequest;
    default: return kInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statement completion over abstracted token models"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file with any of the long options below");

  Options o;
  app.add_option("--corpus", o.corpus, "Corpus root (*.aj, *.java)");
  app.add_option("--stubs", o.stubs, "Class stub files")->delimiter(',');
  app.add_option("--models", o.models, "Model directory")->capture_default_str();
  app.add_option("--k", o.K, "Templates kept per expansion step")->check(CLI::Range(1, 64))->capture_default_str();
  app.add_option("--n", o.n, "n-gram order")->check(CLI::Range(1, 12))->capture_default_str();
  app.add_option("--max-len", o.max_len, "Maximum statement length")->check(CLI::Range(1, 64))->capture_default_str();
  app.add_option("--folds", o.folds, "Cross-validation folds")->check(CLI::Range(2, 1000))->capture_default_str();
  app.add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  app.add_option("--mode", o.mode, "sc: every point, ns: statement starts")
      ->check(CLI::IsMember({"sc", "ns"}))
      ->capture_default_str();
  app.add_option("--offset", o.offset, "Cursor byte offset in --file");
  app.add_option("--file", o.file, "Source file to complete in");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--top", o.top, "Suggestions printed by complete")->capture_default_str();
  app.add_option("--system", o.system, "autosc, lexical, lexical_pa or all")->capture_default_str();
  app.add_option("--axis", o.axis, "Sweep axis: K, n, position, train_size");
  app.add_option("--values", o.values, "Sweep values")->delimiter(',');
  app.add_option("--max-points", o.max_points, "Evaluate at most this many evenly spaced points (0 = all)")
      ->capture_default_str();
  app.add_option("--files", o.files, "Client files generated")->check(CLI::Range(0, 100000))->capture_default_str();
  app.add_option("--length-repeats", o.length_repeats, "Generated `int v = list.getLength();` statements")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  auto* train = app.add_subcommand("train", "Train both models on --corpus, write them to --out (or --models)");
  auto* complete = app.add_subcommand("complete", "Complete the statement at --offset of --file");
  auto* eval = app.add_subcommand("eval", "Cross-validated accuracy, or a sweep with --axis/--values");
  auto* gen = app.add_subcommand("gen-corpus", "Write a synthetic corpus to --out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadRequest;
  }
  try {
    if (*train) return cmd_train(o);
    if (*complete) return cmd_complete(o);
    if (*eval) return cmd_eval(o);
    if (*gen) return cmd_gen_corpus(o);
  } catch (const Error& e) {
    std::cerr << "stmtc: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "stmtc: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
