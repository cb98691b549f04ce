#include "stmtc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "stmtc/complete.hpp"
#include "stmtc/error.hpp"
#include "stmtc/excode.hpp"

namespace fs = std::filesystem;

namespace stmtc {

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<SourceFile> read_corpus(const std::string& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCode::IoError, root + " is not a directory");
  std::vector<SourceFile> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext != ".aj" && ext != ".java") continue;
    out.push_back({fs::relative(entry.path(), root).generic_string(), slurp(entry.path())});
  }
  std::sort(out.begin(), out.end(), [](const SourceFile& a, const SourceFile& b) { return a.path < b.path; });
  return out;
}

std::vector<StubFile> read_stubs(const std::vector<std::string>& paths) {
  std::vector<StubFile> out;
  for (const std::string& p : paths) out.push_back({p, slurp(p)});
  return out;
}

void write_corpus(const std::string& root, const std::vector<SourceFile>& files) {
  fs::create_directories(root);
  for (const SourceFile& f : files) {
    const fs::path p = fs::path(root) / f.path;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
    out << f.text;
  }
}

Project load_project(std::vector<SourceFile> files, const std::vector<StubFile>& stubs) {
  Project project;
  std::vector<PartialProgram> programs;
  programs.reserve(files.size());
  for (const SourceFile& f : files) programs.push_back(parse_partial(tokenize(f.text, f.path)));
  std::vector<const PartialProgram*> ptrs;
  for (const PartialProgram& p : programs) ptrs.push_back(&p);
  project.index = std::make_shared<const ClassIndex>(build_class_index(ptrs, stubs));
  project.typed.reserve(programs.size());
  for (PartialProgram& p : programs) project.typed.push_back(resolve_types(std::move(p), project.index));
  project.files = std::move(files);
  return project;
}

std::size_t count_excode_occurrences(const Project& project, const std::vector<std::string>& needle) {
  if (needle.empty()) return 0;
  std::size_t count = 0;
  for (const TypedProgram& t : project.typed) {
    for (const auto& s : excode_method_streams(t)) {
      for (std::size_t i = 0; i + needle.size() <= s.size(); ++i)
        if (std::equal(needle.begin(), needle.end(), s.begin() + static_cast<std::ptrdiff_t>(i))) ++count;
    }
  }
  return count;
}

double repeated_statement_rate(const Project& project) {
  std::unordered_map<std::string, std::size_t> seen;
  std::vector<std::string> units;
  for (const TypedProgram& t : project.typed) {
    for (const ClassAst& c : t.program.classes) {
      for (const MethodAst& m : c.methods) {
        for (const StatementUnit& u : statement_units(m)) {
          std::string text;
          for (const std::string& k : lexical_keys(t.program.stream.tokens, u.tokens)) text += k + ' ';
          ++seen[text];
          units.push_back(std::move(text));
        }
      }
    }
  }
  if (units.empty()) return 0.0;
  std::size_t repeated = 0;
  for (const std::string& u : units) repeated += seen[u] > 1;
  return static_cast<double>(repeated) / static_cast<double>(units.size());
}

// ---------------------------------------------------------------------------
// Generator

namespace {

const char* const kLibrary[][2] = {
    {"lib/Node.aj", R"(class Node {
  String name;
  Node parent;
  int type;

  Node(String name) {
    this.name = name;
  }

  NodeList getChildNodes() {
    return new NodeListImpl();
  }

  Node getParentNode() {
    return parent;
  }

  String getNodeName() {
    return name;
  }

  int getNodeType() {
    return type;
  }

  boolean hasChildNodes() {
    return false;
  }

  Node getFirstChild() {
    return null;
  }

  void appendChild(Node child) {
    child.parent = this;
  }
}
)"},
    {"lib/NodeList.aj", R"(class NodeList {
  int length;

  int getLength() {
    return length;
  }

  Node item(int index) {
    return null;
  }

  boolean isEmpty() {
    return length == 0;
  }
}

class NodeListImpl extends NodeList {
  void add(Node node) {
    length = length + 1;
  }
}
)"},
    {"lib/NodeFilter.aj", R"(class NodeFilter {
  int mask;

  boolean accept(Node node) {
    return node.getNodeType() == mask;
  }
}
)"},
    {"lib/Element.aj", R"(class Element extends Node {
  Element(String tag) {
    name = tag;
  }

  String getAttribute(String key) {
    return null;
  }

  void setAttribute(String key, String value) {
  }

  String getTagName() {
    return name;
  }
}

class Document {
  Node root;

  Element createElement(String tag) {
    return new Element(tag);
  }

  Node getRoot() {
    return root;
  }

  Element getElementById(String id) {
    return null;
  }
}
)"},
    {"lib/Report.aj", R"(class Report {
  String title;
  int count;

  String getTitle() {
    return title;
  }

  void setTitle(String title) {
    this.title = title;
  }

  int getCount() {
    return count;
  }

  void addEntry(Entry entry) {
    count = count + 1;
  }
}

class Entry {
  String key;
  int value;

  Entry(String key, int value) {
    this.key = key;
    this.value = value;
  }

  String getKey() {
    return key;
  }

  int getValue() {
    return value;
  }
}

class ReportList {
  int total;

  void add(Report report) {
    total = total + 1;
  }

  void addAll(ReportList other) {
    total = total + other.size();
  }

  int size() {
    return total;
  }

  Report get(int index) {
    return null;
  }

  boolean isEmpty() {
    return total == 0;
  }
}
)"},
    {"lib/Util.aj", R"(class Buffer {
  String text;

  void append(String part) {
  }

  String toString() {
    return text;
  }

  int length() {
    return text.length();
  }

  void clear() {
    text = "";
  }
}

class Counter {
  int value;

  void increment() {
    value = value + 1;
  }

  int get() {
    return value;
  }

  void reset() {
    value = 0;
  }
}
)"},
};

const std::map<std::string, std::vector<std::string>>& name_pools() {
  static const std::map<std::string, std::vector<std::string>> pools = {
      {"Node", {"node", "child", "current", "parent", "root", "first", "next", "target", "head", "leaf"}},
      {"NodeList", {"children", "nodes", "list", "kids", "items", "childList", "nodeList", "elements"}},
      {"NodeListImpl", {"impl", "collected", "matches", "buffered", "found"}},
      {"String", {"name", "title", "label", "text", "key", "value", "tag", "str", "id", "caption"}},
      {"int", {"count", "len", "size", "total", "index", "num", "pos", "idx", "depth", "width"}},
      {"boolean", {"empty", "done", "ok", "flag", "hasKids", "valid"}},
      {"Buffer", {"buffer", "buf", "out", "sb", "builder"}},
      {"Counter", {"counter", "hits", "visits", "tally"}},
      {"Element", {"element", "elem", "el", "div", "cell"}},
      {"Document", {"doc", "document", "dom", "page"}},
      {"Report", {"report", "rep", "summary", "result"}},
      {"ReportList", {"reports", "results", "batch", "history"}},
      {"Entry", {"entry", "ent", "pair", "row"}},
      {"NodeFilter", {"filter", "nodeFilter", "check", "predicate"}},
  };
  return pools;
}

// Qualifiers a file combines with the base names ("src" + "node" -> srcNode),
// so local names differ between files the way they do in real projects.
const char* const kQualifiers[] = {
    "src",    "dst",     "tmp",    "old",     "new",     "cur",     "prev",    "last",   "main",    "inner",
    "outer",  "local",   "cached", "top",     "base",    "extra",   "left",    "right",  "saved",   "orig",
    "raw",    "fixed",   "final",  "spare",   "input",   "output",  "alt",     "other",  "my",      "the",
    "some",   "each",    "next",   "first",   "second",  "third",   "start",   "end",    "min",     "max",
    "parsed", "loaded",  "stored", "pending", "visible", "hidden",  "active",  "idle",   "primary", "backup",
    "shared", "private", "global", "scoped",  "lazy",    "eager",   "dirty",   "clean",  "stale",   "fresh",
    "upper",  "lower",   "head",   "tail",    "mid",     "edge",    "inbound", "remote", "nested",  "flat",
    "sorted", "merged",  "split",  "joined",  "copied",  "cloned",  "mapped",  "reused", "queued",  "sent"};

const char* const kClassStems[] = {"TreeWalker", "ReportBuilder", "DomVisitor", "Indexer",   "Exporter",
                                   "Collector",  "Scanner",       "Formatter",  "Printer",   "Loader",
                                   "Validator",  "Renderer",      "Merger",     "Inspector", "Summarizer"};
const char* const kMethodVerbs[] = {"process", "visit", "collect", "build", "scan", "render", "check",
                                    "update",  "walk",  "handle",  "count", "merge", "emit",   "load"};
const char* const kMethodNouns[] = {"Node", "Tree", "Items", "Report", "Children", "Entries", "Page", "Block"};
const char* const kTags[] = {"\"div\"", "\"span\"", "\"p\"", "\"item\"", "\"row\""};
const char* const kKeys[] = {"\"id\"", "\"name\"", "\"class\"", "\"title\""};

struct Var {
  std::string name;
  std::string type;
};

class Gen {
 public:
  explicit Gen(const GenConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  std::vector<SourceFile> run() {
    std::vector<SourceFile> out;
    for (const auto& lib : kLibrary) out.push_back({lib[0], lib[1]});
    const int files = std::max(cfg_.files, 0);
    // Spread the getLength statements over evenly spaced files.
    std::set<int> length_files;
    const int reps = std::min(std::max(cfg_.length_repeats, 0), files);
    for (int r = 0; r < reps; ++r) length_files.insert(static_cast<int>(static_cast<long long>(r) * files / reps));
    for (int f = 0; f < files; ++f) {
      const std::string cls = std::string(kClassStems[static_cast<std::size_t>(f) % std::size(kClassStems)]) +
                              std::to_string(f);
      out.push_back({"app/" + cls + ".aj", client(cls, length_files.contains(f))});
    }
    return out;
  }

 private:
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }
  bool chance(double p) { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }
  template <typename T, std::size_t N>
  const T& pick(const T (&arr)[N]) {
    return arr[below(N)];
  }

  // --- scope -------------------------------------------------------------

  std::vector<std::string> qualifiers_;  // the current file's qualifiers
  std::vector<Var> scope_;          // fields, params and visible locals
  std::set<std::string> taken_;     // every name used in the current method (no shadowing)
  std::string out_;
  int depth_ = 0;

  std::vector<const Var*> of(const std::string& type) const {
    std::vector<const Var*> v;
    for (const Var& x : scope_)
      if (x.type == type) v.push_back(&x);
    return v;
  }
  bool has(const std::string& type) const { return !of(type).empty(); }
  std::string any(const std::string& type) {
    auto v = of(type);
    return v[below(v.size())]->name;
  }

  std::string qualified(const std::string& base) {
    if (!chance(cfg_.qualify_rate)) return base;
    std::string name = qualifiers_[below(qualifiers_.size())];
    name += static_cast<char>(std::toupper(static_cast<unsigned char>(base[0])));
    name += base.substr(1);
    return name;
  }

  std::string fresh(const std::string& type) {
    const auto& pool = name_pools().at(type);
    std::vector<std::string> free;
    for (const std::string& base : pool) {
      const std::string n = qualified(base);
      if (!taken_.contains(n)) free.push_back(n);
    }
    std::string name;
    if (!free.empty()) {
      name = free[below(free.size())];
    } else {
      for (int k = 2;; ++k) {
        name = pool[below(pool.size())] + std::to_string(k);
        if (!taken_.contains(name)) break;
      }
    }
    taken_.insert(name);
    return name;
  }

  void line(const std::string& s) {
    out_.append(static_cast<std::size_t>(4 + 2 * depth_), ' ');
    out_ += s;
    out_ += '\n';
  }

  std::string declare(const std::string& type, const std::string& init) {
    const std::string name = fresh(type);
    line(type + " " + name + " = " + init + ";");
    scope_.push_back({name, type});
    return name;
  }

  void block(const std::string& header, const std::function<void()>& body) {
    line(header + " {");
    const std::size_t mark = scope_.size();
    ++depth_;
    body();
    --depth_;
    scope_.resize(mark);
    line("}");
  }

  void inner_statements(int count) {
    for (int k = 0; k < count; ++k) statement(true);
  }

  // --- statement patterns ------------------------------------------------

  // Each pattern returns false when its requirements are not in scope. Order
  // is the popularity rank used for the Zipf weights.
  bool pattern(int id, bool nested) {
    switch (id) {
      case 0:
        if (!has("Node")) return false;
        declare("NodeList", any("Node") + ".getChildNodes()");
        return true;
      case 1:
        if (!has("Node")) return false;
        declare("String", any("Node") + ".getNodeName()");
        return true;
      case 2:
        if (!has("Counter")) return false;
        line(any("Counter") + ".increment();");
        return true;
      case 3:
        if (!has("Buffer") || !has("String")) return false;
        line(any("Buffer") + ".append(" + any("String") + ");");
        return true;
      case 4:
        if (!has("NodeList") || !has("int")) return false;
        declare("Node", any("NodeList") + ".item(" + any("int") + ")");
        return true;
      case 5: {
        if (!has("NodeList") || nested || taken_.contains("i")) return false;
        const std::string list = any("NodeList");
        taken_.insert("i");
        block("for (int i = 0; i < " + list + ".getLength(); i++)", [&] {
          scope_.push_back({"i", "int"});
          declare("Node", list + ".item(i)");
          inner_statements(static_cast<int>(below(2)));
        });
        return true;
      }
      case 6:
        if (!has("NodeFilter") || !has("Node") || nested) return false;
        block("if (" + any("NodeFilter") + ".accept(" + any("Node") + "))", [&] { inner_statements(1 + static_cast<int>(below(2))); });
        return true;
      case 7:
        if (!has("Document")) return false;
        declare("Element", any("Document") + ".createElement(" + std::string(pick(kTags)) + ")");
        return true;
      case 8:
        if (!has("Element") || !has("String")) return false;
        line(any("Element") + ".setAttribute(" + std::string(pick(kKeys)) + ", " + any("String") + ");");
        return true;
      case 9:
        declare("int", "0");
        return true;
      case 10:
        declare("Buffer", "new Buffer()");
        return true;
      case 11:
        declare("Counter", "new Counter()");
        return true;
      case 12: {
        std::vector<const Var*> ints;
        for (const Var* v : of("int"))
          if (v->name != "i") ints.push_back(v);
        if (ints.empty()) return false;
        const std::string v = ints[below(ints.size())]->name;
        line(v + " = " + v + " + 1;");
        return true;
      }
      case 13:
        if (!has("Report") || !has("String")) return false;
        line(any("Report") + ".setTitle(" + any("String") + ");");
        return true;
      case 14:
        if (!has("Node")) return false;
        declare("Node", any("Node") + ".getParentNode()");
        return true;
      case 15:
        if (!has("Node") || nested) return false;
        block("if (" + any("Node") + ".hasChildNodes())", [&] { inner_statements(1 + static_cast<int>(below(2))); });
        return true;
      case 16: {
        if (!has("Node") || nested) return false;
        const std::string n = any("Node");
        block("while (" + n + " != null)", [&] { line(n + " = " + n + ".getParentNode();"); });
        return true;
      }
      case 17:
        declare("ReportList", "new ReportList()");
        return true;
      case 18:
        if (!has("ReportList") || !has("Report")) return false;
        line(any("ReportList") + ".add(" + any("Report") + ");");
        return true;
      case 19:
        if (!has("NodeList")) return false;
        declare("boolean", any("NodeList") + ".isEmpty()");
        return true;
      case 20:
        if (!has("Report")) return false;
        declare("String", any("Report") + ".getTitle()");
        return true;
      case 21:
        if (!has("ReportList") || !has("int")) return false;
        declare("Report", any("ReportList") + ".get(" + any("int") + ")");
        return true;
      case 22:
        if (!has("Report")) return false;
        declare("int", any("Report") + ".getCount()");
        return true;
      case 23:
        if (!has("String") || !has("int")) return false;
        declare("Entry", "new Entry(" + any("String") + ", " + any("int") + ")");
        return true;
      case 24:
        if (!has("Report") || !has("Entry")) return false;
        line(any("Report") + ".addEntry(" + any("Entry") + ");");
        return true;
      case 25:
        if (!has("Element")) return false;
        declare("String", any("Element") + ".getAttribute(" + std::string(pick(kKeys)) + ")");
        return true;
      case 26: {
        auto nodes = of("Node");
        if (nodes.size() < 2) return false;
        const std::size_t a = below(nodes.size());
        std::size_t b = below(nodes.size() - 1);
        if (b >= a) ++b;
        line(nodes[a]->name + ".appendChild(" + nodes[b]->name + ");");
        return true;
      }
      case 27:
        if (!has("Counter")) return false;
        declare("int", any("Counter") + ".get()");
        return true;
      case 28:
        if (!has("Document") || !has("String")) return false;
        declare("Element", any("Document") + ".getElementById(" + any("String") + ")");
        return true;
      case 29:
        if (!has("Buffer")) return false;
        line(any("Buffer") + ".clear();");
        return true;
      case 30: {
        if (!has("Node")) return false;
        const std::string impl = declare("NodeListImpl", "new NodeListImpl()");
        line(impl + ".add(" + any("Node") + ");");
        return true;
      }
      case 31:
        if (!has("Document")) return false;
        declare("Node", any("Document") + ".getRoot()");
        return true;
      case 32:
        if (!has("Counter")) return false;
        line(any("Counter") + ".reset();");
        return true;
      case 33:
        if (!has("Buffer")) return false;
        declare("String", any("Buffer") + ".toString()");
        return true;
      default:
        return false;
    }
  }
  static constexpr int kPatterns = 34;
  // Popularity rank -> pattern. The name-free declarations (`int x = 0;`,
  // `Buffer b = new Buffer();`) sit low so they do not dominate the corpus.
  static constexpr int kRankOrder[kPatterns] = {0,  1,  2,  3,  4,  5,  6,  7,  8,  12, 13, 14,
                                                15, 16, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27,
                                                28, 29, 9,  30, 31, 10, 32, 11, 33, 17};

  void statement(bool nested) {
    // Zipf over pattern ranks; retry until one applies (pattern 9 always does).
    std::vector<double> w(kPatterns);
    double total = 0;
    for (int r = 0; r < kPatterns; ++r) total += w[static_cast<std::size_t>(r)] = 1.0 / std::pow(r + 1.0, cfg_.zipf_s);
    for (int attempt = 0; attempt < 64; ++attempt) {
      double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53 * total;
      int r = 0;
      while (r + 1 < kPatterns && u >= w[static_cast<std::size_t>(r)]) u -= w[static_cast<std::size_t>(r++)];
      if (pattern(kRankOrder[r], nested)) return;
    }
    pattern(9, nested);
  }

  // --- classes and methods -----------------------------------------------

  std::string client(const std::string& cls, bool length_stmt) {
    static const char* const kFieldTypes[] = {"Document", "Counter", "Buffer", "NodeFilter", "ReportList"};
    static const char* const kParamTypes[] = {"Node",    "Node",   "NodeList", "Document", "Report",    "Buffer",
                                              "Counter", "String", "int",      "Element",  "NodeFilter", "ReportList"};
    static const char* const kReturns[] = {"int", "String", "Node", "boolean"};

    qualifiers_.clear();
    for (int q = 0; q < 6; ++q) {
      std::string word = pick(kQualifiers);
      if (chance(cfg_.name_novelty)) {
        const std::string second = pick(kQualifiers);
        word += static_cast<char>(std::toupper(static_cast<unsigned char>(second[0])));
        word += second.substr(1);
      }
      qualifiers_.push_back(std::move(word));
    }
    std::string text = "class " + cls + " {\n";
    std::vector<Var> fields;
    std::set<std::string> field_names;
    const int nfields = static_cast<int>(below(3));
    for (int k = 0; k < nfields; ++k) {
      const std::string type = pick(kFieldTypes);
      bool dup = false;
      for (const Var& f : fields) dup = dup || f.type == type;
      if (dup) continue;
      const auto& pool = name_pools().at(type);
      const std::string name = qualified(pool[below(pool.size())]);
      fields.push_back({name, type});
      field_names.insert(name);
      text += "  " + type + " " + name + ";\n";
    }
    if (!fields.empty()) text += "\n";

    const int methods = cfg_.min_methods + static_cast<int>(below(static_cast<std::uint64_t>(
                                               std::max(cfg_.max_methods - cfg_.min_methods + 1, 1))));
    std::set<std::string> method_names;
    for (int m = 0; m < methods; ++m) {
      std::string mname;
      do {
        mname = std::string(pick(kMethodVerbs)) + pick(kMethodNouns);
      } while (method_names.contains(mname));
      method_names.insert(mname);

      scope_ = fields;
      taken_ = field_names;
      out_.clear();
      depth_ = 0;

      const bool length_here = length_stmt && m == 0;
      std::vector<Var> params;
      const int nparams = 1 + static_cast<int>(below(3));
      for (int k = 0; k < nparams; ++k) {
        const std::string type = (length_here && k == 0) ? "Node" : pick(kParamTypes);
        params.push_back({fresh(type), type});
      }
      for (const Var& p : params) scope_.push_back(p);

      const std::string ret = chance(0.3) ? pick(kReturns) : "void";
      const int stmts = cfg_.min_statements + static_cast<int>(below(static_cast<std::uint64_t>(
                                                  std::max(cfg_.max_statements - cfg_.min_statements + 1, 1))));
      for (int k = 0; k < stmts; ++k) {
        if (length_here && k == 1) {
          if (!has("NodeList")) pattern(0, false);
          declare("int", any("NodeList") + ".getLength()");
        }
        statement(false);
      }
      if (ret != "void") {
        if (has(ret)) line("return " + any(ret) + ";");
        else if (ret == "int") line("return 0;");
        else if (ret == "String") line("return \"\";");
        else if (ret == "boolean") line("return false;");
        else line("return null;");
      }

      std::string sig;
      for (const Var& p : params) sig += (sig.empty() ? "" : ", ") + p.type + " " + p.name;
      text += "  " + ret + " " + mname + "(" + sig + ") {\n" + out_ + "  }\n";
      if (m + 1 < methods) text += "\n";
    }
    text += "}\n";
    return text;
  }

  const GenConfig& cfg_;
  std::mt19937_64 rng_;
};

}  // namespace

std::vector<SourceFile> generate_corpus(const GenConfig& cfg) {
  if (cfg.files <= 0) return {};
  return Gen(cfg).run();
}

}  // namespace stmtc
