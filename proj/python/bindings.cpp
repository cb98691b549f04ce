#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stmtc/complete.hpp"
#include "stmtc/corpus.hpp"
#include "stmtc/error.hpp"
#include "stmtc/eval.hpp"

namespace py = pybind11;
using namespace stmtc;

namespace {

// A loaded corpus plus models trained on all of it.
class Engine {
 public:
  Engine(const std::string& corpus, int n, const std::vector<std::string>& stubs)
      : project_(load_project(read_corpus(corpus), read_stubs(stubs))) {
    std::vector<const TypedProgram*> all;
    for (const TypedProgram& t : project_.typed) all.push_back(&t);
    models_ = Models::train(all, n);
  }

  std::vector<std::pair<std::string, double>> complete(const std::string& source, std::size_t offset, int k,
                                                       int max_len, std::size_t top) const {
    ExpansionConfig cfg;
    cfg.K = k;
    cfg.max_len = max_len;
    cfg.n = models_.excode.order();
    SuggestionList list;
    {
      py::gil_scoped_release release;
      list = complete_source(source, offset, project_.index, models_, cfg);
    }
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t i = 0; i < list.size() && i < top; ++i) out.emplace_back(list[i].text(), list[i].log_score);
    return out;
  }

  void save(const std::string& dir) const { models_.save(dir); }
  std::size_t files() const { return project_.files.size(); }
  std::size_t excode_vocab() const { return models_.excode.vocab_size(); }
  std::size_t lexical_vocab() const { return models_.lexical.vocab_size(); }
  std::size_t occurrences(const std::vector<std::string>& needle) const {
    return count_excode_occurrences(project_, needle);
  }

 private:
  Project project_;
  Models models_;
};

System parse_system(const std::string& s) {
  if (s == "autosc") return System::AutoSC;
  if (s == "lexical") return System::Lexical;
  if (s == "lexical_pa") return System::LexicalPA;
  throw Error(ErrorCode::BadRequest, "unknown system " + s);
}

py::dict evaluate(const std::string& corpus, const std::string& system, const std::string& mode, int folds, int k,
                  int n, std::size_t max_points) {
  if (mode != "sc" && mode != "ns") throw Error(ErrorCode::BadRequest, "mode must be sc or ns");
  EvalReport r;
  {
    py::gil_scoped_release release;
    const Project p = load_project(read_corpus(corpus));
    EvalConfig cfg;
    cfg.system = parse_system(system);
    cfg.mode = mode == "ns" ? Mode::NS : Mode::SC;
    cfg.folds = folds;
    cfg.n = n;
    cfg.expansion.K = k;
    cfg.expansion.n = n;
    cfg.max_points = max_points;
    r = run_eval(p, cfg);
  }
  py::dict d;
  d["system"] = r.system;
  d["mode"] = r.mode;
  d["points"] = r.points;
  d["failures"] = r.failures;
  d["mean_ms"] = r.mean_ms();
  py::dict top;
  for (std::size_t i = 1; i <= r.hits.size(); ++i) top[py::int_(i)] = r.accuracy(i);
  d["top"] = top;
  return d;
}

std::size_t gen_corpus(const std::string& out, std::uint64_t seed, int files, int length_repeats) {
  GenConfig g;
  g.seed = seed;
  g.files = files;
  g.length_repeats = length_repeats;
  const std::vector<SourceFile> written = generate_corpus(g);
  write_corpus(out, written);
  return written.size();
}

}  // namespace

PYBIND11_MODULE(_stmtc, m) {
  m.doc() = "Statement completion over abstracted token models";

  // the module attribute keeps the class alive
  static PyObject* error = py::exception<Error>(m, "StmtcError", PyExc_ValueError).ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object ex = py::reinterpret_borrow<py::object>(error)(e.what());
      ex.attr("code") = to_string(e.code());
      PyErr_SetObject(error, ex.ptr());
    }
  });

  py::class_<Engine>(m, "Engine")
      .def(py::init<const std::string&, int, const std::vector<std::string>&>(), py::arg("corpus"), py::arg("n") = 6,
           py::arg("stubs") = std::vector<std::string>{})
      .def("complete", &Engine::complete, py::arg("source"), py::arg("offset"), py::arg("k") = 5,
           py::arg("max_len") = 12, py::arg("top") = 10, "Ranked (text, log score) suggestions at a byte offset")
      .def("save", &Engine::save, py::arg("dir"))
      .def("occurrences", &Engine::occurrences, py::arg("needle"), "Occurrences of an excode run in the corpus")
      .def_property_readonly("files", &Engine::files)
      .def_property_readonly("excode_vocab", &Engine::excode_vocab)
      .def_property_readonly("lexical_vocab", &Engine::lexical_vocab);

  m.def("evaluate", &evaluate, py::arg("corpus"), py::arg("system") = "autosc", py::arg("mode") = "sc",
        py::arg("folds") = 10, py::arg("k") = 5, py::arg("n") = 6, py::arg("max_points") = 0,
        "Cross-validated accuracy of one system");
  m.def("gen_corpus", &gen_corpus, py::arg("out"), py::arg("seed") = 7, py::arg("files") = 200, py::arg("length_repeats") = 6,
        "Write a synthetic corpus, return the number of files");
}
