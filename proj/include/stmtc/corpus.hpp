#pragma once

// Corpus I/O, project loading (parse + index + resolve), and the seeded
// synthetic corpus generator.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "stmtc/analyzer.hpp"

namespace stmtc {

struct SourceFile {
  std::string path;  // relative to the corpus root, '/' separated
  std::string text;
};

/// All *.aj and *.java files under `root`, sorted by relative path.
/// Throws Error(IoError) when `root` is not a directory.
std::vector<SourceFile> read_corpus(const std::string& root);
std::vector<StubFile> read_stubs(const std::vector<std::string>& paths);
void write_corpus(const std::string& root, const std::vector<SourceFile>& files);

struct Project {
  std::vector<SourceFile> files;
  std::shared_ptr<const ClassIndex> index;
  std::vector<TypedProgram> typed;  // parallel to files
};

/// Parses every file, builds one project-wide class index, resolves types.
Project load_project(std::vector<SourceFile> files, const std::vector<StubFile>& stubs = {});

struct GenConfig {
  std::uint64_t seed = 7;
  int files = 200;           // client files, on top of the library files
  int min_methods = 2;
  int max_methods = 4;
  int min_statements = 3;    // top-level statements per method body
  int max_statements = 8;
  double zipf_s = 1.1;       // skew of the statement-pattern distribution
  /// Share of local names prefixed with one of the file's qualifiers
  /// (src + node -> srcNode).
  double qualify_rate = 0.5;
  /// Share of per-file qualifiers made of two words (srcTmp) rather than one;
  /// higher values make local names rarer across files.
  double name_novelty = 0.0;
  /// Exact number of `int v = list.getLength();` statements (NodeList
  /// receiver); no other statement produces that shape.
  int length_repeats = 6;
};

/// Library classes (Node, NodeList, ...) followed by client classes.
std::vector<SourceFile> generate_corpus(const GenConfig& cfg);

/// Occurrences of `needle` (excode renderings) as a contiguous run inside
/// the method streams of the project.
std::size_t count_excode_occurrences(const Project& project, const std::vector<std::string>& needle);

/// Share of statement units whose placeholder-normalized text occurs more
/// than once in the project.
double repeated_statement_rate(const Project& project);

}  // namespace stmtc
