#pragma once

// Fixtures shared by the unit tests.

#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stmtc/analyzer.hpp"
#include "stmtc/complete.hpp"
#include "stmtc/corpus.hpp"
#include "stmtc/error.hpp"
#include "stmtc/excode.hpp"

namespace stmtc::fixture {

/// Excode sequence from space-separated renderings.
inline ExcodeSequence X(std::string_view text) {
  ExcodeSequence out;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    auto t = ExcodeToken::parse(word);
    if (!t) throw std::invalid_argument("bad excode token " + word);
    out.push_back(*t);
  }
  return out;
}

/// Node/NodeList library plus a client method in the shape of the
/// motivating example.
inline constexpr std::string_view kLibrary = R"(class Node {
  String name;
  Node parent;
  NodeList getChildNodes() { return null; }
  Node getParentNode() { return parent; }
  String getNodeName() { return name; }
  void appendChild(Node child) { child.parent = this; }
}

class NodeList {
  int length;
  int getLength() { return length; }
  Node item(int index) { return null; }
}

class NodeListImpl extends NodeList {
  NodeListImpl() { }
  void add(Node node) { length = length + 1; }
}

class NodeFilter {
  boolean accept(Node node) { return true; }
}
)";

inline constexpr std::string_view kWalker = R"(class Walker {
  int visits;
  void visit(Node node, NodeFilter filter) {
    NodeListImpl impl = new NodeListImpl();
    NodeList children = node.getChildNodes();
    int len = children.getLength();
  }
  int count() { return visits; }
}
)";

inline Project project(std::vector<SourceFile> files) { return load_project(std::move(files)); }

inline Project walker_project() {
  return project({{"lib.aj", std::string(kLibrary)}, {"Walker.aj", std::string(kWalker)}});
}

/// Index of the token whose lexeme is `lexeme`, the `nth` such from the start.
inline std::size_t token_at(const TypedProgram& t, std::string_view lexeme, int nth = 0) {
  const auto& toks = t.program.stream.tokens;
  for (std::size_t i = 0; i < toks.size(); ++i)
    if (toks[i].lexeme == lexeme && nth-- == 0) return i;
  throw std::out_of_range("no token " + std::string(lexeme));
}

inline std::vector<std::string> texts(const std::vector<CodeSequence>& seqs) {
  std::vector<std::string> out;
  for (const CodeSequence& s : seqs) out.push_back(render(s));
  return out;
}

/// Code of the stmtc::Error thrown by `f`; nullopt when nothing is thrown.
inline std::optional<ErrorCode> error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace stmtc::fixture
