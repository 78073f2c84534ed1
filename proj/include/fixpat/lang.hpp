#pragma once

#include <map>
#include <string>
#include <vector>

#include "fixpat/tree.hpp"

namespace fixpat {

// A parsed source file. `offsets` maps each node's path to its exact byte
// range [begin, end) in `text`, which is what patch splicing operates on;
// the trees themselves only carry line spans.
struct SourceFile {
  std::string path;
  std::string text;
  TreePtr tree;
  std::map<std::vector<int>, std::pair<size_t, size_t>> offsets;
};

// Parses the mini language (classes, methods, blocks, if/return statements,
// declarations, assignments, calls, the usual operators). Node labels:
// CompilationUnit, Class, Method, Modifier, Annotation, Param, Block, If,
// Return, VarDecl, Assign, ExprStmt, Call, FieldAccess, BinEx, UnEx,
// Ternary, Name, Literal. Every node carries a line span.
SourceFile parse_source_file(std::string path, std::string text);
TreePtr parse_source(const std::string& text);

// Deterministic pretty printer: 4-space indent, one statement per line.
// parse_source(print_tree(t)) equals t modulo spans. Unknown labels and
// holes raise RenderError.
std::string print_tree(const TreePtr& t);

// Replaces the node at `site` with the rendered forest, leaving every byte
// outside the replaced range untouched (inserted lines are indented to the
// site's column). The forest must be a single tree unless the site is a
// statement position.
std::string splice_patch(const SourceFile& file, const TreeRef& site,
                         const std::vector<TreePtr>& forest);

// Replaces children [begin, end) of the block-like node at `ref` with the
// rendered forest; begin == end inserts at that child boundary.
std::string splice_range(const SourceFile& file, const TreeRef& ref,
                         int begin, int end,
                         const std::vector<TreePtr>& forest);

}  // namespace fixpat
