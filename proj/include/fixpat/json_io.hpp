#pragma once

#include <string>

#include "fixpat/tree.hpp"

namespace fixpat {

// Bug report emitted by an analyzer: file, 1-based warning line, optional
// blamed variable, and the bug category the report belongs to.
struct BugReport {
  std::string file;
  int line = 1;
  std::optional<std::string> variable;
  std::string category;
};

// JSON tree documents. A node is
//   {"label": ..., "value": ..., "children": [{"location", "tree"}...],
//    "span": {"startLine", "endLine"}}   (span optional)
// and, in pattern documents only,
//   {"hole": {"index": int, "label": string|null, "errorVariable": bool}}.
//
// parse_tree_json rejects holes; parse_pattern_json decodes them and checks
// that equal hole indices agree on label and error flag.
TreePtr parse_tree_json(const std::string& text);
TreePtr parse_pattern_json(const std::string& text);

std::string serialize_tree(const TreePtr& t);

BugReport parse_bug_report(const std::string& text);
std::string serialize_bug_report(const BugReport& bug);

// Reads a whole file; throws fixpat::Error when it cannot be opened.
std::string read_file(const std::string& path);
// Whole-file atomic write (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace fixpat
