#pragma once

#include <set>
#include <string>
#include <vector>

#include "fixpat/engine.hpp"
#include "fixpat/json_io.hpp"
#include "fixpat/lang.hpp"

namespace fixpat {

// Reports every Call or FieldAccess receiver drawn from `nullable_names`
// that is not syntactically guarded: no preceding early return
// "if (v == null) return;" in its block, no enclosing "v != null" conjunct,
// and no protecting ternary "v != null ? ... : ...".
std::vector<BugReport> analyze(const SourceFile& file,
                               const std::set<std::string>& nullable_names);

// True when the candidate's patched text parses and the analyzer no longer
// reports the blamed variable at the (shift-adjusted) warning line.
bool validate_fix(const FixCandidate& candidate, const SourceFile& file,
                  const BugReport& bug,
                  const std::set<std::string>& nullable_names);

// Config file {"nullableNames": [...]}.
std::set<std::string> parse_lint_config(const std::string& text);

std::string reports_json(const std::vector<BugReport>& reports);

}  // namespace fixpat
