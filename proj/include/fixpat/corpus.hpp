#pragma once

#include <string>
#include <vector>

#include "fixpat/json_io.hpp"
#include "fixpat/lang.hpp"
#include "fixpat/learn.hpp"

namespace fixpat {

// One training example: NAME.before.mj, NAME.after.mj, NAME.bug.json.
struct CorpusPair {
  std::string name;
  SourceFile before;
  SourceFile after;
  BugReport bug;
};

// Scans a corpus directory; throws UsageError when a pair member is missing
// or the directory holds no pairs, ParseError when a file does not parse.
std::vector<CorpusPair> load_corpus(const std::string& dir);

struct LearnSummary {
  int pairs = 0;
  int concrete_edits = 0;
  int patterns_kept = 0;
};

// Extracts every pair's concrete edits, clusters them, and prunes the
// hierarchy at the given support threshold.
PatternSet learn_from_pairs(const std::vector<CorpusPair>& pairs,
                            double min_support = 0.01,
                            LearnSummary* summary = nullptr);

}  // namespace fixpat
