#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fixpat/json_io.hpp"
#include "fixpat/lang.hpp"
#include "fixpat/learn.hpp"
#include "fixpat/tree.hpp"

namespace fixpat {

// One place a pattern applies. For list-shaped nodes (blocks, class bodies,
// compilation units) the pattern's children match a contiguous child range
// of the node; child_begin == child_end marks a pure insertion boundary.
// Other nodes match whole subtrees (child_begin/end stay -1).
struct Match {
  TreeRef ref;
  int child_begin = -1;
  int child_end = -1;
  std::map<int, TreePtr> subst;
  bool is_range() const { return child_begin >= 0; }
};

// Finds every place `pattern` matches in `tree`. Labeled holes only match
// subtrees with that root label; repeated hole indices require structurally
// identical subtrees; error-flagged holes additionally only match the
// blamed variable when one is given.
std::vector<Match> match_pattern(
    const TreePtr& pattern, const TreePtr& tree,
    const std::optional<std::string>& error_variable = std::nullopt);

struct Scores {
  double prevalence = 0;
  double location = 0;
  double specialization = 0;
  double total() const { return prevalence * location * specialization; }
};

struct FixCandidate {
  int pattern_id = -1;
  Match site;
  int z = 0;  // line offset of the applied fix relative to the warning
  Scores scores;
  std::string patched_text;
  // changed region relative to the input file (for validation shifts)
  int change_prefix = 0;  // equal leading lines
  int change_old_len = 0;
  int change_new_len = 0;
};

double score_prevalence(const PatternStats& stats);
double score_location(const PatternStats& stats, int z);
double score_specialization(int file_node_count, int match_count);

// Applies every applicable pattern at every match site, renders the patch,
// and computes the three scores. Patterns that need an error variable are
// skipped when the bug report has none.
std::vector<FixCandidate> enumerate_candidates(const PatternSet& patterns,
                                               const SourceFile& file,
                                               const BugReport& bug);

// Descending by score product; ties prefer higher specialization, then a
// smaller |z|, then input order.
void rank_candidates(std::vector<FixCandidate>& candidates);

// Prediction output: JSON array of ranked candidates with unified diffs.
// `validated` annotates the top candidate when validation ran.
std::string prediction_json(const std::vector<FixCandidate>& candidates,
                            const SourceFile& file, int top_k,
                            std::optional<bool> validated_top);

}  // namespace fixpat
