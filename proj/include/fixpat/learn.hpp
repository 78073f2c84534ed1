#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fixpat/antiunify.hpp"
#include "fixpat/edit.hpp"

namespace fixpat {

// Binary merge hierarchy. Leaves (the given concrete edits, in input order)
// come first; every merge appends a node whose pattern is the
// anti-unification of its two children.
struct DendrogramNode {
  EditPattern pattern;
  int left = -1;
  int right = -1;
  bool is_leaf() const { return left < 0; }
};

struct Dendrogram {
  std::vector<DendrogramNode> nodes;
  int root = -1;
};

struct MergeRecord {
  int left = -1;
  int right = -1;
  int parent = -1;
};

// Labels of nodes involved in an operation (insert, delete, move, update)
// on either side of the edit.
std::set<std::string> modified_labels(const EditPattern& e);

// Groups edits by the sorted label set of their modified nodes; the key is
// the labels joined by ",".
std::map<std::string, std::vector<int>> partition_edits(
    const std::vector<EditPattern>& edits);

// How much concrete information a candidate merge loses; used to order
// merges. Lower tuples are preferred: bound after part first, then more
// mod mappings, fewer and smaller holes, more labeled unmod mappings, more
// error context, more unmod mappings overall.
struct MergeMetrics {
  bool after_unbound = false;
  int mod_mappings = 0;
  int hole_count = 0;
  int substituted_size = 0;
  int labeled_unmod = 0;
  int error_holes = 0;
  int unmod_mappings = 0;

  auto key() const {
    return std::make_tuple(after_unbound ? 1 : 0, -mod_mappings, hole_count,
                           substituted_size, -labeled_unmod, -error_holes,
                           -unmod_mappings);
  }
};

MergeMetrics merge_metrics(const EditPattern& merged,
                           const PairSubstitution& substitution);

// Negative when a is the preferable merge result, positive when b is,
// zero on a tie (callers break ties by stable input order).
int merge_preference(const MergeMetrics& a, const MergeMetrics& b);

// Every hole of the after part occurs in the before part or carries the
// error flag; only such patterns can be instantiated at prediction time.
bool after_holes_bound(const EditPattern& e);

// Hierarchical agglomerative clustering: partitions the edits, reduces each
// partition with nearest-neighbor-chain merging under merge_preference, and
// finally folds the partition roots together. Statistics propagate at every
// merge. Throws UsageError on empty input.
Dendrogram cluster(const std::vector<EditPattern>& edits,
                   std::vector<MergeRecord>* trace = nullptr);

// Leaf-count-weighted merge: the ratio averages, each geometric side merges
// by matching means (mean (1-p)/p), and leaf counts add up.
PatternStats propagate_stats(const PatternStats& left,
                             const PatternStats& right);

// Pruned candidate set plus the full hierarchy edges for debugging.
struct PatternSet {
  int training_set_size = 0;
  struct Entry {
    EditPattern pattern;
    int node_id = -1;
  };
  std::vector<Entry> patterns;
  std::vector<std::array<int, 3>> parents;  // {left, right, parent}
};

// Keeps every dendrogram node with leaf share >= min_support whose after
// part has no unbound holes, and stamps the training set size into the
// surviving stats.
PatternSet prune_hierarchy(const Dendrogram& d, int training_set_size,
                           double min_support = 0.01);

std::string serialize_pattern_set(const PatternSet& set);
PatternSet parse_pattern_set(const std::string& text);

}  // namespace fixpat
