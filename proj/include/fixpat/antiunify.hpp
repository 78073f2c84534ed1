#pragma once

#include <map>
#include <set>
#include <vector>

#include "fixpat/edit.hpp"
#include "fixpat/tree.hpp"

namespace fixpat {

// What a hole replaced in the left and right input of one anti-unification.
struct SubstPair {
  TreePtr left;
  TreePtr right;
};
using PairSubstitution = std::map<int, SubstPair>;

// Least general generalization of two tree patterns. Holes are memoized:
// two positions receive the same hole exactly when their (left, right)
// substitution pairs are structurally identical. The result keeps a label
// on a hole whenever both inputs agree on it, and carries the error flag
// when both substituted sides are error-tagged.
TreePtr anti_unify_trees(const TreePtr& p, const TreePtr& q,
                         PairSubstitution* substitution = nullptr);

// Removes maximal child subtrees whose path is listed as unmodified,
// recursing into the remaining children.
TreePtr strip_unmod(const TreePtr& t,
                    const std::set<std::vector<int>>& unmod_paths);

// Least general generalization of two edit patterns: anti-unifies the
// stripped before sides and then the stripped after sides under one shared
// substitution, re-establishes mappings between nodes that generalize
// mapped nodes, and populates unmodified context back where both inputs
// carry it at consistent positions. Statistics are not merged here; see
// propagate_stats.
EditPattern anti_unify_edits(const EditPattern& e1, const EditPattern& e2,
                             PairSubstitution* substitution = nullptr);

// p is at most as general as q: antiUnify(p, q) equals q modulo renaming.
bool more_precise(const TreePtr& p, const TreePtr& q);
bool more_precise(const EditPattern& p, const EditPattern& q);

}  // namespace fixpat
