#pragma once

#include <optional>
#include <vector>

#include "fixpat/edit.hpp"
#include "fixpat/json_io.hpp"
#include "fixpat/tree.hpp"

namespace fixpat {

struct DiffOptions {
  int min_height = 2;    // top-down phase: minimal height of matched subtrees
  double min_dice = 0.5; // bottom-up phase: similarity threshold
};

// One-to-one node mapping between two trees. Mapped nodes always share a
// label; values may differ (updates). Computed in two phases: maximal
// isomorphic subtrees top-down, then container nodes bottom-up by the dice
// similarity of their mapped descendants, followed by an alignment of
// still-unmapped children of each mapped pair.
std::vector<std::pair<TreeRef, TreeRef>> compute_mappings(
    const TreePtr& before, const TreePtr& after, const DiffOptions& opts = {});

struct NodeFlags {
  bool deleted = false;   // before side only
  bool inserted = false;  // after side only
  bool moved = false;
  bool updated = false;
  bool modified() const { return deleted || inserted || moved || updated; }
};

// Per-node edit classification, indexed by preorder position.
struct EditClassification {
  std::vector<NodeFlags> before_flags;
  std::vector<NodeFlags> after_flags;
  std::vector<int> before_partner;  // preorder index in after, or -1
  std::vector<int> after_partner;
  // A mapped pair is unmodified when every node of both subtrees is
  // unmodified; such pairs become unmod-flagged mappings.
  std::vector<bool> before_subtree_unmod;
  std::vector<bool> after_subtree_unmod;
};

EditClassification classify_edits(
    const TreePtr& before, const TreePtr& after,
    const std::vector<std::pair<TreeRef, TreeRef>>& mappings);

// Extracts concrete edits at every granularity: one edit rooted at each
// mapped node pair whose proper subtrees contain at least one modification. Each
// edit carries rebased mappings, error tags on Name nodes matching the
// blamed variable, and the line offset of its modification anchor relative
// to the warning line.
std::vector<EditPattern> extract_concrete_edits(
    const TreePtr& before, const TreePtr& after,
    const std::optional<BugReport>& bug = std::nullopt,
    const DiffOptions& opts = {});

}  // namespace fixpat
