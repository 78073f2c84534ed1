#pragma once

#include <optional>
#include <vector>

#include "fixpat/tree.hpp"

namespace fixpat {

// Statistics tracked per edit pattern for ranking. `ratio_above` is the
// fraction of training fixes applied above the warning line; the two
// geometric parameters model the line distance on each side (support
// {0,1,2,...}, pmf(d) = p*(1-p)^d, mean (1-p)/p).
struct PatternStats {
  int leaf_count = 1;
  int training_set_size = 0;
  double ratio_above = 0.5;
  double geom_above = 1.0;
  double geom_below = 1.0;
};

// A before/after tree-pattern pair with node mappings. Leaves of the
// learned hierarchy are concrete (hole-free) edits extracted from one
// human fix; inner nodes generalize their children.
struct EditPattern {
  TreePtr before;
  TreePtr after;
  std::vector<NodeMapping> mappings;
  PatternStats stats;
  // Line offset of the concrete fix relative to the warning (leaves only);
  // negative means the fix was applied above the warning line.
  std::optional<int> line_offset;
};

// True when both sides are structurally identical modulo one shared
// bijective renaming of hole indices and the mapping sets coincide.
bool edit_pattern_equal(const EditPattern& a, const EditPattern& b);

// Renumbers holes consecutively in preorder (before side first) so that
// serialized patterns are stable; equality is unaffected. `remap_out`
// receives the old-index to new-index map when given.
EditPattern canonicalize_holes(const EditPattern& e,
                               std::map<int, int>* remap_out = nullptr);

}  // namespace fixpat
