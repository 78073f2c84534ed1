#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fixpat {

class Tree;
using TreePtr = std::shared_ptr<const Tree>;

// 1-based, inclusive line range of a node in its source file.
struct Span {
  int start_line = 0;
  int end_line = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

// Indexed pattern variable. Holes with equal index must match identical
// subtrees; a labeled hole only matches subtrees rooted at that label.
struct Hole {
  int index = 0;
  std::optional<std::string> label;  // nullopt = wildcard
  bool error_variable = false;
  friend bool operator==(const Hole&, const Hole&) = default;
};

struct Child {
  std::string location;
  TreePtr node;
};

// Immutable ordered tree with labeled, valued nodes and location-tagged
// edges. A node may instead be a hole, which makes the tree a pattern.
// Instances are shared freely; nothing mutates them after construction.
class Tree {
 public:
  static TreePtr make(std::string label, std::string value,
                      std::vector<Child> children = {},
                      std::optional<Span> span = std::nullopt);
  static TreePtr make_hole(int index, std::optional<std::string> label,
                           bool error_variable = false);

  bool is_hole() const { return hole_.has_value(); }
  const Hole& hole() const { return *hole_; }

  const std::string& label() const { return label_; }
  const std::string& value() const { return value_; }
  const std::vector<Child>& children() const { return children_; }
  const std::optional<Span>& span() const { return span_; }

  // Error-context tag on concrete nodes (set on Name nodes matching the
  // blamed variable of a bug report while extracting edits).
  bool error_tagged() const { return error_tagged_; }

  TreePtr with_span(std::optional<Span> span) const;
  TreePtr with_error_tag(bool tagged) const;

 private:
  Tree() = default;
  std::string label_;
  std::string value_;
  std::vector<Child> children_;
  std::optional<Span> span_;
  std::optional<Hole> hole_;
  bool error_tagged_ = false;
};

// Path of child indices from the root; identifies a node within one tree.
struct TreeRef {
  std::vector<int> path;
  friend bool operator==(const TreeRef&, const TreeRef&) = default;
  friend auto operator<=>(const TreeRef&, const TreeRef&) = default;
};

enum class MapFlag { Mod, Unmod };

// Connects a before-tree node with its after-tree counterpart. Unmod means
// the mapped subtree pair is entirely unmodified.
struct NodeMapping {
  TreeRef before;
  TreeRef after;
  MapFlag flag = MapFlag::Mod;
  friend bool operator==(const NodeMapping&, const NodeMapping&) = default;
  friend auto operator<=>(const NodeMapping&, const NodeMapping&) = default;
};

// Resolves a reference; throws InvariantError when the path does not exist.
TreePtr resolve(const TreePtr& root, const TreeRef& ref);
TreePtr resolve_or_null(const TreePtr& root, const TreeRef& ref);

// Number of nodes; holes count as one node each.
int node_count(const TreePtr& t);

// True when the pattern contains no holes (i.e. it is a plain tree).
bool is_concrete(const TreePtr& t);

// Exact structural equality: labels, values, locations, hole indices and
// flags. Spans and error tags are ignored.
bool structural_equal(const TreePtr& a, const TreePtr& b);

// Equality modulo a bijective renaming of hole indices (spans ignored).
// The bijection is shared across one call; use pattern_equal_pair to share
// it across the two sides of an edit pattern.
bool pattern_equal(const TreePtr& a, const TreePtr& b);
bool pattern_equal_pair(const TreePtr& a_before, const TreePtr& a_after,
                        const TreePtr& b_before, const TreePtr& b_after);

// All hole occurrences, deduplicated by index, in preorder.
std::vector<Hole> collect_holes(const TreePtr& t);

// Rebuilds the tree with the node at `ref` replaced; shares all untouched
// branches. `forest` may hold several nodes (statement splices) as long as
// the ref is not the root; an empty forest deletes the node.
TreePtr replace_at(const TreePtr& root, const TreeRef& ref,
                   const std::vector<TreePtr>& forest);

// Structure/label/value hash, consistent with structural_equal.
size_t structural_hash(const TreePtr& t);

// Height of a node: 1 for leaves and holes.
int tree_height(const TreePtr& t);

// Debug rendering in term notation, e.g. Assign(Name:x, BinEx:+(...)).
std::string to_term_string(const TreePtr& t);

}  // namespace fixpat
