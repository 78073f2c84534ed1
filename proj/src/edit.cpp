#include "fixpat/edit.hpp"

#include <algorithm>
#include <map>

namespace fixpat {

bool edit_pattern_equal(const EditPattern& a, const EditPattern& b) {
  if (!pattern_equal_pair(a.before, a.after, b.before, b.after)) return false;
  std::vector<NodeMapping> ma = a.mappings, mb = b.mappings;
  std::sort(ma.begin(), ma.end());
  std::sort(mb.begin(), mb.end());
  return ma == mb;
}

namespace {

TreePtr renumber(const TreePtr& t, std::map<int, int>& remap, int& next) {
  if (t->is_hole()) {
    const Hole& h = t->hole();
    auto it = remap.find(h.index);
    int idx = it != remap.end() ? it->second : (remap[h.index] = next++);
    return Tree::make_hole(idx, h.label, h.error_variable);
  }
  std::vector<Child> kids;
  bool changed = false;
  for (const auto& c : t->children()) {
    TreePtr k = renumber(c.node, remap, next);
    changed |= k.get() != c.node.get();
    kids.push_back(Child{c.location, k});
  }
  if (!changed) return t;
  TreePtr out = Tree::make(t->label(), t->value(), std::move(kids), t->span());
  return t->error_tagged() ? out->with_error_tag(true) : out;
}

}  // namespace

EditPattern canonicalize_holes(const EditPattern& e,
                               std::map<int, int>* remap_out) {
  std::map<int, int> remap;
  int next = 0;
  EditPattern out = e;
  out.before = renumber(e.before, remap, next);
  out.after = renumber(e.after, remap, next);
  if (remap_out) *remap_out = remap;
  return out;
}

}  // namespace fixpat
