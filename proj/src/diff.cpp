#include "fixpat/diff.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace fixpat {

namespace {

// Flattened preorder view of a tree.
struct Index {
  struct Entry {
    TreePtr node;
    int parent = -1;
    int height = 1;
    int size = 1;  // subtree size including self
    size_t hash = 0;
    TreeRef ref;
  };
  std::vector<Entry> entries;

  explicit Index(const TreePtr& root) {
    std::vector<int> path;
    build(root, -1, path);
  }

  int build(const TreePtr& t, int parent, std::vector<int>& path) {
    int id = static_cast<int>(entries.size());
    entries.push_back(Entry{t, parent, 1, 1, 0, TreeRef{path}});
    for (size_t i = 0; i < t->children().size(); ++i) {
      path.push_back(static_cast<int>(i));
      int child = build(t->children()[i].node, id, path);
      path.pop_back();
      entries[id].size += entries[child].size;
      entries[id].height = std::max(entries[id].height,
                                    entries[child].height + 1);
    }
    entries[id].hash = structural_hash(t);
    return id;
  }

  int size() const { return static_cast<int>(entries.size()); }
  const Entry& operator[](int i) const { return entries[i]; }

  // ids of direct children of node i, in order
  std::vector<int> children_of(int i) const {
    std::vector<int> out;
    int j = i + 1;
    int end = i + entries[i].size;
    while (j < end) {
      out.push_back(j);
      j += entries[j].size;
    }
    return out;
  }

  bool contains(int ancestor, int node) const {
    return node >= ancestor && node < ancestor + entries[ancestor].size;
  }
};

struct Matcher {
  const Index& t1;
  const Index& t2;
  DiffOptions opts;
  std::vector<int> fwd;  // t1 id -> t2 id or -1
  std::vector<int> rev;

  Matcher(const Index& a, const Index& b, const DiffOptions& o)
      : t1(a), t2(b), opts(o), fwd(a.size(), -1), rev(b.size(), -1) {}

  void link(int a, int b) {
    fwd[a] = b;
    rev[b] = a;
  }

  void link_subtrees(int a, int b) {
    // isomorphic pair: map node-by-node in lockstep preorder
    link(a, b);
    auto ca = t1.children_of(a);
    auto cb = t2.children_of(b);
    for (size_t i = 0; i < ca.size(); ++i) link_subtrees(ca[i], cb[i]);
  }

  void top_down() {
    std::map<int, std::vector<int>, std::greater<int>> by_height1, by_height2;
    for (int i = 0; i < t1.size(); ++i)
      by_height1[t1[i].height].push_back(i);
    for (int i = 0; i < t2.size(); ++i)
      by_height2[t2[i].height].push_back(i);
    for (auto& [h, nodes1] : by_height1) {
      if (h < opts.min_height) break;
      auto it = by_height2.find(h);
      if (it == by_height2.end()) continue;
      std::unordered_map<size_t, std::vector<int>> groups2;
      for (int b : it->second)
        if (rev[b] == -1 && !covered2(b)) groups2[t2[b].hash].push_back(b);
      for (int a : nodes1) {
        if (fwd[a] != -1 || covered1(a)) continue;
        auto g = groups2.find(t1[a].hash);
        if (g == groups2.end()) continue;
        for (int& b : g->second) {
          if (b == -1 || rev[b] != -1) continue;
          if (!structural_equal(t1[a].node, t2[b].node)) continue;
          link_subtrees(a, b);
          b = -1;
          break;
        }
      }
    }
  }

  // whether some ancestor is already mapped as part of an isomorphic pair
  // (then this node is mapped too, handled by link_subtrees)
  bool covered1(int a) const { return fwd[a] != -1; }
  bool covered2(int b) const { return rev[b] != -1; }

  int mapped_descendants_common(int a, int b) const {
    int count = 0;
    for (int i = a + 1; i < a + t1[a].size; ++i) {
      int img = fwd[i];
      if (img != -1 && t2.contains(b, img) && img != b) ++count;
    }
    return count;
  }

  double dice(int a, int b) const {
    int da = t1[a].size - 1;
    int db = t2[b].size - 1;
    if (da + db == 0) return 0.0;
    return 2.0 * mapped_descendants_common(a, b) / (da + db);
  }

  void bottom_up() {
    // postorder: children first; preorder ids visited in reverse give a
    // valid postorder for this purpose (parents have smaller ids than
    // descendants is false in preorder, so iterate by decreasing subtree
    // end). Simpler: iterate ids descending; a node's descendants have
    // larger ids and were already visited.
    for (int a = t1.size() - 1; a >= 0; --a) {
      if (fwd[a] != -1) continue;
      if (t1[a].size == 1) continue;  // no descendants
      std::vector<int> candidates;
      for (int i = a + 1; i < a + t1[a].size; ++i) {
        int img = fwd[i];
        if (img == -1) continue;
        for (int anc = t2[img].parent; anc != -1; anc = t2[anc].parent) {
          if (rev[anc] == -1 && t2[anc].node->label() == t1[a].node->label())
            if (std::find(candidates.begin(), candidates.end(), anc) ==
                candidates.end())
              candidates.push_back(anc);
        }
      }
      int best = -1;
      double best_dice = opts.min_dice;
      for (int c : candidates) {
        double d = dice(a, c);
        if (d > best_dice || (best != -1 && d == best_dice && c < best)) {
          best = c;
          best_dice = d;
        }
      }
      if (best != -1) {
        link(a, best);
        align_children(a, best);
      }
    }
    // map the roots when labels agree
    if (fwd[0] == -1 && rev[0] == -1 &&
        t1[0].node->label() == t2[0].node->label()) {
      link(0, 0);
      align_children(0, 0);
    }
  }

  // Pairs still-unmapped children of a mapped pair: first by unique
  // (label, value), then by unique (label, location). Recurses into pairs
  // it creates, which recovers updates like a changed modifier.
  void align_children(int a, int b) {
    auto ca = t1.children_of(a);
    auto cb = t2.children_of(b);
    auto unmapped1 = [&](std::vector<int>& out) {
      out.clear();
      for (int i : ca)
        if (fwd[i] == -1) out.push_back(i);
    };
    auto unmapped2 = [&](std::vector<int>& out) {
      out.clear();
      for (int i : cb)
        if (rev[i] == -1) out.push_back(i);
    };
    auto location_of = [](const Index& idx, int node) -> std::string {
      int parent = idx[node].parent;
      if (parent == -1) return "";
      auto kids = idx.children_of(parent);
      for (size_t i = 0; i < kids.size(); ++i)
        if (kids[i] == node)
          return idx[parent].node->children()[i].location;
      return "";
    };
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<int> u1, u2;
      unmapped1(u1);
      unmapped2(u2);
      std::map<std::pair<std::string, std::string>, std::vector<int>> g1, g2;
      for (int i : u1) {
        auto key = pass == 0
                       ? std::make_pair(t1[i].node->label(), t1[i].node->value())
                       : std::make_pair(t1[i].node->label(), location_of(t1, i));
        g1[key].push_back(i);
      }
      for (int i : u2) {
        auto key = pass == 0
                       ? std::make_pair(t2[i].node->label(), t2[i].node->value())
                       : std::make_pair(t2[i].node->label(), location_of(t2, i));
        g2[key].push_back(i);
      }
      for (auto& [key, nodes1] : g1) {
        auto it = g2.find(key);
        if (it == g2.end()) continue;
        if (nodes1.size() != 1 || it->second.size() != 1) continue;
        int x = nodes1[0], y = it->second[0];
        if (structural_equal(t1[x].node, t2[y].node)) {
          link_subtrees(x, y);
        } else {
          link(x, y);
          align_children(x, y);
        }
      }
    }
  }
};

std::vector<int> lis_members(const std::vector<int>& seq) {
  // indices of a longest strictly increasing subsequence (deterministic)
  int n = static_cast<int>(seq.size());
  if (n == 0) return {};
  std::vector<int> len(n, 1), prev(n, -1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (seq[j] < seq[i] && len[j] + 1 >= len[i] + 1) {
        len[i] = len[j] + 1;
        prev[i] = j;
      }
  int best = 0;
  for (int i = 0; i < n; ++i)
    if (len[i] >= len[best]) best = i;
  std::vector<int> members;
  for (int i = best; i != -1; i = prev[i]) members.push_back(i);
  std::reverse(members.begin(), members.end());
  return members;
}

}  // namespace

std::vector<std::pair<TreeRef, TreeRef>> compute_mappings(
    const TreePtr& before, const TreePtr& after, const DiffOptions& opts) {
  Index t1(before), t2(after);
  Matcher m(t1, t2, opts);
  m.top_down();
  m.bottom_up();
  std::vector<std::pair<TreeRef, TreeRef>> out;
  for (int a = 0; a < t1.size(); ++a)
    if (m.fwd[a] != -1) out.push_back({t1[a].ref, t2[m.fwd[a]].ref});
  return out;
}

EditClassification classify_edits(
    const TreePtr& before, const TreePtr& after,
    const std::vector<std::pair<TreeRef, TreeRef>>& mappings) {
  Index t1(before), t2(after);
  EditClassification c;
  c.before_flags.resize(t1.size());
  c.after_flags.resize(t2.size());
  c.before_partner.assign(t1.size(), -1);
  c.after_partner.assign(t2.size(), -1);

  std::map<TreeRef, int> id1, id2;
  for (int i = 0; i < t1.size(); ++i) id1[t1[i].ref] = i;
  for (int i = 0; i < t2.size(); ++i) id2[t2[i].ref] = i;
  for (const auto& [b, a] : mappings) {
    int x = id1.at(b), y = id2.at(a);
    c.before_partner[x] = y;
    c.after_partner[y] = x;
  }

  for (int i = 0; i < t1.size(); ++i)
    if (c.before_partner[i] == -1) c.before_flags[i].deleted = true;
  for (int i = 0; i < t2.size(); ++i)
    if (c.after_partner[i] == -1) c.after_flags[i].inserted = true;

  // updates and cross-parent moves
  for (int x = 0; x < t1.size(); ++x) {
    int y = c.before_partner[x];
    if (y == -1) continue;
    if (t1[x].node->value() != t2[y].node->value()) {
      c.before_flags[x].updated = true;
      c.after_flags[y].updated = true;
    }
    int px = t1[x].parent, py = t2[y].parent;
    bool moved;
    if (px == -1 || py == -1)
      moved = (px == -1) != (py == -1);
    else
      moved = c.before_partner[px] != py;
    if (moved) {
      c.before_flags[x].moved = true;
      c.after_flags[y].moved = true;
    }
  }

  // sibling reorders: for each mapped pair, children mapped to children of
  // the partner must appear in increasing order; the rest are moves
  for (int x = 0; x < t1.size(); ++x) {
    int y = c.before_partner[x];
    if (y == -1) continue;
    auto kids = t1.children_of(x);
    std::vector<int> mapped_kids, positions;
    auto kids2 = t2.children_of(y);
    for (int k : kids) {
      int img = c.before_partner[k];
      if (img == -1) continue;
      auto pos = std::find(kids2.begin(), kids2.end(), img);
      if (pos == kids2.end()) continue;  // cross-parent move, already flagged
      mapped_kids.push_back(k);
      positions.push_back(static_cast<int>(pos - kids2.begin()));
    }
    std::vector<int> keep = lis_members(positions);
    std::vector<bool> in_lis(mapped_kids.size(), false);
    for (int i : keep) in_lis[i] = true;
    for (size_t i = 0; i < mapped_kids.size(); ++i) {
      if (in_lis[i]) continue;
      int k = mapped_kids[i];
      c.before_flags[k].moved = true;
      c.after_flags[c.before_partner[k]].moved = true;
    }
  }

  // subtree-unmodified markers
  std::vector<int> mods1(t1.size(), 0), mods2(t2.size(), 0);
  for (int i = t1.size() - 1; i >= 0; --i) {
    mods1[i] = c.before_flags[i].modified() ? 1 : 0;
    for (int k : t1.children_of(i)) mods1[i] += mods1[k];
  }
  for (int i = t2.size() - 1; i >= 0; --i) {
    mods2[i] = c.after_flags[i].modified() ? 1 : 0;
    for (int k : t2.children_of(i)) mods2[i] += mods2[k];
  }
  c.before_subtree_unmod.resize(t1.size());
  c.after_subtree_unmod.resize(t2.size());
  for (int i = 0; i < t1.size(); ++i) {
    int y = c.before_partner[i];
    c.before_subtree_unmod[i] = y != -1 && mods1[i] == 0 && mods2[y] == 0;
  }
  for (int i = 0; i < t2.size(); ++i) {
    int x = c.after_partner[i];
    c.after_subtree_unmod[i] = x != -1 && mods2[i] == 0 && mods1[x] == 0;
  }
  return c;
}

namespace {

TreePtr tag_error_names(const TreePtr& t, const std::string& variable) {
  bool tag = !t->is_hole() && t->label() == "Name" && t->value() == variable;
  std::vector<Child> kids;
  bool changed = false;
  for (const auto& c : t->children()) {
    TreePtr k = tag_error_names(c.node, variable);
    changed |= (k.get() != c.node.get());
    kids.push_back(Child{c.location, k});
  }
  if (!tag && !changed) return t;
  if (t->is_hole()) return t;
  TreePtr out = Tree::make(t->label(), t->value(), std::move(kids), t->span());
  return tag ? out->with_error_tag(true) : out;
}

int span_start(const TreePtr& t) { return t->span() ? t->span()->start_line : 0; }
int span_end(const TreePtr& t) { return t->span() ? t->span()->end_line : 0; }

// Relative path of node `id` under ancestor `root` in the index.
TreeRef rebase(const Index& idx, int root, int id) {
  const auto& full = idx[id].ref.path;
  const auto& base = idx[root].ref.path;
  return TreeRef{std::vector<int>(full.begin() + base.size(), full.end())};
}

}  // namespace

std::vector<EditPattern> extract_concrete_edits(
    const TreePtr& before, const TreePtr& after,
    const std::optional<BugReport>& bug, const DiffOptions& opts) {
  auto mappings = compute_mappings(before, after, opts);
  auto cls = classify_edits(before, after, mappings);

  TreePtr tagged_before = before;
  TreePtr tagged_after = after;
  if (bug && bug->variable) {
    tagged_before = tag_error_names(before, *bug->variable);
    tagged_after = tag_error_names(after, *bug->variable);
  }
  Index t1(before), t2(after);

  // modification counts per subtree
  std::vector<int> mods1(t1.size(), 0), mods2(t2.size(), 0);
  for (int i = t1.size() - 1; i >= 0; --i) {
    mods1[i] = cls.before_flags[i].modified() ? 1 : 0;
    for (int k : t1.children_of(i)) mods1[i] += mods1[k];
  }
  for (int i = t2.size() - 1; i >= 0; --i) {
    mods2[i] = cls.after_flags[i].modified() ? 1 : 0;
    for (int k : t2.children_of(i)) mods2[i] += mods2[k];
  }

  std::vector<EditPattern> out;
  for (int b = 0; b < t1.size(); ++b) {
    int a = cls.before_partner[b];
    if (a == -1) continue;
    int proper1 = mods1[b] - (cls.before_flags[b].modified() ? 1 : 0);
    int proper2 = mods2[a] - (cls.after_flags[a].modified() ? 1 : 0);
    if (proper1 + proper2 == 0) continue;

    EditPattern e;
    e.before = resolve(tagged_before, t1[b].ref);
    e.after = resolve(tagged_after, t2[a].ref);
    for (int x = b; x < b + t1[b].size; ++x) {
      int y = cls.before_partner[x];
      if (y == -1 || !t2.contains(a, y)) continue;
      MapFlag flag = cls.before_subtree_unmod[x] ? MapFlag::Unmod : MapFlag::Mod;
      e.mappings.push_back(NodeMapping{rebase(t1, b, x), rebase(t2, a, y), flag});
    }
    std::sort(e.mappings.begin(), e.mappings.end());

    // anchor line: shallowest modified before node inside the edit; for
    // pure insertions, the gap the first inserted region lands in
    std::optional<int> anchor_line;
    bool insertion_anchor = false;
    int best_depth = -1;
    for (int x = b; x < b + t1[b].size; ++x) {
      if (!cls.before_flags[x].modified()) continue;
      int depth = static_cast<int>(t1[x].ref.path.size());
      if (span_start(t1[x].node) == 0) continue;
      if (best_depth == -1 || depth < best_depth) {
        best_depth = depth;
        anchor_line = span_start(t1[x].node);
      }
    }
    if (!anchor_line) {
      // first inserted node (preorder) within the after subtree
      for (int y = a; y < a + t2[a].size; ++y) {
        if (!cls.after_flags[y].inserted) continue;
        // climb to the top of the inserted chain
        int top = y;
        while (t2[top].parent != -1 &&
               cls.after_flags[t2[top].parent].inserted)
          top = t2[top].parent;
        int parent = t2[top].parent;
        if (parent == -1) break;
        auto siblings = t2.children_of(parent);
        auto it = std::find(siblings.begin(), siblings.end(), top);
        // next mapped sibling's before line, else previous's end line
        for (auto s = it + 1; s != siblings.end(); ++s) {
          int x = cls.after_partner[*s];
          if (x != -1 && span_start(t1[x].node) > 0) {
            anchor_line = span_start(t1[x].node) - 1;
            break;
          }
        }
        if (!anchor_line) {
          for (auto s = it; s != siblings.begin();) {
            --s;
            int x = cls.after_partner[*s];
            if (x != -1 && span_end(t1[x].node) > 0) {
              anchor_line = span_end(t1[x].node);
              break;
            }
          }
        }
        if (!anchor_line) {
          int x = cls.after_partner[parent];
          if (x != -1 && span_start(t1[x].node) > 0)
            anchor_line = span_start(t1[x].node);
        }
        insertion_anchor = true;
        break;
      }
    }

    int z = 0;
    if (bug && anchor_line) {
      if (insertion_anchor) {
        int gap = *anchor_line;  // insertion between lines gap and gap+1
        z = gap < bug->line ? gap - bug->line : gap + 1 - bug->line;
      } else {
        z = *anchor_line - bug->line;
      }
    }
    e.line_offset = z;
    e.stats.leaf_count = 1;
    e.stats.ratio_above = z < 0 ? 1.0 : (z > 0 ? 0.0 : 0.5);
    e.stats.geom_above = z < 0 ? 1.0 / (-z + 1) : 1.0;
    e.stats.geom_below = z > 0 ? 1.0 / (z + 1) : 1.0;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace fixpat
