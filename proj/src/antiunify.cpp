#include "fixpat/antiunify.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <unordered_map>

namespace fixpat {

namespace {

bool error_tagged(const TreePtr& t) {
  if (t->is_hole()) return t->hole().error_variable;
  return t->label() == "Name" && t->error_tagged();
}

std::optional<std::string> effective_label(const TreePtr& t) {
  if (t->is_hole()) return t->hole().label;
  return t->label();
}

// Mutable node under construction; frozen into a TreePtr at the end.
struct GenNode {
  bool is_hole = false;
  Hole hole;
  std::string label;
  std::string value;
  bool error_tag = false;
  std::vector<std::pair<std::string, GenNode*>> children;
};

class Arena {
 public:
  GenNode* make() {
    nodes_.emplace_back();
    return &nodes_.back();
  }

 private:
  std::deque<GenNode> nodes_;
};

// Shared hole table: identical substitution pairs reuse the same index.
class HoleTable {
 public:
  struct Entry {
    TreePtr left, right;
    Hole hole;
  };

  const Hole& hole_for(const TreePtr& l, const TreePtr& r) {
    size_t key = structural_hash(l) * 1000003u + structural_hash(r);
    auto& bucket = table_[key];
    for (const Entry& e : bucket) {
      if (structural_equal(e.left, l) && structural_equal(e.right, r))
        return e.hole;
    }
    auto la = effective_label(l);
    auto lb = effective_label(r);
    Hole h;
    h.index = next_index_++;
    if (la && lb && *la == *lb) h.label = la;
    h.error_variable = error_tagged(l) && error_tagged(r);
    bucket.push_back(Entry{l, r, h});
    substitution_[h.index] = SubstPair{l, r};
    return bucket.back().hole;
  }

  const PairSubstitution& substitution() const { return substitution_; }

 private:
  std::unordered_map<size_t, std::vector<Entry>> table_;
  PairSubstitution substitution_;
  int next_index_ = 0;
};

bool same_shape(const TreePtr& a, const TreePtr& b) {
  if (a->is_hole() || b->is_hole()) return false;
  if (a->label() != b->label() || a->value() != b->value()) return false;
  if (a->children().size() != b->children().size()) return false;
  for (size_t i = 0; i < a->children().size(); ++i)
    if (a->children()[i].location != b->children()[i].location) return false;
  return true;
}

// Plain anti-unification over tree patterns (no stripping).
GenNode* au_raw(const TreePtr& a, const TreePtr& b, Arena& arena,
                HoleTable& holes) {
  GenNode* g = arena.make();
  if (same_shape(a, b)) {
    g->label = a->label();
    g->value = a->value();
    g->error_tag = error_tagged(a) && error_tagged(b);
    for (size_t i = 0; i < a->children().size(); ++i) {
      g->children.push_back(
          {a->children()[i].location,
           au_raw(a->children()[i].node, b->children()[i].node, arena, holes)});
    }
    return g;
  }
  if (!a->is_hole() && !b->is_hole() && a->label() == b->label()) {
    g->is_hole = true;
    g->hole = holes.hole_for(a, b);
    return g;
  }
  g->is_hole = true;
  g->hole = holes.hole_for(a, b);
  return g;
}

TreePtr freeze(const GenNode* g) {
  if (g->is_hole)
    return Tree::make_hole(g->hole.index, g->hole.label,
                           g->hole.error_variable);
  std::vector<Child> kids;
  for (const auto& [loc, child] : g->children)
    kids.push_back(Child{loc, freeze(child)});
  TreePtr t = Tree::make(g->label, g->value, std::move(kids));
  return g->error_tag ? t->with_error_tag(true) : t;
}

void freeze_paths(const GenNode* g, std::vector<int>& path,
                  std::map<const GenNode*, TreeRef>& out) {
  out[g] = TreeRef{path};
  for (size_t i = 0; i < g->children.size(); ++i) {
    path.push_back(static_cast<int>(i));
    freeze_paths(g->children[i].second, path, out);
    path.pop_back();
  }
}

// --------------------------------------------------------- edit patterns

using Path = std::vector<int>;

struct SideInfo {
  TreePtr root;
  std::set<Path> unmod;                 // unmod mapping endpoints (this side)
  std::map<Path, Path> unmod_partner;   // unmod endpoint -> other side path
};

SideInfo before_side(const EditPattern& e) {
  SideInfo s;
  s.root = e.before;
  for (const auto& m : e.mappings) {
    if (m.flag != MapFlag::Unmod) continue;
    s.unmod.insert(m.before.path);
    s.unmod_partner[m.before.path] = m.after.path;
  }
  return s;
}

SideInfo after_side(const EditPattern& e) {
  SideInfo s;
  s.root = e.after;
  for (const auto& m : e.mappings) {
    if (m.flag != MapFlag::Unmod) continue;
    s.unmod.insert(m.after.path);
    s.unmod_partner[m.after.path] = m.before.path;
  }
  return s;
}

// Fully stripped copy of the subtree at `path` (unmod children removed at
// every level); used as the substitution key for holes over kept nodes.
TreePtr stripped_subtree(const SideInfo& side, const TreePtr& node,
                         const Path& path) {
  if (node->is_hole()) return node;
  std::vector<Child> kids;
  for (size_t i = 0; i < node->children().size(); ++i) {
    Path cp = path;
    cp.push_back(static_cast<int>(i));
    if (side.unmod.count(cp)) continue;
    kids.push_back(
        Child{node->children()[i].location,
              stripped_subtree(side, node->children()[i].node, cp)});
  }
  return Tree::make(node->label(), node->value(), std::move(kids))
      ->with_error_tag(node->error_tagged());
}

struct EffChild {
  int index;
  TreePtr node;
  std::string location;
};

std::vector<EffChild> effective_children(const SideInfo& side,
                                         const TreePtr& node,
                                         const Path& path) {
  std::vector<EffChild> out;
  for (size_t i = 0; i < node->children().size(); ++i) {
    Path cp = path;
    cp.push_back(static_cast<int>(i));
    if (side.unmod.count(cp)) continue;
    out.push_back(EffChild{static_cast<int>(i), node->children()[i].node,
                           node->children()[i].location});
  }
  return out;
}

class EditAntiUnifier {
 public:
  EditAntiUnifier(const EditPattern& e1, const EditPattern& e2)
      : e1_(e1),
        e2_(e2),
        b1_(before_side(e1)),
        b2_(before_side(e2)),
        a1_(after_side(e1)),
        a2_(after_side(e2)) {}

  EditPattern run(PairSubstitution* substitution) {
    GenNode* gb = au_side(b1_, e1_.before, {}, b2_, e2_.before, {}, true);
    GenNode* ga = au_side(a1_, e1_.after, {}, a2_, e2_.after, {}, false);

    reestablish_mappings();
    pop_unmod(gb, ga);

    EditPattern out;
    out.before = freeze(gb);
    out.after = freeze(ga);
    std::map<const GenNode*, TreeRef> before_paths, after_paths;
    std::vector<int> buf;
    freeze_paths(gb, buf, before_paths);
    buf.clear();
    freeze_paths(ga, buf, after_paths);
    for (const auto& [nb, na, flag] : gen_mappings_) {
      auto ib = before_paths.find(nb);
      auto ia = after_paths.find(na);
      if (ib == before_paths.end() || ia == after_paths.end()) continue;
      out.mappings.push_back(NodeMapping{ib->second, ia->second, flag});
    }
    std::sort(out.mappings.begin(), out.mappings.end());
    std::map<int, int> remap;
    out = canonicalize_holes(out, &remap);
    if (substitution) {
      substitution->clear();
      for (const auto& [idx, pair] : holes_.substitution()) {
        auto it = remap.find(idx);
        if (it != remap.end()) (*substitution)[it->second] = pair;
      }
    }
    return out;
  }

 private:
  struct Prov {
    Path p1, p2;
    const SideInfo* s1;
    const SideInfo* s2;
    TreePtr n1, n2;
  };

  // Anti-unification of one side over on-the-fly stripped trees.
  GenNode* au_side(const SideInfo& s1, const TreePtr& n1, const Path& p1,
                   const SideInfo& s2, const TreePtr& n2, const Path& p2,
                   bool before) {
    auto eff1 = effective_children(s1, n1, p1);
    auto eff2 = effective_children(s2, n2, p2);
    bool node_match = !n1->is_hole() && !n2->is_hole() &&
                      n1->label() == n2->label() &&
                      n1->value() == n2->value() && eff1.size() == eff2.size();
    if (node_match) {
      for (size_t i = 0; i < eff1.size(); ++i)
        if (eff1[i].location != eff2[i].location) node_match = false;
    }
    GenNode* g = arena_.make();
    if (node_match) {
      g->label = n1->label();
      g->value = n1->value();
      g->error_tag = error_tagged(n1) && error_tagged(n2);
      for (size_t i = 0; i < eff1.size(); ++i) {
        Path c1 = p1, c2 = p2;
        c1.push_back(eff1[i].index);
        c2.push_back(eff2[i].index);
        g->children.push_back(
            {eff1[i].location,
             au_side(s1, eff1[i].node, c1, s2, eff2[i].node, c2, before)});
      }
    } else {
      g->is_hole = true;
      g->hole = holes_.hole_for(stripped_subtree(s1, n1, p1),
                                stripped_subtree(s2, n2, p2));
    }
    auto& prov = before ? before_prov_ : after_prov_;
    prov[{p1, p2}] = g;
    (before ? before_meta_ : after_meta_)[g] =
        Prov{p1, p2, &s1, &s2, n1, n2};
    return g;
  }

  void reestablish_mappings() {
    // index e2's mappings for pair lookup
    std::map<Path, std::vector<const NodeMapping*>> e2_by_before;
    for (const auto& m : e2_.mappings) e2_by_before[m.before.path].push_back(&m);
    for (const auto& m1 : e1_.mappings) {
      for (const auto& [p2b, ms] : e2_by_before) {
        auto itb = before_prov_.find({m1.before.path, p2b});
        if (itb == before_prov_.end() || itb->second->is_hole) continue;
        for (const NodeMapping* m2 : ms) {
          auto ita = after_prov_.find({m1.after.path, m2->after.path});
          if (ita == after_prov_.end() || ita->second->is_hole) continue;
          MapFlag flag = (m1.flag == MapFlag::Unmod && m2->flag == MapFlag::Unmod)
                             ? MapFlag::Unmod
                             : MapFlag::Mod;
          gen_mappings_.push_back({itb->second, ita->second, flag});
          gen_partner_[itb->second] = ita->second;
        }
      }
    }
  }

  struct PopCandidate {
    int slot;
    int c1, c2;  // child indices in the original before-side parents
    int j1, j2;  // child indices of the after twins
    int after_slot;
    Path t1, t2;  // after twin paths
  };

  // Alignment of one slot group: which index pairs may pop together.
  struct GroupAlign {
    bool any = false;
    std::set<std::pair<int, int>> pairs;
  };

  static GroupAlign align_group(const std::vector<int>& a,
                                const std::vector<int>& b, bool anchored_left,
                                bool anchored_right) {
    GroupAlign g;
    if (!anchored_left && !anchored_right) {
      g.any = true;
      return g;
    }
    size_t n = std::min(a.size(), b.size());
    if (anchored_right && !anchored_left) {
      for (size_t i = 0; i < n; ++i)
        g.pairs.insert({a[a.size() - 1 - i], b[b.size() - 1 - i]});
    } else {
      for (size_t i = 0; i < n; ++i) g.pairs.insert({a[i], b[i]});
    }
    return g;
  }

  struct SideChildren {
    std::vector<int> kept;                    // child indices kept by strip
    std::vector<int> stripped;                // unmod child indices
    std::map<int, int> slot_of;               // stripped idx -> slot
    std::map<int, GroupAlign> align_with;     // computed lazily per slot
  };

  static SideChildren side_children(const SideInfo& s, const TreePtr& n,
                                    const Path& p) {
    SideChildren sc;
    for (size_t i = 0; i < n->children().size(); ++i) {
      Path cp = p;
      cp.push_back(static_cast<int>(i));
      if (s.unmod.count(cp))
        sc.stripped.push_back(static_cast<int>(i));
      else
        sc.kept.push_back(static_cast<int>(i));
    }
    for (int c : sc.stripped) {
      int slot = 0;
      for (int k : sc.kept)
        if (k < c) ++slot;
      sc.slot_of[c] = slot;
    }
    return sc;
  }

  void pop_unmod(GenNode* gb, GenNode* ga) {
    (void)gb;
    (void)ga;
    // Iterate generalized before nodes (in deterministic provenance order)
    // that have a mapped counterpart.
    for (auto& [paths, g] : before_prov_) {
      if (g->is_hole) continue;
      auto partner_it = gen_partner_.find(g);
      if (partner_it == gen_partner_.end()) continue;
      GenNode* h = partner_it->second;
      auto hmeta_it = after_meta_.find(h);
      if (hmeta_it == after_meta_.end() || h->is_hole) continue;
      const Prov& bp = before_meta_.at(g);
      const Prov& ap = hmeta_it->second;

      SideChildren bc1 = side_children(*bp.s1, bp.n1, bp.p1);
      SideChildren bc2 = side_children(*bp.s2, bp.n2, bp.p2);
      SideChildren ac1 = side_children(*ap.s1, ap.n1, ap.p1);
      SideChildren ac2 = side_children(*ap.s2, ap.n2, ap.p2);
      if (bc1.stripped.empty() || bc2.stripped.empty()) continue;

      int n_kept = static_cast<int>(bc1.kept.size());
      int n_kept_after = static_cast<int>(ac1.kept.size());

      // group stripped children by slot, per side
      auto group = [](const SideChildren& sc, int slot) {
        std::vector<int> out;
        for (int c : sc.stripped)
          if (sc.slot_of.at(c) == slot) out.push_back(c);
        return out;
      };

      std::vector<PopCandidate> accepted;
      for (int slot = 0; slot <= n_kept; ++slot) {
        std::vector<int> grp1 = group(bc1, slot);
        std::vector<int> grp2 = group(bc2, slot);
        if (grp1.empty() || grp2.empty()) continue;
        GroupAlign before_align =
            align_group(grp1, grp2, slot > 0, slot < n_kept);
        for (int c1 : grp1) {
          for (int c2 : grp2) {
            if (!before_align.any && !before_align.pairs.count({c1, c2}))
              continue;
            // after twins must be stripped children of the counterpart pair
            Path cp1 = bp.p1, cp2 = bp.p2;
            cp1.push_back(c1);
            cp2.push_back(c2);
            auto tw1 = bp.s1->unmod_partner.find(cp1);
            auto tw2 = bp.s2->unmod_partner.find(cp2);
            if (tw1 == bp.s1->unmod_partner.end() ||
                tw2 == bp.s2->unmod_partner.end())
              continue;
            const Path& t1 = tw1->second;
            const Path& t2 = tw2->second;
            if (t1.size() != ap.p1.size() + 1 ||
                !std::equal(ap.p1.begin(), ap.p1.end(), t1.begin()))
              continue;
            if (t2.size() != ap.p2.size() + 1 ||
                !std::equal(ap.p2.begin(), ap.p2.end(), t2.begin()))
              continue;
            int j1 = t1.back(), j2 = t2.back();
            if (!ac1.slot_of.count(j1) || !ac2.slot_of.count(j2)) continue;
            int aslot1 = ac1.slot_of.at(j1);
            int aslot2 = ac2.slot_of.at(j2);
            if (aslot1 != aslot2) continue;
            GroupAlign after_align =
                align_group(group(ac1, aslot1), group(ac2, aslot1), aslot1 > 0,
                            aslot1 < n_kept_after);
            if (!after_align.any && !after_align.pairs.count({j1, j2}))
              continue;
            accepted.push_back(
                PopCandidate{slot, c1, c2, j1, j2, aslot1, t1, t2});
          }
        }
      }
      // keep a monotone subset (stable, ordered by the left child index)
      std::sort(accepted.begin(), accepted.end(),
                [](const PopCandidate& x, const PopCandidate& y) {
                  return std::tie(x.c1, x.c2) < std::tie(y.c1, y.c2);
                });
      std::vector<PopCandidate> pops;
      int lc1 = -1, lc2 = -1, lj1 = -1, lj2 = -1;
      for (const PopCandidate& c : accepted) {
        if (c.c1 <= lc1 || c.c2 <= lc2 || c.j1 <= lj1 || c.j2 <= lj2) continue;
        pops.push_back(c);
        lc1 = c.c1;
        lc2 = c.c2;
        lj1 = c.j1;
        lj2 = c.j2;
      }
      if (pops.empty()) continue;

      // anti-unify each popped pair on both sides and splice the children in
      std::vector<Insertion> before_ins, after_ins;
      for (const PopCandidate& c : pops) {
        TreePtr sb1 = bp.n1->children()[c.c1].node;
        TreePtr sb2 = bp.n2->children()[c.c2].node;
        TreePtr sa1 = ap.n1->children()[c.j1].node;
        TreePtr sa2 = ap.n2->children()[c.j2].node;
        GenNode* pop_b = au_raw(sb1, sb2, arena_, holes_);
        GenNode* pop_a = au_raw(sa1, sa2, arena_, holes_);
        before_ins.push_back(Insertion{c.slot, c.c1,
                                       bp.n1->children()[c.c1].location, pop_b});
        after_ins.push_back(Insertion{c.after_slot, c.j1,
                                      ap.n1->children()[c.j1].location, pop_a});
        record_unmod_mappings(pop_b, pop_a);
      }
      splice_insertions(g, before_ins);
      splice_insertions(h, after_ins);
    }
  }

  // Context nodes map to their counterpart all the way down (the two sides
  // are structurally identical by construction).
  void record_unmod_mappings(GenNode* b, GenNode* a) {
    gen_mappings_.push_back({b, a, MapFlag::Unmod});
    for (size_t i = 0; i < b->children.size() && i < a->children.size(); ++i)
      record_unmod_mappings(b->children[i].second, a->children[i].second);
  }

  struct Insertion {
    int slot;
    int order;
    std::string location;
    GenNode* node;
  };

  // Rebuilds the child list with popped context interleaved: insertions
  // assigned to slot k go right before the k-th kept child.
  static void splice_insertions(GenNode* g, std::vector<Insertion>& ins) {
    if (ins.empty()) return;
    std::stable_sort(ins.begin(), ins.end(),
                     [](const Insertion& a, const Insertion& b) {
                       return std::tie(a.slot, a.order) <
                              std::tie(b.slot, b.order);
                     });
    std::vector<std::pair<std::string, GenNode*>> kept = g->children;
    std::vector<std::pair<std::string, GenNode*>> out;
    size_t next = 0;
    for (size_t k = 0; k <= kept.size(); ++k) {
      while (next < ins.size() && ins[next].slot == static_cast<int>(k)) {
        out.push_back({ins[next].location, ins[next].node});
        ++next;
      }
      if (k < kept.size()) out.push_back(kept[k]);
    }
    g->children = std::move(out);
  }

  Arena arena_;
  HoleTable holes_;
  const EditPattern& e1_;
  const EditPattern& e2_;
  SideInfo b1_, b2_, a1_, a2_;
  std::map<std::pair<Path, Path>, GenNode*> before_prov_, after_prov_;
  std::map<GenNode*, Prov> before_meta_, after_meta_;
  std::vector<std::tuple<GenNode*, GenNode*, MapFlag>> gen_mappings_;
  std::map<GenNode*, GenNode*> gen_partner_;
};

}  // namespace

TreePtr anti_unify_trees(const TreePtr& p, const TreePtr& q,
                         PairSubstitution* substitution) {
  Arena arena;
  HoleTable holes;
  GenNode* g = au_raw(p, q, arena, holes);
  if (substitution) *substitution = holes.substitution();
  return freeze(g);
}

TreePtr strip_unmod(const TreePtr& t,
                    const std::set<std::vector<int>>& unmod_paths) {
  SideInfo side;
  side.root = t;
  side.unmod = unmod_paths;
  return stripped_subtree(side, t, {});
}

EditPattern anti_unify_edits(const EditPattern& e1, const EditPattern& e2,
                             PairSubstitution* substitution) {
  EditAntiUnifier au(e1, e2);
  return au.run(substitution);
}

bool more_precise(const TreePtr& p, const TreePtr& q) {
  return pattern_equal(anti_unify_trees(p, q), q);
}

bool more_precise(const EditPattern& p, const EditPattern& q) {
  return edit_pattern_equal(anti_unify_edits(p, q), q);
}

}  // namespace fixpat
