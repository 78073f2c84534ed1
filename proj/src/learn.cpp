#include "fixpat/learn.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "fixpat/antiunify.hpp"
#include "fixpat/error.hpp"

namespace fixpat {

using nlohmann::json;

namespace {

using Path = std::vector<int>;

Path parent_path(const Path& p) {
  return Path(p.begin(), p.end() - 1);
}

void collect_paths(const TreePtr& t, Path& cur,
                   std::map<Path, TreePtr>& out) {
  out[cur] = t;
  for (size_t i = 0; i < t->children().size(); ++i) {
    cur.push_back(static_cast<int>(i));
    collect_paths(t->children()[i].node, cur, out);
    cur.pop_back();
  }
}

std::vector<int> lis_members(const std::vector<int>& seq) {
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
  return members;
}

}  // namespace

std::set<std::string> modified_labels(const EditPattern& e) {
  std::map<Path, TreePtr> before_nodes, after_nodes;
  Path buf;
  collect_paths(e.before, buf, before_nodes);
  buf.clear();
  collect_paths(e.after, buf, after_nodes);

  std::map<Path, Path> fwd, rev;
  for (const auto& m : e.mappings) {
    fwd[m.before.path] = m.after.path;
    rev[m.after.path] = m.before.path;
  }

  auto label_of = [](const TreePtr& t) {
    return t->is_hole() ? t->hole().label.value_or("?") : t->label();
  };

  std::set<std::string> out;
  for (const auto& [p, t] : before_nodes)
    if (!fwd.count(p)) out.insert(label_of(t));  // deleted
  for (const auto& [p, t] : after_nodes)
    if (!rev.count(p)) out.insert(label_of(t));  // inserted
  for (const auto& [bp, ap] : fwd) {
    const TreePtr& b = before_nodes.at(bp);
    const TreePtr& a = after_nodes.at(ap);
    if (b->is_hole() || a->is_hole()) continue;
    if (b->value() != a->value()) out.insert(b->label());  // update
    if (!bp.empty() && !ap.empty()) {
      auto it = fwd.find(parent_path(bp));
      if (it == fwd.end() || it->second != parent_path(ap))
        out.insert(b->label());  // cross-parent move
    } else if (bp.empty() != ap.empty()) {
      out.insert(label_of(b));
    }
  }
  // sibling reorders
  for (const auto& [bp, ap] : fwd) {
    const TreePtr& b = before_nodes.at(bp);
    std::vector<Path> kids;
    std::vector<int> positions;
    for (size_t i = 0; i < b->children().size(); ++i) {
      Path cp = bp;
      cp.push_back(static_cast<int>(i));
      auto it = fwd.find(cp);
      if (it == fwd.end()) continue;
      if (it->second.empty() || parent_path(it->second) != ap) continue;
      kids.push_back(cp);
      positions.push_back(it->second.back());
    }
    std::vector<int> keep = lis_members(positions);
    std::vector<bool> in_lis(kids.size(), false);
    for (int i : keep) in_lis[i] = true;
    for (size_t i = 0; i < kids.size(); ++i)
      if (!in_lis[i]) out.insert(label_of(before_nodes.at(kids[i])));
  }
  return out;
}

std::map<std::string, std::vector<int>> partition_edits(
    const std::vector<EditPattern>& edits) {
  std::map<std::string, std::vector<int>> out;
  for (size_t i = 0; i < edits.size(); ++i) {
    std::string key;
    for (const std::string& l : modified_labels(edits[i])) {
      if (!key.empty()) key += ",";
      key += l;
    }
    out[key].push_back(static_cast<int>(i));
  }
  return out;
}

bool after_holes_bound(const EditPattern& e) {
  std::set<int> before_holes;
  for (const Hole& h : collect_holes(e.before)) before_holes.insert(h.index);
  for (const Hole& h : collect_holes(e.after))
    if (!before_holes.count(h.index) && !h.error_variable) return false;
  return true;
}

MergeMetrics merge_metrics(const EditPattern& merged,
                           const PairSubstitution& substitution) {
  MergeMetrics m;
  m.after_unbound = !after_holes_bound(merged);
  std::set<int> hole_indices;
  for (const Hole& h : collect_holes(merged.before)) {
    hole_indices.insert(h.index);
    if (h.error_variable) ++m.error_holes;
  }
  for (const Hole& h : collect_holes(merged.after)) {
    if (hole_indices.count(h.index)) continue;
    hole_indices.insert(h.index);
    if (h.error_variable) ++m.error_holes;
  }
  m.hole_count = static_cast<int>(hole_indices.size());
  for (int idx : hole_indices) {
    auto it = substitution.find(idx);
    if (it == substitution.end()) continue;
    m.substituted_size +=
        node_count(it->second.left) + node_count(it->second.right);
  }
  for (const auto& mp : merged.mappings) {
    if (mp.flag == MapFlag::Mod) {
      ++m.mod_mappings;
      continue;
    }
    ++m.unmod_mappings;
    TreePtr b = resolve_or_null(merged.before, mp.before);
    TreePtr a = resolve_or_null(merged.after, mp.after);
    bool labeled = b && a && (!b->is_hole() || b->hole().label.has_value()) &&
                   (!a->is_hole() || a->hole().label.has_value());
    if (labeled) ++m.labeled_unmod;
  }
  return m;
}

int merge_preference(const MergeMetrics& a, const MergeMetrics& b) {
  if (a.key() < b.key()) return -1;
  if (b.key() < a.key()) return 1;
  return 0;
}

PatternStats propagate_stats(const PatternStats& left,
                             const PatternStats& right) {
  PatternStats s;
  double wl = left.leaf_count, wr = right.leaf_count;
  s.leaf_count = left.leaf_count + right.leaf_count;
  s.training_set_size =
      std::max(left.training_set_size, right.training_set_size);
  s.ratio_above = (wl * left.ratio_above + wr * right.ratio_above) / (wl + wr);
  auto mean = [](double p) { return (1.0 - p) / p; };
  double above = (wl * mean(left.geom_above) + wr * mean(right.geom_above)) /
                 (wl + wr);
  double below = (wl * mean(left.geom_below) + wr * mean(right.geom_below)) /
                 (wl + wr);
  s.geom_above = 1.0 / (1.0 + above);
  s.geom_below = 1.0 / (1.0 + below);
  return s;
}

namespace {

struct Merger {
  std::vector<DendrogramNode>& nodes;
  std::vector<MergeRecord>* trace;
  // cache of anti-unifications keyed by node id pair
  std::map<std::pair<int, int>, std::pair<EditPattern, MergeMetrics>> cache;

  const std::pair<EditPattern, MergeMetrics>& merged(int a, int b) {
    auto key = std::minmax(a, b);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    PairSubstitution subst;
    EditPattern e = anti_unify_edits(nodes[key.first].pattern,
                                     nodes[key.second].pattern, &subst);
    MergeMetrics m = merge_metrics(e, subst);
    return cache.emplace(key, std::make_pair(std::move(e), m)).first->second;
  }

  // nearest neighbor of `a` within `alive`: best merge metrics, ties by
  // lower node id
  int nearest(int a, const std::vector<int>& alive) {
    int best = -1;
    const MergeMetrics* best_m = nullptr;
    for (int x : alive) {
      if (x == a) continue;
      const MergeMetrics& m = merged(a, x).second;
      if (best == -1 || merge_preference(m, *best_m) < 0) {
        best = x;
        best_m = &m;
      }
    }
    return best;
  }

  int merge_pair(int a, int b) {
    auto key = std::minmax(a, b);
    DendrogramNode n;
    n.pattern = merged(a, b).first;
    n.pattern.stats =
        propagate_stats(nodes[key.first].pattern.stats,
                        nodes[key.second].pattern.stats);
    n.left = key.first;
    n.right = key.second;
    nodes.push_back(std::move(n));
    int id = static_cast<int>(nodes.size()) - 1;
    if (trace) trace->push_back(MergeRecord{key.first, key.second, id});
    return id;
  }

  // reduces the given node ids to a single root via nearest-neighbor chains
  int reduce(std::vector<int> alive) {
    std::vector<int> chain;
    while (alive.size() > 1) {
      if (chain.empty()) chain.push_back(alive.front());
      int a = chain.back();
      int b = nearest(a, alive);
      if (chain.size() >= 2 && chain[chain.size() - 2] == b) {
        int m = merge_pair(a, b);
        chain.pop_back();
        chain.pop_back();
        alive.erase(std::remove(alive.begin(), alive.end(), a), alive.end());
        alive.erase(std::remove(alive.begin(), alive.end(), b), alive.end());
        alive.push_back(m);
      } else {
        chain.push_back(b);
      }
    }
    return alive.front();
  }
};

}  // namespace

Dendrogram cluster(const std::vector<EditPattern>& edits,
                   std::vector<MergeRecord>* trace) {
  if (edits.empty()) throw UsageError("cluster: no edits given");
  Dendrogram d;
  for (const EditPattern& e : edits) {
    DendrogramNode n;
    n.pattern = canonicalize_holes(e);
    d.nodes.push_back(std::move(n));
  }
  Merger merger{d.nodes, trace, {}};
  auto partitions = partition_edits(edits);
  std::vector<int> roots;
  for (const auto& [key, members] : partitions)
    roots.push_back(merger.reduce(members));
  int root = roots.front();
  for (size_t i = 1; i < roots.size(); ++i)
    root = merger.merge_pair(root, roots[i]);
  d.root = root;
  return d;
}

PatternSet prune_hierarchy(const Dendrogram& d, int training_set_size,
                           double min_support) {
  PatternSet out;
  out.training_set_size = training_set_size;
  for (size_t i = 0; i < d.nodes.size(); ++i) {
    const DendrogramNode& n = d.nodes[i];
    if (!n.is_leaf())
      out.parents.push_back({n.left, n.right, static_cast<int>(i)});
    double share = training_set_size > 0
                       ? static_cast<double>(n.pattern.stats.leaf_count) /
                             training_set_size
                       : 1.0;
    if (share < min_support) continue;
    if (!after_holes_bound(n.pattern)) continue;
    PatternSet::Entry e;
    e.pattern = n.pattern;
    e.pattern.stats.training_set_size = training_set_size;
    e.node_id = static_cast<int>(i);
    out.patterns.push_back(std::move(e));
  }
  return out;
}

namespace {

json path_json(const TreeRef& r) {
  json a = json::array();
  for (int i : r.path) a.push_back(i);
  return a;
}

TreeRef path_from_json(const json& j) {
  TreeRef r;
  for (const auto& v : j) r.path.push_back(v.get<int>());
  return r;
}

json tree_json(const TreePtr& t);

json tree_json(const TreePtr& t) {
  json j = json::object();
  if (t->is_hole()) {
    const Hole& h = t->hole();
    j["hole"] = json{{"index", h.index},
                     {"label", h.label ? json(*h.label) : json(nullptr)},
                     {"errorVariable", h.error_variable}};
    return j;
  }
  j["label"] = t->label();
  j["value"] = t->value();
  json kids = json::array();
  for (const auto& c : t->children())
    kids.push_back(json{{"location", c.location}, {"tree", tree_json(c.node)}});
  j["children"] = kids;
  if (t->span())
    j["span"] = json{{"startLine", t->span()->start_line},
                     {"endLine", t->span()->end_line}};
  return j;
}

TreePtr tree_from_json(const json& j) {
  if (j.contains("hole")) {
    const json& h = j.at("hole");
    std::optional<std::string> label;
    if (!h.at("label").is_null()) label = h.at("label").get<std::string>();
    return Tree::make_hole(h.at("index").get<int>(), label,
                           h.value("errorVariable", false));
  }
  std::vector<Child> kids;
  for (const auto& c : j.at("children"))
    kids.push_back(Child{c.at("location").get<std::string>(),
                         tree_from_json(c.at("tree"))});
  std::optional<Span> span;
  if (j.contains("span"))
    span = Span{j.at("span").at("startLine").get<int>(),
                j.at("span").at("endLine").get<int>()};
  return Tree::make(j.at("label").get<std::string>(),
                    j.value("value", std::string()), std::move(kids), span);
}

}  // namespace

std::string serialize_pattern_set(const PatternSet& set) {
  json j = json::object();
  j["trainingSetSize"] = set.training_set_size;
  json patterns = json::array();
  for (const auto& e : set.patterns) {
    json p = json::object();
    p["node"] = e.node_id;
    p["before"] = tree_json(e.pattern.before);
    p["after"] = tree_json(e.pattern.after);
    json maps = json::array();
    for (const auto& m : e.pattern.mappings)
      maps.push_back(json::array(
          {path_json(m.before), path_json(m.after),
           m.flag == MapFlag::Mod ? "mod" : "unmod"}));
    p["mappings"] = maps;
    p["stats"] = json{{"leafCount", e.pattern.stats.leaf_count},
                      {"ratioAbove", e.pattern.stats.ratio_above},
                      {"geomAbove", e.pattern.stats.geom_above},
                      {"geomBelow", e.pattern.stats.geom_below}};
    patterns.push_back(p);
  }
  j["patterns"] = patterns;
  json parents = json::array();
  for (const auto& edge : set.parents)
    parents.push_back(json::array({edge[0], edge[1], edge[2]}));
  j["parents"] = parents;
  return j.dump(2);
}

PatternSet parse_pattern_set(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed pattern set: ") + e.what(),
                     static_cast<long>(e.byte));
  }
  PatternSet set;
  set.training_set_size = j.at("trainingSetSize").get<int>();
  for (const auto& p : j.at("patterns")) {
    PatternSet::Entry e;
    e.node_id = p.value("node", -1);
    e.pattern.before = tree_from_json(p.at("before"));
    e.pattern.after = tree_from_json(p.at("after"));
    for (const auto& m : p.at("mappings")) {
      NodeMapping nm;
      nm.before = path_from_json(m.at(0));
      nm.after = path_from_json(m.at(1));
      nm.flag = m.at(2).get<std::string>() == "mod" ? MapFlag::Mod
                                                    : MapFlag::Unmod;
      e.pattern.mappings.push_back(nm);
    }
    const json& s = p.at("stats");
    e.pattern.stats.leaf_count = s.at("leafCount").get<int>();
    e.pattern.stats.ratio_above = s.at("ratioAbove").get<double>();
    e.pattern.stats.geom_above = s.at("geomAbove").get<double>();
    e.pattern.stats.geom_below = s.at("geomBelow").get<double>();
    e.pattern.stats.training_set_size = set.training_set_size;
    set.patterns.push_back(std::move(e));
  }
  if (j.contains("parents"))
    for (const auto& edge : j.at("parents"))
      set.parents.push_back({edge.at(0).get<int>(), edge.at(1).get<int>(),
                             edge.at(2).get<int>()});
  return set;
}

}  // namespace fixpat
