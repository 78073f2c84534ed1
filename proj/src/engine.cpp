#include "fixpat/engine.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "fixpat/error.hpp"
#include "fixpat/textdiff.hpp"

namespace fixpat {

namespace {

bool is_list_label(const std::string& label) {
  return label == "Block" || label == "Class" || label == "CompilationUnit";
}

struct MatchContext {
  const std::optional<std::string>& error_variable;
};

bool match_at(const TreePtr& p, const TreePtr& t, const MatchContext& ctx,
              std::map<int, TreePtr>& subst) {
  if (p->is_hole()) {
    const Hole& h = p->hole();
    if (t->is_hole()) return false;  // only concrete trees are matched
    if (h.label && t->label() != *h.label) return false;
    if (h.error_variable) {
      if (!ctx.error_variable) return false;
      if (t->label() != "Name" || t->value() != *ctx.error_variable)
        return false;
    }
    auto it = subst.find(h.index);
    if (it != subst.end()) return structural_equal(it->second, t);
    subst[h.index] = t;
    return true;
  }
  if (t->is_hole()) return false;
  if (p->label() != t->label() || p->value() != t->value()) return false;
  if (p->children().size() != t->children().size()) return false;
  for (size_t i = 0; i < p->children().size(); ++i) {
    if (p->children()[i].location != t->children()[i].location) return false;
    if (!match_at(p->children()[i].node, t->children()[i].node, ctx, subst))
      return false;
  }
  return true;
}

void match_walk(const TreePtr& p, const TreePtr& t, const MatchContext& ctx,
                std::vector<int>& path, std::vector<Match>& out) {
  bool list_pattern = !p->is_hole() && is_list_label(p->label());
  if (list_pattern && !t->is_hole() && t->label() == p->label() &&
      t->value() == p->value()) {
    int k = static_cast<int>(p->children().size());
    int n = static_cast<int>(t->children().size());
    for (int o = 0; o + k <= n; ++o) {
      std::map<int, TreePtr> subst;
      bool ok = true;
      for (int i = 0; i < k && ok; ++i) {
        if (p->children()[i].location != t->children()[o + i].location)
          ok = false;
        else
          ok = match_at(p->children()[i].node, t->children()[o + i].node, ctx,
                        subst);
      }
      if (ok)
        out.push_back(Match{TreeRef{path}, o, o + k, std::move(subst)});
    }
  } else if (!list_pattern) {
    std::map<int, TreePtr> subst;
    if (match_at(p, t, ctx, subst))
      out.push_back(Match{TreeRef{path}, -1, -1, std::move(subst)});
  }
  for (size_t i = 0; i < t->children().size(); ++i) {
    path.push_back(static_cast<int>(i));
    match_walk(p, t->children()[i].node, ctx, path, out);
    path.pop_back();
  }
}

TreePtr instantiate(const TreePtr& t, const std::map<int, TreePtr>& subst,
                    const std::optional<std::string>& error_variable) {
  if (t->is_hole()) {
    const Hole& h = t->hole();
    auto it = subst.find(h.index);
    if (it != subst.end()) return it->second;
    if (h.error_variable && error_variable)
      return Tree::make("Name", *error_variable);
    throw InvariantError("cannot instantiate unbound hole " +
                         std::to_string(h.index));
  }
  std::vector<Child> kids;
  for (const auto& c : t->children())
    kids.push_back(Child{c.location, instantiate(c.node, subst, error_variable)});
  return Tree::make(t->label(), t->value(), std::move(kids));
}

bool needs_error_variable(const EditPattern& e) {
  for (const Hole& h : collect_holes(e.before))
    if (h.error_variable) return true;
  for (const Hole& h : collect_holes(e.after))
    if (h.error_variable) return true;
  return false;
}

// Line offset of the change relative to the warning: replaced lines anchor
// at the first changed line; pure insertions sit between lines and are one
// line above or below their neighbors.
int offset_from_region(const ChangeRegion& r, int bug_line) {
  if (r.old_len > 0) return r.prefix_len + 1 - bug_line;
  int gap = r.prefix_len;  // inserted between lines gap and gap+1
  return gap < bug_line ? gap - bug_line : gap + 1 - bug_line;
}

}  // namespace

std::vector<Match> match_pattern(
    const TreePtr& pattern, const TreePtr& tree,
    const std::optional<std::string>& error_variable) {
  MatchContext ctx{error_variable};
  std::vector<Match> out;
  std::vector<int> path;
  match_walk(pattern, tree, ctx, path, out);
  return out;
}

double score_prevalence(const PatternStats& stats) {
  if (stats.training_set_size <= 0) return 0.0;
  return static_cast<double>(stats.leaf_count) / stats.training_set_size;
}

double score_location(const PatternStats& stats, int z) {
  auto pmf = [](double p, int d) { return p * std::pow(1.0 - p, d); };
  if (z < 0) return stats.ratio_above * pmf(stats.geom_above, -z);
  if (z > 0) return (1.0 - stats.ratio_above) * pmf(stats.geom_below, z);
  return std::max(stats.ratio_above * pmf(stats.geom_above, 0),
                  (1.0 - stats.ratio_above) * pmf(stats.geom_below, 0));
}

double score_specialization(int file_node_count, int match_count) {
  if (match_count <= 0) return 0.0;
  return static_cast<double>(file_node_count) / match_count;
}

std::vector<FixCandidate> enumerate_candidates(const PatternSet& patterns,
                                               const SourceFile& file,
                                               const BugReport& bug) {
  std::vector<FixCandidate> out;
  int file_nodes = node_count(file.tree);
  for (size_t pi = 0; pi < patterns.patterns.size(); ++pi) {
    const EditPattern& pattern = patterns.patterns[pi].pattern;
    if (needs_error_variable(pattern) && !bug.variable) continue;
    std::vector<Match> matches =
        match_pattern(pattern.before, file.tree, bug.variable);
    if (matches.empty()) continue;
    double specialization =
        score_specialization(file_nodes, static_cast<int>(matches.size()));
    double prevalence = score_prevalence(pattern.stats);
    for (Match& m : matches) {
      TreePtr after;
      try {
        after = instantiate(pattern.after, m.subst, bug.variable);
      } catch (const InvariantError&) {
        continue;  // unbound hole; pattern not applicable here
      }
      std::string patched;
      try {
        if (m.is_range()) {
          std::vector<TreePtr> forest;
          if (!after->is_hole() &&
              after->label() == resolve(file.tree, m.ref)->label()) {
            for (const auto& c : after->children()) forest.push_back(c.node);
          } else {
            forest.push_back(after);
          }
          patched =
              splice_range(file, m.ref, m.child_begin, m.child_end, forest);
        } else {
          patched = splice_patch(file, m.ref, {after});
        }
      } catch (const RenderError&) {
        continue;  // pattern instantiated something the printer rejects
      }
      FixCandidate c;
      c.pattern_id = static_cast<int>(pi);
      c.site = std::move(m);
      c.patched_text = std::move(patched);
      ChangeRegion r = change_region(file.text, c.patched_text);
      c.change_prefix = r.prefix_len;
      c.change_old_len = r.old_len;
      c.change_new_len = r.new_len;
      c.z = r.empty() ? 0 : offset_from_region(r, bug.line);
      c.scores.prevalence = prevalence;
      c.scores.location = score_location(pattern.stats, c.z);
      c.scores.specialization = specialization;
      out.push_back(std::move(c));
    }
  }
  return out;
}

void rank_candidates(std::vector<FixCandidate>& candidates) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const FixCandidate& a, const FixCandidate& b) {
                     double ta = a.scores.total(), tb = b.scores.total();
                     if (ta != tb) return ta > tb;
                     if (a.scores.specialization != b.scores.specialization)
                       return a.scores.specialization > b.scores.specialization;
                     return std::abs(a.z) < std::abs(b.z);
                   });
}

std::string prediction_json(const std::vector<FixCandidate>& candidates,
                            const SourceFile& file, int top_k,
                            std::optional<bool> validated_top) {
  nlohmann::json arr = nlohmann::json::array();
  int limit = std::min<int>(top_k, static_cast<int>(candidates.size()));
  for (int i = 0; i < limit; ++i) {
    const FixCandidate& c = candidates[i];
    nlohmann::json j;
    j["rank"] = i + 1;
    j["patternId"] = c.pattern_id;
    j["z"] = c.z;
    j["scores"] = {{"prevalence", c.scores.prevalence},
                   {"location", c.scores.location},
                   {"specialization", c.scores.specialization},
                   {"total", c.scores.total()}};
    j["patch"] = render_unified_diff(file.text, c.patched_text, file.path);
    j["validated"] = (i == 0 && validated_top.has_value())
                         ? nlohmann::json(*validated_top)
                         : nlohmann::json(nullptr);
    arr.push_back(j);
  }
  return arr.dump(2);
}

}  // namespace fixpat
