#include <doctest.h>

#include <functional>

#include "fixpat/antiunify.hpp"
#include "fixpat/diff.hpp"
#include "fixpat/engine.hpp"
#include "fixpat/lang.hpp"
#include "support/treegen.hpp"

using namespace fixpat;
using testgen::n;

namespace {

TreePtr hole(int i, std::optional<std::string> label = std::nullopt,
             bool err = false) {
  return Tree::make_hole(i, std::move(label), err);
}

// The two block edits from the worked example: a call wrapped into a new
// conditional next to an untouched assignment.
EditPattern block_edit_one() {
  TreePtr before =
      n("Block", "",
        {{"stmt", n("Call", "f")},
         {"stmt", n("Call", "g")},
         {"stmt", n("Assign", "", {{"target", n("Name", "x")},
                                   {"value", n("Num", "1")}})}});
  TreePtr after =
      n("Block", "",
        {{"stmt", n("Call", "f")},
         {"stmt", n("Assign", "", {{"target", n("Name", "x")},
                                   {"value", n("Num", "1")}})},
         {"stmt", n("If", "", {{"cond", n("Name", "c")},
                               {"then", n("Call", "g")}})}});
  return EditPattern{before,
                     after,
                     {{{{}}, {{}}, MapFlag::Mod},
                      {{{0}}, {{0}}, MapFlag::Unmod},
                      {{{1}}, {{2, 1}}, MapFlag::Mod},
                      {{{2}}, {{1}}, MapFlag::Unmod},
                      {{{2, 0}}, {{1, 0}}, MapFlag::Unmod},
                      {{{2, 1}}, {{1, 1}}, MapFlag::Unmod}},
                     {},
                     {}};
}

EditPattern block_edit_two() {
  TreePtr before =
      n("Block", "",
        {{"stmt", n("Return", "")},
         {"stmt", n("Assign", "", {{"target", n("Name", "y")},
                                   {"value", n("Num", "2")}})}});
  TreePtr after =
      n("Block", "",
        {{"stmt", n("Assign", "", {{"target", n("Name", "y")},
                                   {"value", n("Num", "2")}})},
         {"stmt", n("If", "", {{"cond", n("Name", "c")},
                               {"then", n("Call", "onResult")}})}});
  return EditPattern{before,
                     after,
                     {{{{}}, {{}}, MapFlag::Mod},
                      {{{1}}, {{0}}, MapFlag::Unmod},
                      {{{1, 0}}, {{0, 0}}, MapFlag::Unmod},
                      {{{1, 1}}, {{0, 1}}, MapFlag::Unmod}},
                     {},
                     {}};
}

EditPattern edit_from_sources(const std::string& before,
                              const std::string& after, int bug_line,
                              const std::string& var) {
  TreePtr b = parse_source(before);
  TreePtr a = parse_source(after);
  BugReport bug;
  bug.line = bug_line;
  bug.variable = var;
  auto edits = extract_concrete_edits(b, a, bug);
  for (EditPattern& e : edits)
    if (!e.before->is_hole() && e.before->label() == "Block") return e;
  REQUIRE(!edits.empty());
  return edits.front();
}

}  // namespace

TEST_CASE("assignments generalize with hole reuse") {
  TreePtr a = parse_source("a = a + a;")->children()[0].node;
  TreePtr b = parse_source("b = b + 2;")->children()[0].node;
  PairSubstitution subst;
  TreePtr g = anti_unify_trees(a, b, &subst);
  TreePtr expected =
      n("Assign", "",
        {{"target", hole(0, "Name")},
         {"value", n("BinEx", "+", {{"left", hole(0, "Name")},
                                    {"right", hole(1)}})}});
  CHECK(pattern_equal(g, expected));
  // one hole substitutes a/b, the fresh one substitutes a/2
  REQUIRE(subst.size() == 2);
  bool saw_reused = false, saw_fresh = false;
  for (const auto& [idx, pair] : subst) {
    if (pair.left->value() == "a" && pair.right->value() == "b")
      saw_reused = true;
    if (pair.left->value() == "a" && pair.right->value() == "2")
      saw_fresh = true;
  }
  CHECK(saw_reused);
  CHECK(saw_fresh);
}

TEST_CASE("anti-unification of a tree with itself is the tree") {
  TreePtr t = parse_source("if (a == b) {\n    c();\n}\n");
  PairSubstitution subst;
  TreePtr g = anti_unify_trees(t, t, &subst);
  CHECK(pattern_equal(g, t));
  CHECK(subst.empty());
}

TEST_CASE("disjoint labels fall back to a wildcard hole") {
  TreePtr g = anti_unify_trees(n("Name", "x"), n("Literal", "1"));
  REQUIRE(g->is_hole());
  CHECK(!g->hole().label);
}

TEST_CASE("same label with different values keeps the label") {
  TreePtr g = anti_unify_trees(n("Call", "g"), n("Call", "onResult"));
  REQUIRE(g->is_hole());
  CHECK(g->hole().label == "Call");
}

TEST_CASE("strip removes maximal unmodified children") {
  TreePtr block = n("Block", "",
                    {{"stmt", n("Call", "f")},
                     {"stmt", n("Call", "g")},
                     {"stmt", n("Assign", "", {{"target", n("Name", "x")},
                                               {"value", n("Num", "1")}})}});
  SUBCASE("unmodified siblings drop") {
    TreePtr s = strip_unmod(block, {{0}, {2}, {2, 0}, {2, 1}});
    CHECK(pattern_equal(s, n("Block", "", {{"stmt", n("Call", "g")}})));
  }
  SUBCASE("fully modified trees stay") {
    CHECK(pattern_equal(strip_unmod(block, {}), block));
  }
  SUBCASE("fully unmodified trees reduce to a childless root") {
    TreePtr s = strip_unmod(block, {{0}, {1}, {2}});
    CHECK(pattern_equal(s, n("Block", "")));
  }
}

TEST_CASE("block edits generalize with context populated back") {
  EditPattern g = anti_unify_edits(block_edit_one(), block_edit_two());
  TreePtr exp_before =
      n("Block", "",
        {{"stmt", hole(0)},
         {"stmt", n("Assign", "", {{"target", hole(2, "Name")},
                                   {"value", hole(3, "Num")}})}});
  TreePtr exp_after =
      n("Block", "",
        {{"stmt", n("Assign", "", {{"target", hole(2, "Name")},
                                   {"value", hole(3, "Num")}})},
         {"stmt", n("If", "", {{"cond", n("Name", "c")},
                               {"then", hole(1, "Call")}})}});
  CHECK(pattern_equal_pair(g.before, g.after, exp_before, exp_after));

  // the block pair stays mapped as modified, the assignment as unmodified
  bool block_mod = false, assign_unmod = false;
  for (const auto& m : g.mappings) {
    if (m.before.path.empty() && m.after.path.empty())
      block_mod = m.flag == MapFlag::Mod;
    if (m.before.path == std::vector<int>{1} &&
        m.after.path == std::vector<int>{0})
      assign_unmod = m.flag == MapFlag::Unmod;
  }
  CHECK(block_mod);
  CHECK(assign_unmod);
}

TEST_CASE("edit generalization is idempotent modulo renaming") {
  EditPattern e = anti_unify_edits(block_edit_one(), block_edit_two());
  EditPattern again = anti_unify_edits(e, e);
  CHECK(edit_pattern_equal(again, canonicalize_holes(e)));
}

TEST_CASE("edits with disjoint root labels generalize to holes") {
  EditPattern a{n("Block", "", {{"stmt", n("Call", "f")}}),
                n("Block", ""),
                {{{{}}, {{}}, MapFlag::Mod}},
                {},
                {}};
  EditPattern b{n("If", "", {{"cond", n("Name", "c")}}),
                n("If", ""),
                {{{{}}, {{}}, MapFlag::Mod}},
                {},
                {}};
  EditPattern g = anti_unify_edits(a, b);
  CHECK(g.before->is_hole());
  CHECK(g.after->is_hole());
}

TEST_CASE("more precise: concrete trees sit below their patterns") {
  TreePtr t1 = n("BinEx", "+", {{"left", n("Name", "x")},
                                {"right", n("Literal", "42")}});
  TreePtr p1 = n("BinEx", "+", {{"left", hole(0, "Name")},
                                {"right", hole(1, "Literal")}});
  CHECK(more_precise(t1, p1));
  CHECK(!more_precise(p1, t1));
  CHECK(more_precise(p1, p1));
  CHECK(more_precise(p1, hole(0)));  // the wildcard hole is the top
  CHECK(more_precise(t1, hole(7)));
}

TEST_CASE("upper bound and commutativity on random pattern pairs") {
  testgen::Rng rng(5150);
  for (int i = 0; i < 60; ++i) {
    TreePtr p = testgen::gen_plain_tree(rng, 3);
    TreePtr q = testgen::gen_plain_tree(rng, 3);
    TreePtr g = anti_unify_trees(p, q);
    CAPTURE(to_term_string(p));
    CAPTURE(to_term_string(q));
    CHECK(more_precise(p, g));
    CHECK(more_precise(q, g));
    CHECK(pattern_equal(anti_unify_trees(q, p), g));
    CHECK(pattern_equal(anti_unify_trees(p, p), p));
  }
}

TEST_CASE("sampled leastness: no strict specialization of the result covers both") {
  testgen::Rng rng(5151);
  int checked = 0;
  for (int i = 0; i < 80 && checked < 25; ++i) {
    TreePtr p = testgen::gen_plain_tree(rng, 3);
    TreePtr q = testgen::gen_plain_tree(rng, 3);
    PairSubstitution subst;
    TreePtr g = anti_unify_trees(p, q, &subst);
    if (subst.empty()) continue;
    // specialize one hole with its left-input subtree
    auto it = subst.begin();
    std::advance(it, rng.pick(static_cast<int>(subst.size())));
    int idx = it->first;
    TreePtr refined = it->second.left;
    std::function<TreePtr(const TreePtr&)> subst_hole =
        [&](const TreePtr& t) -> TreePtr {
      if (t->is_hole())
        return t->hole().index == idx ? refined : t;
      std::vector<Child> kids;
      for (const auto& c : t->children())
        kids.push_back(Child{c.location, subst_hole(c.node)});
      return Tree::make(t->label(), t->value(), std::move(kids));
    };
    TreePtr g_refined = subst_hole(g);
    if (pattern_equal(g_refined, g)) continue;
    ++checked;
    CHECK(!(more_precise(p, g_refined) && more_precise(q, g_refined)));
  }
  CHECK(checked > 0);
}

TEST_CASE("generalization before parts match the inputs") {
  // single-modification edits only: context between two modified siblings
  // may legitimately drop out of matchable positions otherwise
  testgen::Rng rng(5152);
  std::function<TreePtr(const TreePtr&)> rename = [&](const TreePtr& t) {
    std::vector<Child> kids;
    for (const auto& c : t->children())
      kids.push_back(Child{c.location, rename(c.node)});
    std::string value =
        rng.chance(0.4) ? "r" + std::to_string(rng.pick(9)) : t->value();
    return Tree::make(t->label(), value, std::move(kids));
  };
  int checked = 0;
  for (int i = 0; i < 60 && checked < 20; ++i) {
    TreePtr b1 = testgen::gen_plain_tree(rng, 3);
    TreePtr a1 = testgen::mutate_plain(rng, b1);
    TreePtr b2 = rename(b1);
    TreePtr a2 = testgen::mutate_plain(rng, b2);
    auto e1s = extract_concrete_edits(b1, a1);
    auto e2s = extract_concrete_edits(b2, a2);
    if (e1s.empty() || e2s.empty()) continue;
    const EditPattern& e1 = e1s.front();
    const EditPattern& e2 = e2s.front();
    EditPattern g = anti_unify_edits(e1, e2);
    if (g.before->is_hole()) continue;
    ++checked;
    CAPTURE(to_term_string(g.before));
    CAPTURE(to_term_string(e1.before));
    CHECK(!match_pattern(g.before, e1.before).empty());
    CHECK(!match_pattern(g.before, e2.before).empty());
  }
  CHECK(checked > 0);
}

TEST_CASE("error flags survive only when both sides are tagged") {
  EditPattern e1 = edit_from_sources("void m() {\n    a.go();\n}\n",
                                     "void m() {\n"
                                     "    if (a == null)\n"
                                     "        return;\n"
                                     "    a.go();\n"
                                     "}\n",
                                     2, "a");
  EditPattern e2 = edit_from_sources("void t() {\n    b.run();\n}\n",
                                     "void t() {\n"
                                     "    if (b == null)\n"
                                     "        return;\n"
                                     "    b.run();\n"
                                     "}\n",
                                     2, "b");
  EditPattern g = anti_unify_edits(e1, e2);
  bool has_error_hole = false;
  for (const Hole& h : collect_holes(g.after)) has_error_hole |= h.error_variable;
  CHECK(has_error_hole);
}
