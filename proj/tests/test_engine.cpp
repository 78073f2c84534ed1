#include <doctest.h>

#include <cmath>
#include <functional>

#include "fixpat/corpus.hpp"
#include "fixpat/engine.hpp"
#include "fixpat/diff.hpp"
#include "fixpat/textdiff.hpp"
#include "support/nullcheck4.hpp"
#include "support/treegen.hpp"

using namespace fixpat;
using testgen::n;

namespace {

TreePtr hole(int i, std::optional<std::string> label = std::nullopt,
             bool err = false) {
  return Tree::make_hole(i, std::move(label), err);
}

TreePtr strip_spans(const TreePtr& t) {
  if (t->is_hole()) return t;
  std::vector<Child> kids;
  for (const auto& c : t->children())
    kids.push_back(Child{c.location, strip_spans(c.node)});
  return Tree::make(t->label(), t->value(), std::move(kids));
}

SourceFile demo_file() {
  return parse_source_file("view.mj", testgen::nullcheck4_pairs()[0].before_text);
}

PatternStats stats(int leaves, int training, double ratio, double above,
                   double below) {
  PatternStats s;
  s.leaf_count = leaves;
  s.training_set_size = training;
  s.ratio_above = ratio;
  s.geom_above = above;
  s.geom_below = below;
  return s;
}

// p1: insert "if (h0 == null) return;" anywhere, h0 bound by error context
PatternSet::Entry pattern_insert_guard() {
  PatternSet::Entry e;
  e.node_id = 0;
  e.pattern.before = n("Block", "");
  e.pattern.after =
      n("Block", "",
        {{"stmt", n("If", "",
                    {{"cond", n("BinEx", "==",
                                {{"left", hole(0, "Name", true)},
                                 {"right", n("Literal", "null")}})},
                     {"then", n("Return", "")}})}});
  e.pattern.mappings = {{{{}}, {{}}, MapFlag::Mod}};
  e.pattern.stats = stats(3, 100, 1.0, 0.5, 1.0);
  return e;
}

// p2: h0.h1() -> h0 != null && h0.h1()
PatternSet::Entry pattern_guard_expr() {
  PatternSet::Entry e;
  e.node_id = 1;
  TreePtr call = n("Call", "", {{"recv", hole(0, "Name")},
                                {"name", hole(1, "Name")}});
  e.pattern.before = call;
  e.pattern.after =
      n("BinEx", "&&",
        {{"left", n("BinEx", "!=", {{"left", hole(0, "Name")},
                                    {"right", n("Literal", "null")}})},
         {"right", call}});
  e.pattern.mappings = {};
  e.pattern.stats = stats(5, 100, 0.0, 1.0, 1.0);
  return e;
}

// p3: h0.h1(); -> if (h0 == null) return; h0.h1();
PatternSet::Entry pattern_guard_stmt() {
  PatternSet::Entry e;
  e.node_id = 2;
  TreePtr call_stmt = n("ExprStmt", "",
                        {{"expr", n("Call", "", {{"recv", hole(0, "Name")},
                                                 {"name", hole(1, "Name")}})}});
  e.pattern.before = n("Block", "", {{"stmt", call_stmt}});
  e.pattern.after =
      n("Block", "",
        {{"stmt", n("If", "",
                    {{"cond", n("BinEx", "==",
                                {{"left", hole(0, "Name")},
                                 {"right", n("Literal", "null")}})},
                     {"then", n("Return", "")}})},
         {"stmt", call_stmt}});
  e.pattern.mappings = {{{{}}, {{}}, MapFlag::Mod},
                        {{{0}}, {{1}}, MapFlag::Unmod}};
  e.pattern.stats = stats(2, 100, 0.5, 1.0, 1.0);
  return e;
}

}  // namespace

TEST_CASE("repeated holes require identical subtrees") {
  TreePtr p4 = n("BinEx", "+", {{"left", hole(0)}, {"right", hole(0)}});
  TreePtr t2 = n("BinEx", "+", {{"left", n("Name", "x")},
                                {"right", n("Name", "y")}});
  TreePtr t3 = n("BinEx", "+", {{"left", n("Name", "x")},
                                {"right", n("Name", "x")}});
  CHECK(match_pattern(p4, t2).empty());
  auto matches = match_pattern(p4, t3);
  REQUIRE(matches.size() == 1);
  CHECK(matches[0].subst.at(0)->value() == "x");
}

TEST_CASE("labeled holes constrain the root label") {
  TreePtr p1 = n("BinEx", "+", {{"left", hole(0, "Name")},
                                {"right", hole(1, "Literal")}});
  TreePtr t1 = n("BinEx", "+", {{"left", n("Name", "x")},
                                {"right", n("Literal", "42")}});
  TreePtr t2 = n("BinEx", "+", {{"left", n("Name", "x")},
                                {"right", n("Name", "y")}});
  CHECK(match_pattern(p1, t1).size() == 1);
  CHECK(match_pattern(p1, t2).empty());
}

TEST_CASE("receiver call context matches once on the example file") {
  SourceFile f = demo_file();
  TreePtr pattern = n("ExprStmt", "",
                      {{"expr", n("Call", "", {{"recv", hole(0, "Name")},
                                               {"name", hole(1, "Name")}})}});
  auto matches = match_pattern(pattern, f.tree);
  REQUIRE(matches.size() == 1);
  CHECK(matches[0].subst.at(0)->value() == "mListView");
  CHECK(matches[0].subst.at(1)->value() == "clearListeners");
}

TEST_CASE("hole-free patterns match identical subtrees at the root") {
  TreePtr t = parse_source("void m() {\n    a.go();\n}\n");
  auto matches = match_pattern(t, t);
  REQUIRE(matches.size() >= 1);
  CHECK(matches[0].ref.path.empty());
  CHECK(matches[0].child_begin == 0);
  CHECK(matches[0].child_end == 1);
}

TEST_CASE("error-flagged holes only match the blamed variable") {
  SourceFile f = demo_file();
  TreePtr pattern = n("ExprStmt", "",
                      {{"expr", n("Call", "", {{"recv", hole(0, "Name", true)},
                                               {"name", hole(1, "Name")}})}});
  CHECK(match_pattern(pattern, f.tree, std::string("mListView")).size() == 1);
  CHECK(match_pattern(pattern, f.tree, std::string("other")).empty());
}

TEST_CASE("scores follow their closed forms") {
  CHECK(score_prevalence(stats(3, 100, 0, 1, 1)) == doctest::Approx(0.03));
  CHECK(score_prevalence(stats(804, 804, 0, 1, 1)) == doctest::Approx(1.0));
  CHECK(score_prevalence(stats(5, 804, 0, 1, 1)) ==
        doctest::Approx(5.0 / 804));

  // all mass above, geometric p = 0.5: one line above scores 1 * 0.5^2
  CHECK(score_location(stats(1, 1, 1.0, 0.5, 1.0), -1) ==
        doctest::Approx(0.25));
  // never observed below: zero below the line
  CHECK(score_location(stats(1, 1, 1.0, 0.5, 1.0), 2) == doctest::Approx(0.0));
  // z = 0 takes the better side at distance zero
  CHECK(score_location(stats(1, 1, 0.5, 1.0, 1.0), 0) == doctest::Approx(0.5));

  CHECK(score_specialization(120, 3) == doctest::Approx(40.0));
  CHECK(score_specialization(20, 1) == doctest::Approx(20.0));
  CHECK(score_specialization(7, 7) == doctest::Approx(1.0));
}

TEST_CASE("a bare wildcard before part matches every node") {
  SourceFile f = demo_file();
  auto matches = match_pattern(hole(0), f.tree);
  CHECK(static_cast<int>(matches.size()) == node_count(f.tree));
  CHECK(score_specialization(node_count(f.tree),
                             static_cast<int>(matches.size())) ==
        doctest::Approx(1.0));
}

TEST_CASE("candidate enumeration covers the worked example sites") {
  SourceFile f = demo_file();
  BugReport bug;
  bug.file = f.path;
  bug.line = 2;
  bug.variable = "mListView";

  PatternSet set;
  set.training_set_size = 100;
  set.patterns = {pattern_insert_guard(), pattern_guard_expr(),
                  pattern_guard_stmt()};

  auto candidates = enumerate_candidates(set, f, bug);

  std::vector<int> insert_zs;
  int expr_candidates = 0, stmt_candidates = 0;
  for (const auto& c : candidates) {
    if (c.pattern_id == 0) insert_zs.push_back(c.z);
    if (c.pattern_id == 1) {
      ++expr_candidates;
      CHECK(c.z == 0);
    }
    if (c.pattern_id == 2) {
      ++stmt_candidates;
      // the guarded statement re-renders unchanged, so the textual change
      // is the inserted check right above the buggy line
      CHECK(c.z == -1);
    }
  }
  // the early return fits above, between, and below the two statements
  REQUIRE(insert_zs.size() == 3);
  CHECK(insert_zs[0] == -1);
  CHECK(insert_zs[1] == 1);
  CHECK(insert_zs[2] == 2);
  CHECK(expr_candidates == 1);
  CHECK(stmt_candidates == 1);
}

TEST_CASE("patterns that match nowhere contribute no candidates") {
  SourceFile f = demo_file();
  BugReport bug;
  bug.line = 2;
  bug.variable = "mListView";
  PatternSet set;
  set.training_set_size = 10;
  PatternSet::Entry e;
  e.node_id = 0;
  e.pattern.before = n("Return", "", {{"value", n("Literal", "7")}});
  e.pattern.after = n("Return", "");
  e.pattern.stats = stats(1, 10, 0.5, 1, 1);
  set.patterns = {e};
  CHECK(enumerate_candidates(set, f, bug).empty());
}

TEST_CASE("patterns needing an error variable are skipped without one") {
  SourceFile f = demo_file();
  BugReport bug;
  bug.line = 2;  // no variable
  PatternSet set;
  set.training_set_size = 10;
  set.patterns = {pattern_insert_guard()};
  CHECK(enumerate_candidates(set, f, bug).empty());
}

TEST_CASE("ranking orders the worked example") {
  auto mk = [](int id, double prevalence, double location,
               double specialization, int z) {
    FixCandidate c;
    c.pattern_id = id;
    c.z = z;
    c.scores.prevalence = prevalence;
    c.scores.location = location;
    c.scores.specialization = specialization;
    return c;
  };
  std::vector<FixCandidate> cands = {
      mk(1, 0.03, 0.5, 20, -1),  // p1 above
      mk(1, 0.03, 0.0, 20, 1),   // p1 between
      mk(1, 0.03, 0.0, 20, 2),   // p1 below
      mk(2, 0.05, 0.95, 40, 0),  // p2
      mk(3, 0.02, 0.9, 200, 0),  // p3
  };
  rank_candidates(cands);
  CHECK(cands[0].pattern_id == 3);
  CHECK(cands[0].scores.total() == doctest::Approx(3.6).epsilon(1e-12));
  CHECK(cands[1].pattern_id == 2);
  CHECK(cands[1].scores.total() == doctest::Approx(1.9).epsilon(1e-12));
  CHECK(cands[2].pattern_id == 1);
  CHECK(cands[2].scores.total() == doctest::Approx(0.3).epsilon(1e-12));
  // the two zero-score insertions keep |z| order
  CHECK(cands[3].z == 1);
  CHECK(cands[4].z == 2);
}

TEST_CASE("single candidate ranks as itself") {
  FixCandidate c;
  c.pattern_id = 9;
  std::vector<FixCandidate> v{c};
  rank_candidates(v);
  CHECK(v.size() == 1);
  CHECK(v[0].pattern_id == 9);
}

TEST_CASE("equal totals break ties by smaller |z|") {
  FixCandidate a, b;
  a.pattern_id = 1;
  a.z = -3;
  a.scores = {0.5, 0.5, 2.0};
  b.pattern_id = 2;
  b.z = 1;
  b.scores = {0.5, 0.5, 2.0};
  std::vector<FixCandidate> v{a, b};
  rank_candidates(v);
  CHECK(v[0].pattern_id == 2);
}

TEST_CASE("scores are nonnegative and specialization at least one on hits") {
  SourceFile f = demo_file();
  BugReport bug;
  bug.line = 2;
  bug.variable = "mListView";
  PatternSet set;
  set.training_set_size = 100;
  set.patterns = {pattern_insert_guard(), pattern_guard_expr(),
                  pattern_guard_stmt()};
  for (const auto& c : enumerate_candidates(set, f, bug)) {
    CHECK(c.scores.prevalence >= 0);
    CHECK(c.scores.location >= 0);
    CHECK(c.scores.specialization >= 1.0);
  }
}

TEST_CASE("ranking is invariant under uniform scaling") {
  testgen::Rng rng(31337);
  std::vector<FixCandidate> cands;
  for (int i = 0; i < 12; ++i) {
    FixCandidate c;
    c.pattern_id = i;
    c.z = rng.pick(7) - 3;
    c.scores.prevalence = (rng.pick(100) + 1) / 100.0;
    c.scores.location = (rng.pick(100) + 1) / 100.0;
    c.scores.specialization = rng.pick(50) + 1;
    cands.push_back(c);
  }
  std::vector<FixCandidate> scaled = cands;
  for (auto& c : scaled) {
    c.scores.prevalence *= 3.0;
    c.scores.location *= 2.0;
    c.scores.specialization *= 1.5;
  }
  rank_candidates(cands);
  rank_candidates(scaled);
  for (size_t i = 0; i < cands.size(); ++i)
    CHECK(cands[i].pattern_id == scaled[i].pattern_id);
}

TEST_CASE("applied candidates carry the instantiated after part") {
  SourceFile f = demo_file();
  BugReport bug;
  bug.line = 2;
  bug.variable = "mListView";
  PatternSet set;
  set.training_set_size = 100;
  set.patterns = {pattern_insert_guard(), pattern_guard_expr(),
                  pattern_guard_stmt()};
  auto candidates = enumerate_candidates(set, f, bug);
  REQUIRE(!candidates.empty());
  for (const auto& c : candidates) {
    CAPTURE(c.pattern_id);
    SourceFile patched = parse_source_file("p.mj", c.patched_text);
    // patch locality: the change is one contiguous region
    auto before_lines = split_lines(f.text);
    auto after_lines = split_lines(c.patched_text);
    CHECK(static_cast<int>(after_lines.size()) ==
          static_cast<int>(before_lines.size()) - c.change_old_len +
              c.change_new_len);
    // the instantiated after part sits at the site
    const EditPattern& pattern = set.patterns[c.pattern_id].pattern;
    TreePtr after_inst = pattern.after;
    std::function<TreePtr(const TreePtr&)> inst = [&](const TreePtr& t) -> TreePtr {
      if (t->is_hole()) {
        auto it = c.site.subst.find(t->hole().index);
        if (it != c.site.subst.end()) return it->second;
        return Tree::make("Name", *bug.variable);
      }
      std::vector<Child> kids;
      for (const auto& ch : t->children())
        kids.push_back(Child{ch.location, inst(ch.node)});
      return Tree::make(t->label(), t->value(), std::move(kids));
    };
    after_inst = inst(pattern.after);
    if (c.site.is_range()) {
      TreePtr block = resolve(patched.tree, c.site.ref);
      REQUIRE(block->label() == after_inst->label());
      int m = static_cast<int>(after_inst->children().size());
      REQUIRE(c.site.child_begin + m <=
              static_cast<int>(block->children().size()));
      for (int i = 0; i < m; ++i)
        CHECK(structural_equal(
            strip_spans(block->children()[c.site.child_begin + i].node),
            strip_spans(after_inst->children()[i].node)));
    } else {
      TreePtr node = resolve(patched.tree, c.site.ref);
      CHECK(structural_equal(strip_spans(node), strip_spans(after_inst)));
    }
  }
}
