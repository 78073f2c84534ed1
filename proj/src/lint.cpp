#include "fixpat/lint.hpp"

#include <algorithm>

#include <json.hpp>

#include "fixpat/error.hpp"

namespace fixpat {

namespace {

const TreePtr* find_child(const TreePtr& t, const std::string& loc) {
  for (const auto& c : t->children())
    if (c.location == loc) return &c.node;
  return nullptr;
}

bool is_null_literal(const TreePtr& t) {
  return !t->is_hole() && t->label() == "Literal" && t->value() == "null";
}

bool is_name(const TreePtr& t, const std::string& v) {
  return !t->is_hole() && t->label() == "Name" && t->value() == v;
}

// cond contains "v != null" (either operand order) as a top-level && conjunct
bool has_not_null_conjunct(const TreePtr& cond, const std::string& v) {
  if (cond->is_hole()) return false;
  if (cond->label() == "BinEx" && cond->value() == "&&") {
    return has_not_null_conjunct(*find_child(cond, "left"), v) ||
           has_not_null_conjunct(*find_child(cond, "right"), v);
  }
  if (cond->label() == "BinEx" && cond->value() == "!=") {
    const TreePtr& l = *find_child(cond, "left");
    const TreePtr& r = *find_child(cond, "right");
    return (is_name(l, v) && is_null_literal(r)) ||
           (is_null_literal(l) && is_name(r, v));
  }
  return false;
}

// "if (v == null) return;" with a bare return (possibly in a block), no else
bool is_early_return_guard(const TreePtr& stmt, const std::string& v) {
  if (stmt->is_hole() || stmt->label() != "If") return false;
  if (find_child(stmt, "else")) return false;
  const TreePtr* cond = find_child(stmt, "cond");
  if (!cond) return false;
  if ((*cond)->is_hole() || (*cond)->label() != "BinEx" ||
      (*cond)->value() != "==")
    return false;
  const TreePtr& l = *find_child(*cond, "left");
  const TreePtr& r = *find_child(*cond, "right");
  bool checks_v = (is_name(l, v) && is_null_literal(r)) ||
                  (is_null_literal(l) && is_name(r, v));
  if (!checks_v) return false;
  const TreePtr* then_branch = find_child(stmt, "then");
  if (!then_branch) return false;
  const TreePtr& t = *then_branch;
  if (!t->is_hole() && t->label() == "Return") return true;
  if (!t->is_hole() && t->label() == "Block" && t->children().size() == 1) {
    const TreePtr& only = t->children()[0].node;
    return !only->is_hole() && only->label() == "Return";
  }
  return false;
}

struct Walker {
  const SourceFile& file;
  const std::set<std::string>& nullable;
  std::vector<BugReport> reports;
  std::set<std::pair<int, std::string>> seen;

  // ancestors from root to the current node (paired with the location the
  // walk descended through)
  std::vector<std::pair<TreePtr, std::string>> stack;

  void walk(const TreePtr& t) {
    if (!t->is_hole() &&
        (t->label() == "Call" || t->label() == "FieldAccess")) {
      const TreePtr* recv = find_child(t, "recv");
      if (recv && !(*recv)->is_hole() && (*recv)->label() == "Name" &&
          nullable.count((*recv)->value())) {
        check_receiver(**recv, (*recv)->value());
      }
    }
    for (const auto& c : t->children()) {
      stack.push_back({t, c.location});
      walk(c.node);
      stack.pop_back();
    }
  }

  void check_receiver(const Tree& recv, const std::string& v) {
    if (guarded(v)) return;
    int line = recv.span() ? recv.span()->start_line : 1;
    if (!seen.insert({line, v}).second) return;
    BugReport r;
    r.file = file.path;
    r.line = line;
    r.variable = v;
    r.category = "null-deref";
    reports.push_back(std::move(r));
  }

  bool guarded(const std::string& v) const {
    // walk outwards through the enclosing constructs
    for (size_t i = stack.size(); i-- > 0;) {
      const TreePtr& anc = stack[i].first;
      const std::string& via = stack[i].second;
      if (anc->is_hole()) continue;
      if (anc->label() == "If" && via == "then") {
        const TreePtr* cond = find_child(anc, "cond");
        if (cond && has_not_null_conjunct(*cond, v)) return true;
      }
      if (anc->label() == "Ternary" && via == "then") {
        const TreePtr* cond = find_child(anc, "cond");
        if (cond && has_not_null_conjunct(*cond, v)) return true;
      }
      if (anc->label() == "Block" && i + 1 < stack.size()) {
        // scan the statements preceding the one the use lives under
        const Tree* stmt_holder = stack[i + 1].first.get();
        for (size_t s = 0; s < anc->children().size(); ++s) {
          const TreePtr& stmt = anc->children()[s].node;
          if (stmt.get() == stmt_holder) break;
          if (is_early_return_guard(stmt, v)) return true;
        }
      }
    }
    return false;
  }
};

}  // namespace

std::vector<BugReport> analyze(const SourceFile& file,
                               const std::set<std::string>& nullable_names) {
  Walker w{file, nullable_names, {}, {}, {}};
  w.walk(file.tree);
  std::sort(w.reports.begin(), w.reports.end(),
            [](const BugReport& a, const BugReport& b) {
              return std::tie(a.line, *a.variable) <
                     std::tie(b.line, *b.variable);
            });
  return w.reports;
}

bool validate_fix(const FixCandidate& candidate, const SourceFile& file,
                  const BugReport& bug,
                  const std::set<std::string>& nullable_names) {
  SourceFile patched;
  try {
    patched = parse_source_file(file.path, candidate.patched_text);
  } catch (const ParseError&) {
    return false;
  }
  std::vector<BugReport> reports = analyze(patched, nullable_names);
  int a = candidate.change_prefix;           // 0-based first changed line
  int old_end = a + candidate.change_old_len;  // 0-based past-the-end
  int shift = candidate.change_new_len - candidate.change_old_len;
  auto matches_bug = [&](const BugReport& r) {
    if (bug.variable && r.variable != bug.variable) return false;
    int bug0 = bug.line - 1;
    if (bug0 < a) return r.line == bug.line;
    if (bug0 >= old_end) return r.line == bug.line + shift;
    // warning line was inside the replaced region: reject any report on the
    // rewritten lines
    int r0 = r.line - 1;
    return r0 >= a && r0 < a + candidate.change_new_len;
  };
  return std::none_of(reports.begin(), reports.end(), matches_bug);
}

std::set<std::string> parse_lint_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed lint config: ") + e.what(),
                     static_cast<long>(e.byte));
  }
  std::set<std::string> names;
  for (const auto& n : j.at("nullableNames"))
    names.insert(n.get<std::string>());
  return names;
}

std::string reports_json(const std::vector<BugReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const BugReport& r : reports) {
    arr.push_back(nlohmann::json{
        {"file", r.file},
        {"line", r.line},
        {"variable", r.variable ? nlohmann::json(*r.variable)
                                : nlohmann::json(nullptr)},
        {"category", r.category}});
  }
  return arr.dump(2);
}

}  // namespace fixpat
