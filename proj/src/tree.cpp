#include "fixpat/tree.hpp"

#include <algorithm>
#include <sstream>

#include "fixpat/error.hpp"

namespace fixpat {

TreePtr Tree::make(std::string label, std::string value,
                   std::vector<Child> children, std::optional<Span> span) {
  if (label.empty()) throw InvariantError("tree node label must be non-empty");
  auto t = std::shared_ptr<Tree>(new Tree());
  t->label_ = std::move(label);
  t->value_ = std::move(value);
  t->children_ = std::move(children);
  t->span_ = span;
  return t;
}

TreePtr Tree::make_hole(int index, std::optional<std::string> label,
                        bool error_variable) {
  if (index < 0) throw InvariantError("hole index must be non-negative");
  auto t = std::shared_ptr<Tree>(new Tree());
  t->hole_ = Hole{index, std::move(label), error_variable};
  return t;
}

TreePtr Tree::with_span(std::optional<Span> span) const {
  auto t = std::shared_ptr<Tree>(new Tree(*this));
  t->span_ = span;
  return t;
}

TreePtr Tree::with_error_tag(bool tagged) const {
  auto t = std::shared_ptr<Tree>(new Tree(*this));
  t->error_tagged_ = tagged;
  return t;
}

TreePtr resolve_or_null(const TreePtr& root, const TreeRef& ref) {
  TreePtr cur = root;
  for (int idx : ref.path) {
    if (!cur || idx < 0 ||
        static_cast<size_t>(idx) >= cur->children().size())
      return nullptr;
    cur = cur->children()[idx].node;
  }
  return cur;
}

TreePtr resolve(const TreePtr& root, const TreeRef& ref) {
  TreePtr t = resolve_or_null(root, ref);
  if (!t) {
    std::ostringstream os;
    os << "tree reference [";
    for (size_t i = 0; i < ref.path.size(); ++i)
      os << (i ? "," : "") << ref.path[i];
    os << "] does not resolve";
    throw InvariantError(os.str());
  }
  return t;
}

int node_count(const TreePtr& t) {
  int n = 1;
  for (const auto& c : t->children()) n += node_count(c.node);
  return n;
}

bool is_concrete(const TreePtr& t) {
  if (t->is_hole()) return false;
  return std::all_of(t->children().begin(), t->children().end(),
                     [](const Child& c) { return is_concrete(c.node); });
}

bool structural_equal(const TreePtr& a, const TreePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->is_hole() != b->is_hole()) return false;
  if (a->is_hole()) return a->hole() == b->hole();
  if (a->label() != b->label() || a->value() != b->value()) return false;
  if (a->children().size() != b->children().size()) return false;
  for (size_t i = 0; i < a->children().size(); ++i) {
    if (a->children()[i].location != b->children()[i].location) return false;
    if (!structural_equal(a->children()[i].node, b->children()[i].node))
      return false;
  }
  return true;
}

namespace {

bool pattern_equal_rec(const TreePtr& a, const TreePtr& b,
                       std::map<int, int>& fwd, std::map<int, int>& rev) {
  if (a->is_hole() != b->is_hole()) return false;
  if (a->is_hole()) {
    const Hole& ha = a->hole();
    const Hole& hb = b->hole();
    if (ha.label != hb.label || ha.error_variable != hb.error_variable)
      return false;
    auto f = fwd.find(ha.index);
    auto r = rev.find(hb.index);
    if (f == fwd.end() && r == rev.end()) {
      fwd[ha.index] = hb.index;
      rev[hb.index] = ha.index;
      return true;
    }
    return f != fwd.end() && r != rev.end() && f->second == hb.index &&
           r->second == ha.index;
  }
  if (a->label() != b->label() || a->value() != b->value()) return false;
  if (a->children().size() != b->children().size()) return false;
  for (size_t i = 0; i < a->children().size(); ++i) {
    if (a->children()[i].location != b->children()[i].location) return false;
    if (!pattern_equal_rec(a->children()[i].node, b->children()[i].node, fwd,
                           rev))
      return false;
  }
  return true;
}

}  // namespace

bool pattern_equal(const TreePtr& a, const TreePtr& b) {
  std::map<int, int> fwd, rev;
  return pattern_equal_rec(a, b, fwd, rev);
}

bool pattern_equal_pair(const TreePtr& a_before, const TreePtr& a_after,
                        const TreePtr& b_before, const TreePtr& b_after) {
  std::map<int, int> fwd, rev;
  return pattern_equal_rec(a_before, b_before, fwd, rev) &&
         pattern_equal_rec(a_after, b_after, fwd, rev);
}

namespace {

void collect_holes_rec(const TreePtr& t, std::vector<Hole>& out,
                       std::map<int, bool>& seen) {
  if (t->is_hole()) {
    if (!seen.count(t->hole().index)) {
      seen[t->hole().index] = true;
      out.push_back(t->hole());
    }
    return;
  }
  for (const auto& c : t->children()) collect_holes_rec(c.node, out, seen);
}

}  // namespace

std::vector<Hole> collect_holes(const TreePtr& t) {
  std::vector<Hole> out;
  std::map<int, bool> seen;
  collect_holes_rec(t, out, seen);
  return out;
}

namespace {

TreePtr replace_rec(const TreePtr& cur, const TreeRef& ref, size_t depth,
                    const std::vector<TreePtr>& forest) {
  int idx = ref.path[depth];
  if (idx < 0 || static_cast<size_t>(idx) >= cur->children().size())
    throw InvariantError("replace_at: reference does not resolve");
  std::vector<Child> kids;
  kids.reserve(cur->children().size() + forest.size());
  for (size_t i = 0; i < cur->children().size(); ++i) {
    const Child& c = cur->children()[i];
    if (static_cast<int>(i) != idx) {
      kids.push_back(c);
      continue;
    }
    if (depth + 1 < ref.path.size()) {
      kids.push_back(
          Child{c.location, replace_rec(c.node, ref, depth + 1, forest)});
    } else {
      for (const auto& repl : forest) kids.push_back(Child{c.location, repl});
    }
  }
  return Tree::make(cur->label(), cur->value(), std::move(kids), cur->span());
}

}  // namespace

TreePtr replace_at(const TreePtr& root, const TreeRef& ref,
                   const std::vector<TreePtr>& forest) {
  if (ref.path.empty()) {
    if (forest.size() != 1)
      throw InvariantError("replace_at: root replacement must be one tree");
    return forest[0];
  }
  return replace_rec(root, ref, 0, forest);
}

size_t structural_hash(const TreePtr& t) {
  size_t h = 0;
  auto mix = [&h](size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  if (t->is_hole()) {
    mix(0x484f4c45);  // tag
    mix(std::hash<int>{}(t->hole().index));
    mix(std::hash<std::string>{}(t->hole().label.value_or("?")));
    mix(t->hole().error_variable ? 1 : 0);
    return h;
  }
  mix(std::hash<std::string>{}(t->label()));
  mix(std::hash<std::string>{}(t->value()));
  for (const auto& c : t->children()) {
    mix(std::hash<std::string>{}(c.location));
    mix(structural_hash(c.node));
  }
  return h;
}

int tree_height(const TreePtr& t) {
  int h = 0;
  for (const auto& c : t->children()) h = std::max(h, tree_height(c.node));
  return h + 1;
}

namespace {

void term_rec(const TreePtr& t, std::ostringstream& os) {
  if (t->is_hole()) {
    const Hole& h = t->hole();
    os << "h" << h.index << ":" << h.label.value_or("?");
    if (h.error_variable) os << "!";
    return;
  }
  os << t->label();
  if (!t->value().empty()) os << ":" << t->value();
  if (!t->children().empty()) {
    os << "(";
    for (size_t i = 0; i < t->children().size(); ++i) {
      if (i) os << ", ";
      term_rec(t->children()[i].node, os);
    }
    os << ")";
  }
}

}  // namespace

std::string to_term_string(const TreePtr& t) {
  std::ostringstream os;
  term_rec(t, os);
  return os.str();
}

}  // namespace fixpat
