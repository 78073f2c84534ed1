#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fixpat/antiunify.hpp"
#include "fixpat/corpus.hpp"
#include "fixpat/engine.hpp"
#include "fixpat/error.hpp"
#include "fixpat/evaluate.hpp"
#include "fixpat/lang.hpp"
#include "fixpat/lint.hpp"

namespace py = pybind11;
using namespace fixpat;

namespace {

BugReport bug_from_args(const std::string& file, int line,
                        const std::optional<std::string>& variable,
                        const std::string& category) {
  BugReport b;
  b.file = file;
  b.line = line;
  b.variable = variable;
  b.category = category;
  return b;
}

std::string learn_dir(const std::string& corpus_dir, double min_support) {
  return serialize_pattern_set(
      learn_from_pairs(load_corpus(corpus_dir), min_support));
}

std::string predict_text(const std::string& patterns_json,
                         const std::string& source, const std::string& path,
                         int line, const std::optional<std::string>& variable,
                         int top_k) {
  PatternSet patterns = parse_pattern_set(patterns_json);
  SourceFile file = parse_source_file(path, source);
  BugReport bug = bug_from_args(path, line, variable, "");
  std::vector<FixCandidate> candidates =
      enumerate_candidates(patterns, file, bug);
  rank_candidates(candidates);
  return prediction_json(candidates, file, top_k, std::nullopt);
}

std::vector<std::string> top_patches(const std::string& patterns_json,
                                     const std::string& source,
                                     const std::string& path, int line,
                                     const std::optional<std::string>& variable,
                                     int top_k) {
  PatternSet patterns = parse_pattern_set(patterns_json);
  SourceFile file = parse_source_file(path, source);
  std::vector<FixCandidate> candidates = enumerate_candidates(
      patterns, file, bug_from_args(path, line, variable, ""));
  rank_candidates(candidates);
  std::vector<std::string> out;
  for (size_t i = 0; i < candidates.size() && i < static_cast<size_t>(top_k);
       ++i)
    out.push_back(candidates[i].patched_text);
  return out;
}

std::string lint_text(const std::string& source, const std::string& path,
                      const std::vector<std::string>& nullable_names) {
  SourceFile file = parse_source_file(path, source);
  std::set<std::string> names(nullable_names.begin(), nullable_names.end());
  return reports_json(analyze(file, names));
}

std::string evaluate_dir(const std::string& corpus_dir, int folds, int top_k,
                         unsigned seed) {
  EvalOptions opts;
  opts.folds = folds;
  opts.top_k = top_k;
  opts.seed = seed;
  return eval_report_json(evaluate_corpus(load_corpus(corpus_dir), opts));
}

}  // namespace

// pybind11 holders require mutable element types; trees are immutable and
// shared, so the binding wraps the shared pointer by value.
struct PyTree {
  TreePtr ptr;
};

PYBIND11_MODULE(_fixpat, m) {
  m.doc() = "Tree-edit fix pattern mining and ranked patch prediction";

  py::register_exception<ParseError>(m, "FixpatParseError");
  py::register_exception<UsageError>(m, "FixpatUsageError");

  py::class_<PyTree>(m, "Tree")
      .def_property_readonly("label",
                             [](const PyTree& t) {
                               return t.ptr->is_hole() ? std::string("?")
                                                       : t.ptr->label();
                             })
      .def_property_readonly(
          "value", [](const PyTree& t) { return t.ptr->value(); })
      .def_property_readonly(
          "is_hole", [](const PyTree& t) { return t.ptr->is_hole(); })
      .def("__repr__",
           [](const PyTree& t) { return to_term_string(t.ptr); })
      .def("__eq__",
           [](const PyTree& a, const py::object& b) {
             return py::isinstance<PyTree>(b) &&
                    structural_equal(a.ptr, b.cast<PyTree>().ptr);
           })
      .def("children",
           [](const PyTree& t) {
             std::vector<std::pair<std::string, PyTree>> out;
             for (const auto& c : t.ptr->children())
               out.push_back({c.location, PyTree{c.node}});
             return out;
           })
      .def("node_count",
           [](const PyTree& t) { return node_count(t.ptr); });

  m.def(
      "parse_source",
      [](const std::string& text) { return PyTree{parse_source(text)}; },
      py::arg("text"), "Parse mini-language source into a tree");
  m.def(
      "print_tree", [](const PyTree& t) { return print_tree(t.ptr); },
      py::arg("tree"), "Render a tree back to source text");
  m.def(
      "parse_tree_json",
      [](const std::string& text) { return PyTree{parse_tree_json(text)}; },
      py::arg("text"));
  m.def(
      "parse_pattern_json",
      [](const std::string& text) { return PyTree{parse_pattern_json(text)}; },
      py::arg("text"));
  m.def(
      "serialize_tree", [](const PyTree& t) { return serialize_tree(t.ptr); },
      py::arg("tree"));
  m.def(
      "pattern_equal",
      [](const PyTree& a, const PyTree& b) {
        return pattern_equal(a.ptr, b.ptr);
      },
      py::arg("a"), py::arg("b"),
      "Structural equality modulo hole renaming");
  m.def(
      "anti_unify",
      [](const PyTree& a, const PyTree& b) {
        return PyTree{anti_unify_trees(a.ptr, b.ptr)};
      },
      py::arg("a"), py::arg("b"),
      "Least general generalization of two tree patterns");
  m.def("learn", &learn_dir, py::arg("corpus_dir"),
        py::arg("min_support") = 0.01,
        "Mine a pattern set from a corpus directory; returns JSON");
  m.def("predict", &predict_text, py::arg("patterns_json"), py::arg("source"),
        py::arg("path") = "input.mj", py::arg("line") = 1,
        py::arg("variable") = std::nullopt, py::arg("top_k") = 5,
        "Rank fix candidates; returns the prediction JSON");
  m.def("top_patches", &top_patches, py::arg("patterns_json"),
        py::arg("source"), py::arg("path") = "input.mj", py::arg("line") = 1,
        py::arg("variable") = std::nullopt, py::arg("top_k") = 5,
        "Patched file texts of the highest ranked candidates");
  m.def("lint", &lint_text, py::arg("source"), py::arg("path") = "input.mj",
        py::arg("nullable_names") = std::vector<std::string>{},
        "Run the null-check analyzer; returns report JSON");
  m.def("evaluate", &evaluate_dir, py::arg("corpus_dir"),
        py::arg("folds") = 10, py::arg("top_k") = 5, py::arg("seed") = 1,
        "Cross-validated accuracy report as JSON");
}
