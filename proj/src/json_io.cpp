#include "fixpat/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fixpat/error.hpp"

namespace fixpat {

using nlohmann::json;

namespace {

TreePtr decode_node(const json& j, bool allow_holes,
                    std::map<int, Hole>& holes) {
  if (!j.is_object()) throw ParseError("tree node must be a JSON object");
  if (j.contains("hole")) {
    if (!allow_holes)
      throw ParseError("hole node in a document parsed in tree mode");
    const json& h = j.at("hole");
    Hole hole;
    hole.index = h.at("index").get<int>();
    if (hole.index < 0) throw InvariantError("hole index must be >= 0");
    if (h.contains("label") && !h.at("label").is_null())
      hole.label = h.at("label").get<std::string>();
    if (h.contains("errorVariable"))
      hole.error_variable = h.at("errorVariable").get<bool>();
    auto it = holes.find(hole.index);
    if (it == holes.end()) {
      holes[hole.index] = hole;
    } else if (!(it->second == hole)) {
      throw InvariantError("holes with index " + std::to_string(hole.index) +
                           " disagree on label or errorVariable");
    }
    return Tree::make_hole(hole.index, hole.label, hole.error_variable);
  }
  if (!j.contains("label"))
    throw ParseError("tree node missing \"label\" field");
  std::string label = j.at("label").get<std::string>();
  std::string value = j.value("value", std::string());
  std::vector<Child> children;
  if (j.contains("children")) {
    for (const json& c : j.at("children")) {
      children.push_back(Child{c.at("location").get<std::string>(),
                               decode_node(c.at("tree"), allow_holes, holes)});
    }
  }
  std::optional<Span> span;
  if (j.contains("span")) {
    Span s{j.at("span").at("startLine").get<int>(),
           j.at("span").at("endLine").get<int>()};
    if (s.start_line < 1 || s.end_line < s.start_line)
      throw InvariantError("invalid span");
    span = s;
  }
  return Tree::make(std::move(label), std::move(value), std::move(children),
                    span);
}

TreePtr parse_doc(const std::string& text, bool allow_holes) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed tree document: ") + e.what(),
                     static_cast<long>(e.byte));
  }
  std::map<int, Hole> holes;
  return decode_node(j, allow_holes, holes);
}

json encode_node(const TreePtr& t) {
  json j = json::object();
  if (t->is_hole()) {
    const Hole& h = t->hole();
    json hj = json::object();
    hj["index"] = h.index;
    hj["label"] = h.label ? json(*h.label) : json(nullptr);
    hj["errorVariable"] = h.error_variable;
    j["hole"] = hj;
    return j;
  }
  j["label"] = t->label();
  j["value"] = t->value();
  json kids = json::array();
  for (const auto& c : t->children()) {
    kids.push_back(json{{"location", c.location}, {"tree", encode_node(c.node)}});
  }
  j["children"] = kids;
  if (t->span()) {
    j["span"] = json{{"startLine", t->span()->start_line},
                     {"endLine", t->span()->end_line}};
  }
  return j;
}

}  // namespace

TreePtr parse_tree_json(const std::string& text) {
  return parse_doc(text, false);
}

TreePtr parse_pattern_json(const std::string& text) {
  return parse_doc(text, true);
}

std::string serialize_tree(const TreePtr& t) { return encode_node(t).dump(); }

BugReport parse_bug_report(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed bug report: ") + e.what(),
                     static_cast<long>(e.byte));
  }
  BugReport bug;
  bug.file = j.value("file", std::string());
  bug.line = j.at("line").get<int>();
  if (bug.line < 1) throw InvariantError("bug line must be >= 1");
  if (j.contains("variable") && !j.at("variable").is_null())
    bug.variable = j.at("variable").get<std::string>();
  bug.category = j.value("category", std::string());
  return bug;
}

std::string serialize_bug_report(const BugReport& bug) {
  json j = json::object();
  j["file"] = bug.file;
  j["line"] = bug.line;
  j["variable"] = bug.variable ? json(*bug.variable) : json(nullptr);
  j["category"] = bug.category;
  return j.dump();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + tmp);
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error("cannot rename " + tmp + " to " + path);
}

}  // namespace fixpat
