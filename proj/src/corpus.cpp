#include "fixpat/corpus.hpp"

#include <algorithm>
#include <filesystem>

#include "fixpat/diff.hpp"
#include "fixpat/error.hpp"

namespace fixpat {

namespace fs = std::filesystem;

std::vector<CorpusPair> load_corpus(const std::string& dir) {
  if (!fs::is_directory(dir))
    throw UsageError("corpus directory not found: " + dir);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::string file = entry.path().filename().string();
    const std::string suffix = ".before.mj";
    if (file.size() > suffix.size() &&
        file.compare(file.size() - suffix.size(), suffix.size(), suffix) == 0)
      names.push_back(file.substr(0, file.size() - suffix.size()));
  }
  std::sort(names.begin(), names.end());
  if (names.empty())
    throw UsageError("corpus directory holds no *.before.mj pairs: " + dir);

  std::vector<CorpusPair> pairs;
  for (const std::string& name : names) {
    fs::path before = fs::path(dir) / (name + ".before.mj");
    fs::path after = fs::path(dir) / (name + ".after.mj");
    fs::path bug = fs::path(dir) / (name + ".bug.json");
    if (!fs::exists(after))
      throw UsageError("missing after file for pair " + name);
    if (!fs::exists(bug))
      throw UsageError("missing bug report for pair " + name);
    CorpusPair p;
    p.name = name;
    p.before = parse_source_file(before.string(), read_file(before.string()));
    p.after = parse_source_file(after.string(), read_file(after.string()));
    p.bug = parse_bug_report(read_file(bug.string()));
    pairs.push_back(std::move(p));
  }
  return pairs;
}

PatternSet learn_from_pairs(const std::vector<CorpusPair>& pairs,
                            double min_support, LearnSummary* summary) {
  if (pairs.empty()) throw UsageError("no training pairs");
  std::vector<EditPattern> edits;
  for (const CorpusPair& p : pairs) {
    std::vector<EditPattern> pair_edits =
        extract_concrete_edits(p.before.tree, p.after.tree, p.bug);
    for (EditPattern& e : pair_edits) edits.push_back(std::move(e));
  }
  if (edits.empty())
    throw UsageError("training pairs contain no concrete edits");
  Dendrogram d = cluster(edits);
  PatternSet set =
      prune_hierarchy(d, static_cast<int>(pairs.size()), min_support);
  if (summary) {
    summary->pairs = static_cast<int>(pairs.size());
    summary->concrete_edits = static_cast<int>(edits.size());
    summary->patterns_kept = static_cast<int>(set.patterns.size());
  }
  return set;
}

}  // namespace fixpat
