#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "fixpat/corpus.hpp"
#include "fixpat/engine.hpp"
#include "fixpat/error.hpp"
#include "fixpat/evaluate.hpp"
#include "fixpat/lint.hpp"
#include "fixpat/textdiff.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitNoFix = 3;

int cmd_learn(const std::string& corpus_dir, const std::string& out_file,
              double min_support) {
  std::vector<fixpat::CorpusPair> pairs = fixpat::load_corpus(corpus_dir);
  fixpat::LearnSummary summary;
  fixpat::PatternSet set =
      fixpat::learn_from_pairs(pairs, min_support, &summary);
  fixpat::write_file_atomic(out_file, fixpat::serialize_pattern_set(set));
  nlohmann::json j{{"pairs", summary.pairs},
                   {"concreteEdits", summary.concrete_edits},
                   {"patternsKept", summary.patterns_kept},
                   {"out", out_file}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_predict(const std::string& patterns_file, const std::string& src_file,
                const std::string& bug_file, int top_k, bool validate,
                const std::string& config_file) {
  fixpat::PatternSet patterns =
      fixpat::parse_pattern_set(fixpat::read_file(patterns_file));
  fixpat::SourceFile file =
      fixpat::parse_source_file(src_file, fixpat::read_file(src_file));
  fixpat::BugReport bug =
      fixpat::parse_bug_report(fixpat::read_file(bug_file));
  if (bug.line > static_cast<int>(fixpat::split_lines(file.text).size()) + 1)
    throw fixpat::ParseError("bug line " + std::to_string(bug.line) +
                             " is outside " + src_file);

  std::vector<fixpat::FixCandidate> candidates =
      fixpat::enumerate_candidates(patterns, file, bug);
  fixpat::rank_candidates(candidates);

  std::optional<bool> validated;
  if (validate && !candidates.empty()) {
    std::set<std::string> nullable;
    if (!config_file.empty())
      nullable = fixpat::parse_lint_config(fixpat::read_file(config_file));
    else if (bug.variable)
      nullable.insert(*bug.variable);
    validated = fixpat::validate_fix(candidates.front(), file, bug, nullable);
  }
  std::cout << fixpat::prediction_json(candidates, file, top_k, validated)
            << "\n";
  return candidates.empty() ? kExitNoFix : 0;
}

int cmd_evaluate(const std::string& corpus_dir, int folds, int top_k,
                 unsigned seed, double min_support) {
  std::vector<fixpat::CorpusPair> pairs = fixpat::load_corpus(corpus_dir);
  fixpat::EvalOptions opts;
  opts.folds = folds;
  opts.top_k = top_k;
  opts.seed = seed;
  opts.min_support = min_support;
  fixpat::EvalReport report = fixpat::evaluate_corpus(pairs, opts);
  std::cout << fixpat::eval_report_json(report) << "\n";
  return 0;
}

int cmd_lint(const std::string& src_file, const std::string& config_file) {
  fixpat::SourceFile file =
      fixpat::parse_source_file(src_file, fixpat::read_file(src_file));
  std::set<std::string> nullable =
      fixpat::parse_lint_config(fixpat::read_file(config_file));
  std::cout << fixpat::reports_json(fixpat::analyze(file, nullable)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learns tree-edit fix patterns from example fixes and "
               "predicts ranked, validated patches for new bug reports"};
  app.require_subcommand(1);

  std::string corpus_dir, out_file, patterns_file, src_file, bug_file,
      config_file;
  double min_support = 0.01;
  int top_k = 5;
  int folds = 10;
  unsigned seed = 1;
  bool validate = false;

  CLI::App* learn = app.add_subcommand("learn", "Mine fix patterns from a corpus");
  learn->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  learn->add_option("--out", out_file, "Pattern set output file")->required();
  learn->add_option("--min-support", min_support,
                    "Minimal training-set share of kept patterns");

  CLI::App* predict =
      app.add_subcommand("predict", "Rank fix candidates for a bug report");
  predict->add_option("--patterns", patterns_file, "Pattern set file")
      ->required();
  predict->add_option("--file", src_file, "Source file to fix")->required();
  predict->add_option("--bug", bug_file, "Bug report JSON")->required();
  predict->add_option("--top", top_k, "Number of candidates to emit");
  predict->add_flag("--validate", validate,
                    "Re-run the analyzer on the top candidate");
  predict->add_option("--config", config_file, "Analyzer config JSON");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Cross-validate prediction accuracy");
  evaluate->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  evaluate->add_option("--folds", folds, "Number of folds");
  evaluate->add_option("--top", top_k, "Top-k accuracy to report");
  evaluate->add_option("--seed", seed, "Shuffle seed");
  evaluate->add_option("--min-support", min_support,
                       "Minimal training-set share of kept patterns");

  CLI::App* lint = app.add_subcommand("lint", "Report unguarded dereferences");
  lint->add_option("--file", src_file, "Source file")->required();
  lint->add_option("--config", config_file, "Analyzer config JSON")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (learn->parsed()) return cmd_learn(corpus_dir, out_file, min_support);
    if (predict->parsed())
      return cmd_predict(patterns_file, src_file, bug_file, top_k, validate,
                         config_file);
    if (evaluate->parsed())
      return cmd_evaluate(corpus_dir, folds, top_k, seed, min_support);
    if (lint->parsed()) return cmd_lint(src_file, config_file);
  } catch (const fixpat::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fixpat::ParseError& e) {
    std::cerr << "parse error: " << e.what();
    if (e.line >= 0) std::cerr << " at line " << e.line << ", column " << e.column;
    if (e.byte_offset >= 0) std::cerr << " at byte " << e.byte_offset;
    std::cerr << "\n";
    return kExitParse;
  } catch (const fixpat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
