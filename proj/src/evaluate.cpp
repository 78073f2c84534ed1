#include "fixpat/evaluate.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <json.hpp>

#include "fixpat/engine.hpp"
#include "fixpat/error.hpp"
#include "fixpat/textdiff.hpp"

namespace fixpat {

EvalReport evaluate_corpus(const std::vector<CorpusPair>& pairs,
                           const EvalOptions& opts) {
  if (opts.folds < 1) throw UsageError("folds must be >= 1");
  if (opts.top_k < 1) throw UsageError("top must be >= 1");
  if (static_cast<size_t>(opts.folds) > pairs.size())
    throw UsageError("more folds than corpus pairs");

  std::vector<int> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937 rng(opts.seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::vector<int>> folds(opts.folds);
  for (size_t i = 0; i < order.size(); ++i)
    folds[i % opts.folds].push_back(order[i]);

  EvalReport report;
  report.folds = opts.folds;
  report.top_k = opts.top_k;
  report.per_fold.resize(opts.folds);

  for (int f = 0; f < opts.folds; ++f) {
    std::vector<CorpusPair> train;
    for (int g = 0; g < opts.folds; ++g) {
      if (g == f) continue;
      for (int idx : folds[g]) train.push_back(pairs[idx]);
    }
    PatternSet patterns;
    bool trained = false;
    if (!train.empty()) {
      patterns = learn_from_pairs(train, opts.min_support);
      trained = true;
    }
    FoldStats& stats = report.per_fold[f];
    stats.hits.assign(opts.top_k, 0);
    for (int idx : folds[f]) {
      const CorpusPair& p = pairs[idx];
      ++stats.pairs;
      PairOutcome outcome;
      outcome.name = p.name;
      outcome.fold = f;
      if (trained) {
        std::vector<FixCandidate> candidates =
            enumerate_candidates(patterns, p.before, p.bug);
        rank_candidates(candidates);
        int limit = std::min<int>(opts.top_k,
                                  static_cast<int>(candidates.size()));
        for (int k = 0; k < limit; ++k) {
          if (equal_ignoring_blank_lines(candidates[k].patched_text,
                                         p.after.text)) {
            outcome.hit_at = k + 1;
            break;
          }
        }
      }
      if (outcome.hit_at > 0)
        for (int k = outcome.hit_at - 1; k < opts.top_k; ++k) ++stats.hits[k];
      report.pairs.push_back(std::move(outcome));
    }
  }

  report.accuracy.assign(opts.top_k, 0.0);
  int total = static_cast<int>(pairs.size());
  for (int k = 0; k < opts.top_k; ++k) {
    int hits = 0;
    for (const FoldStats& s : report.per_fold) hits += s.hits[k];
    report.accuracy[k] = total > 0 ? static_cast<double>(hits) / total : 0.0;
  }
  return report;
}

std::string eval_report_json(const EvalReport& report) {
  nlohmann::json j;
  j["folds"] = report.folds;
  j["topK"] = report.top_k;
  nlohmann::json per_fold = nlohmann::json::array();
  for (size_t f = 0; f < report.per_fold.size(); ++f) {
    const FoldStats& s = report.per_fold[f];
    nlohmann::json fj;
    fj["fold"] = f;
    fj["pairs"] = s.pairs;
    nlohmann::json acc = nlohmann::json::array();
    for (int k = 0; k < report.top_k; ++k)
      acc.push_back(s.pairs > 0 ? static_cast<double>(s.hits[k]) / s.pairs
                                : 0.0);
    fj["accuracy"] = acc;
    per_fold.push_back(fj);
  }
  j["perFold"] = per_fold;
  nlohmann::json acc = nlohmann::json::array();
  for (double a : report.accuracy) acc.push_back(a);
  j["accuracy"] = acc;
  nlohmann::json pairs = nlohmann::json::array();
  for (const PairOutcome& p : report.pairs) {
    pairs.push_back(nlohmann::json{{"name", p.name},
                                   {"fold", p.fold},
                                   {"hitAt", p.hit_at > 0
                                                 ? nlohmann::json(p.hit_at)
                                                 : nlohmann::json(nullptr)}});
  }
  j["pairs"] = pairs;
  return j.dump(2);
}

}  // namespace fixpat
