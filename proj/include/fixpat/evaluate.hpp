#pragma once

#include <string>
#include <vector>

#include "fixpat/corpus.hpp"

namespace fixpat {

struct EvalOptions {
  int folds = 10;
  int top_k = 5;
  unsigned seed = 1;
  double min_support = 0.01;
};

struct PairOutcome {
  std::string name;
  int fold = 0;
  int hit_at = 0;  // 1-based rank of the exact-match prediction, 0 = miss
};

struct FoldStats {
  int pairs = 0;
  std::vector<int> hits;  // hits[k] = pairs matched within top-(k+1)
};

struct EvalReport {
  int folds = 0;
  int top_k = 0;
  std::vector<FoldStats> per_fold;
  std::vector<PairOutcome> pairs;
  // aggregate accuracy at 1..top_k over all pairs
  std::vector<double> accuracy;
};

// Strict held-out 10-fold protocol: pairs are shuffled by the seed,
// assigned round-robin, and each fold is predicted with patterns learned
// from the other folds only. A hit is a predicted text that equals the
// human after file, ignoring empty lines.
EvalReport evaluate_corpus(const std::vector<CorpusPair>& pairs,
                           const EvalOptions& opts);

std::string eval_report_json(const EvalReport& report);

}  // namespace fixpat
