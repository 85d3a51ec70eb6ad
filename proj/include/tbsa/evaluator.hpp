#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tbsa/corpus.hpp"
#include "tbsa/model.hpp"
#include "tbsa/tags.hpp"

namespace tbsa {

struct TrainConfig;  // trainer.hpp

// Micro-averaged exact-match precision/recall/F1. Counts accumulate across
// sentences; finalize() computes the ratios with 0-for-empty conventions.
struct PRF {
  std::size_t tp = 0;
  std::size_t n_pred = 0;
  std::size_t n_gold = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  void add(const PRF& o);
  void finalize();
};

// Span counts for one sentence. A prediction is a true positive iff its
// (start, end, sentiment) triple equals a gold span's; every gold span can
// absorb at most one prediction.
PRF exact_match(const std::vector<TargetSpan>& gold, const std::vector<TargetSpan>& pred);

struct CorpusEval {
  PRF unified;   // full task: boundaries and sentiment both exact
  PRF boundary;  // diagnostic: boundary tagger's spans, sentiment ignored
};

CorpusEval evaluate_corpus(const Model& model, const std::vector<Sentence>& sentences);

struct AblationRow {
  std::string name;
  ModelConfig config;
  double dev_f1 = 0.0;  // best dev F1 during training
  PRF test;
};

// Trains {Base, +BG, +BG+SC, +BG+OE, Full} with the base config's seed and
// identical data; reports exact-match PRF on `test`.
std::vector<AblationRow> ablation_table(const std::vector<Sentence>& train,
                                        const std::vector<Sentence>& dev,
                                        const std::vector<Sentence>& test,
                                        const OpinionLexicon& lexicon,
                                        const EmbeddingTable& table, const ModelConfig& base,
                                        const TrainConfig& tcfg);

struct SweepPoint {
  double epsilon = 0.0;
  std::size_t window = 0;
  double dev_f1 = 0.0;
};

// One training run per (epsilon, window) grid point, shared seed; results
// ordered by (epsilon, window).
std::vector<SweepPoint> sweep(const std::vector<Sentence>& train,
                              const std::vector<Sentence>& dev, const OpinionLexicon& lexicon,
                              const EmbeddingTable& table, const ModelConfig& base,
                              const TrainConfig& tcfg, const std::vector<double>& eps_values,
                              const std::vector<std::size_t>& s_values);

}  // namespace tbsa
