#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tbsa/corpus.hpp"
#include "tbsa/evaluator.hpp"
#include "tbsa/model.hpp"
#include "tbsa/optim.hpp"

namespace tbsa {

struct TrainConfig {
  std::size_t epochs = 50;
  double lr0 = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.9;
  double decay = 0.05;      // lr_e = lr0 / (1 + decay * e)
  std::size_t batch_size = 1;
  double clip_norm = 0.0;   // max gradient norm; 0 disables clipping

  void validate() const;
};

double lr_at(std::size_t epoch, const TrainConfig& cfg);

// A sentence resolved against the vocabulary and gold tag encodings.
struct TrainingExample {
  std::string id;
  std::vector<std::size_t> ids;
  std::vector<BoundaryTag> gold_boundary;
  std::vector<UnifiedTag> gold_unified;
  std::vector<int> oe_labels;  // empty unless the opinion head is enabled
};

TrainingExample make_example(const Sentence& s, const Vocabulary& vocab,
                             const OpinionLexicon& lexicon, const ModelConfig& cfg);

struct EpochRecord {
  std::size_t epoch = 0;        // 1-based
  double loss_boundary = 0.0;   // per-sentence means over the epoch
  double loss_unified = 0.0;
  double loss_opinion = 0.0;    // 0 when the opinion head is off
  double dev_precision = 0.0;
  double dev_recall = 0.0;
  double dev_f1 = 0.0;
  double lr = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // index into epochs
};

// Trains in place; on return model.params holds the epoch with the best dev
// exact-match F1 (earliest on ties). Throws NumericError with the sentence
// id if the loss goes non-finite.
TrainHistory train(Model& model, const std::vector<Sentence>& train_set,
                   const std::vector<Sentence>& dev_set, const OpinionLexicon& lexicon,
                   const TrainConfig& cfg);

// First line echoes the configs; one record per epoch after that.
void write_history_jsonl(const TrainHistory& history, const ModelConfig& mcfg,
                         const TrainConfig& tcfg, const std::string& path);

struct LossValues {
  double total = 0.0;
  double boundary = 0.0;
  double unified = 0.0;
  double opinion = 0.0;
};

// Forward + loss only. rng supplies the dropout draws, so re-seeding before
// each call replays identical masks (what the finite-difference check needs).
LossValues loss_value(const ModelParams& params, const ModelConfig& cfg,
                      const TrainingExample& ex, bool training, Rng& rng);

// Analytic gradients of the joint loss for one example, dropout masks drawn
// from mask_seed.
ModelParams model_gradients(const Model& model, const TrainingExample& ex,
                            std::uint64_t mask_seed);

// Central finite differences with the same replayed masks.
ModelParams fd_gradients(Model& model, const TrainingExample& ex, std::uint64_t mask_seed,
                         double step = 1e-5);

struct GradCheckGroup {
  std::string name;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckGroup> groups;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Relative error |a-n| / max(|a|,|n|), entries where both magnitudes are
// below 1e-6 counted as agreeing.
GradCheckReport compare_gradients(const ModelParams& analytic, const ModelParams& numeric,
                                  double tolerance);

GradCheckReport grad_check(Model& model, const Sentence& sentence, const OpinionLexicon& lexicon,
                           double tolerance);

}  // namespace tbsa
