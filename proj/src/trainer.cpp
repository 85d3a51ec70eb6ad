#include "tbsa/trainer.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "json_util.hpp"
#include "tbsa/error.hpp"
#include "tbsa/graph.hpp"

namespace tbsa {
namespace {

// sub-stream salts off the model seed (weight init uses 2)
constexpr std::uint64_t kSaltShuffle = 3;
constexpr std::uint64_t kSaltDropout = 4;
constexpr std::uint64_t kSaltGradCheck = 5;

struct SlotView {
  std::vector<std::string> names;
  std::vector<Tensor*> values;
  std::vector<Tensor*> grads;
};

SlotView collect(ModelParams& p, ModelParams& g) {
  SlotView v;
  visit_params(p, [&](const std::string& n, Tensor& t) {
    v.names.push_back(n);
    v.values.push_back(&t);
  });
  visit_params(g, [&](const std::string&, Tensor& t) { v.grads.push_back(&t); });
  return v;
}

std::vector<ParamSlot> adam_slots(const SlotView& v, bool transition_trainable) {
  std::vector<ParamSlot> slots;
  for (std::size_t i = 0; i < v.names.size(); ++i) {
    if (!transition_trainable && v.names[i] == "transition_logits") continue;
    slots.push_back({v.values[i], v.grads[i]});
  }
  return slots;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(lr0 > 0.0)) throw std::invalid_argument("lr0 must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("adam betas must be in [0,1)");
  }
  if (decay < 0.0) throw std::invalid_argument("decay must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (clip_norm < 0.0) throw std::invalid_argument("clip_norm must be >= 0");
}

double lr_at(std::size_t epoch, const TrainConfig& cfg) {
  return cfg.lr0 / (1.0 + cfg.decay * static_cast<double>(epoch));
}

TrainingExample make_example(const Sentence& s, const Vocabulary& vocab,
                             const OpinionLexicon& lexicon, const ModelConfig& cfg) {
  TrainingExample ex;
  ex.id = s.id;
  ex.ids.reserve(s.tokens.size());
  for (const std::string& tok : s.tokens) ex.ids.push_back(vocab.lookup(tok));
  ex.gold_boundary = encode_boundary(s.tokens.size(), s.spans);
  ex.gold_unified = encode_unified(s.tokens.size(), s.spans);
  if (cfg.use_oe) ex.oe_labels = generate_oe_labels(s, lexicon, cfg.window);
  return ex;
}

TrainHistory train(Model& model, const std::vector<Sentence>& train_set,
                   const std::vector<Sentence>& dev_set, const OpinionLexicon& lexicon,
                   const TrainConfig& cfg) {
  cfg.validate();
  model.config.validate();
  if (train_set.empty() || dev_set.empty()) {
    throw DataError("training requires non-empty train and dev sets");
  }
  if (model.config.use_oe && lexicon.words.empty()) {
    throw DataError("opinion head enabled but the lexicon is empty");
  }

  std::vector<TrainingExample> examples;
  examples.reserve(train_set.size());
  for (const Sentence& s : train_set) {
    examples.push_back(make_example(s, model.vocab, lexicon, model.config));
  }

  ModelParams grads = ModelParams::zeros_like(model.params);
  const SlotView view = collect(model.params, grads);
  std::vector<ParamSlot> slots = adam_slots(view, model.params.transition.trainable);
  Adam adam(slots, AdamConfig{cfg.beta1, cfg.beta2, 1e-8});

  Rng shuffle_rng(derive_seed(model.config.seed, kSaltShuffle));
  Rng dropout_rng(derive_seed(model.config.seed, kSaltDropout));

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);

  TrainHistory history;
  ModelParams best_params = model.params;
  double best_f1 = -1.0;

  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    const double lr = lr_at(e, cfg);
    shuffle_rng.shuffle(order);
    double sum_boundary = 0.0, sum_unified = 0.0, sum_opinion = 0.0;
    std::size_t in_batch = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const TrainingExample& ex = examples[order[k]];
      Graph g;
      BoundVars bv = bind_params(g, model.params, grads);
      ForwardVars fv = build_forward(g, bv, model.config, ex.ids, true, dropout_rng);
      LossVars lv =
          build_loss(g, fv, ex.gold_boundary, ex.gold_unified, ex.oe_labels, model.config);
      const double total = g.value(lv.total)[0];
      if (!std::isfinite(total)) {
        throw NumericError("non-finite loss at sentence " + ex.id + ", epoch " +
                           std::to_string(e + 1));
      }
      sum_unified += g.value(lv.unified)[0];
      sum_boundary += g.value(lv.boundary)[0];
      if (lv.has_opinion) sum_opinion += g.value(lv.opinion)[0];
      g.backward(lv.total);
      ++in_batch;
      if (in_batch == cfg.batch_size || k + 1 == order.size()) {
        if (cfg.clip_norm > 0.0) clip_global_norm(slots, cfg.clip_norm);
        adam.step(lr);
        adam.zero_grads();
        in_batch = 0;
      }
    }

    const CorpusEval ev = evaluate_corpus(model, dev_set);
    EpochRecord rec;
    rec.epoch = e + 1;
    const auto n = static_cast<double>(examples.size());
    rec.loss_boundary = sum_boundary / n;
    rec.loss_unified = sum_unified / n;
    rec.loss_opinion = sum_opinion / n;
    rec.dev_precision = ev.unified.precision;
    rec.dev_recall = ev.unified.recall;
    rec.dev_f1 = ev.unified.f1;
    rec.lr = lr;
    history.epochs.push_back(rec);
    if (rec.dev_f1 > best_f1) {
      best_f1 = rec.dev_f1;
      history.best_epoch = e;
      best_params = model.params;
    }
  }
  model.params = std::move(best_params);
  return history;
}

void write_history_jsonl(const TrainHistory& history, const ModelConfig& mcfg,
                         const TrainConfig& tcfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write history: " + path);
  out << nlohmann::json{{"config",
                         {{"model", to_json(mcfg)}, {"train", to_json(tcfg)}}}}
             .dump()
      << "\n";
  for (const EpochRecord& r : history.epochs) {
    out << nlohmann::json{{"epoch", r.epoch},
                          {"loss_boundary", r.loss_boundary},
                          {"loss_unified", r.loss_unified},
                          {"loss_opinion", r.loss_opinion},
                          {"dev_precision", r.dev_precision},
                          {"dev_recall", r.dev_recall},
                          {"dev_f1", r.dev_f1},
                          {"lr", r.lr}}
               .dump()
        << "\n";
  }
}

LossValues loss_value(const ModelParams& params, const ModelConfig& cfg,
                      const TrainingExample& ex, bool training, Rng& rng) {
  Graph g;
  BoundVars bv = bind_params(g, params);
  ForwardVars fv = build_forward(g, bv, cfg, ex.ids, training, rng);
  LossVars lv = build_loss(g, fv, ex.gold_boundary, ex.gold_unified, ex.oe_labels, cfg);
  LossValues out;
  out.total = g.value(lv.total)[0];
  out.boundary = g.value(lv.boundary)[0];
  out.unified = g.value(lv.unified)[0];
  if (lv.has_opinion) out.opinion = g.value(lv.opinion)[0];
  return out;
}

ModelParams model_gradients(const Model& model, const TrainingExample& ex,
                            std::uint64_t mask_seed) {
  ModelParams grads = ModelParams::zeros_like(model.params);
  Graph g;
  BoundVars bv = bind_params(g, model.params, grads);
  Rng rng(mask_seed);
  ForwardVars fv = build_forward(g, bv, model.config, ex.ids, true, rng);
  LossVars lv = build_loss(g, fv, ex.gold_boundary, ex.gold_unified, ex.oe_labels, model.config);
  g.backward(lv.total);
  return grads;
}

ModelParams fd_gradients(Model& model, const TrainingExample& ex, std::uint64_t mask_seed,
                         double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd step must be > 0");
  ModelParams numeric = ModelParams::zeros_like(model.params);
  const SlotView view = collect(model.params, numeric);
  for (std::size_t i = 0; i < view.names.size(); ++i) {
    if (!model.params.transition.trainable && view.names[i] == "transition_logits") continue;
    Tensor& w = *view.values[i];
    Tensor& out = *view.grads[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double orig = w[j];
      w[j] = orig + step;
      Rng up_rng(mask_seed);
      const double up = loss_value(model.params, model.config, ex, true, up_rng).total;
      w[j] = orig - step;
      Rng dn_rng(mask_seed);
      const double dn = loss_value(model.params, model.config, ex, true, dn_rng).total;
      w[j] = orig;
      out[j] = (up - dn) / (2.0 * step);
    }
  }
  return numeric;
}

GradCheckReport compare_gradients(const ModelParams& analytic, const ModelParams& numeric,
                                  double tolerance) {
  std::vector<std::string> names;
  std::vector<const Tensor*> a, n;
  visit_params(analytic, [&](const std::string& nm, const Tensor& t) {
    names.push_back(nm);
    a.push_back(&t);
  });
  visit_params(numeric, [&](const std::string&, const Tensor& t) { n.push_back(&t); });

  GradCheckReport report;
  report.tolerance = tolerance;
  for (std::size_t i = 0; i < names.size(); ++i) {
    GradCheckGroup grp;
    grp.name = names[i];
    for (std::size_t j = 0; j < a[i]->size(); ++j) {
      const double av = (*a[i])[j];
      const double nv = (*n[i])[j];
      const double mag = std::max(std::fabs(av), std::fabs(nv));
      if (mag < 1e-6) continue;  // both effectively zero
      grp.max_rel_error = std::max(grp.max_rel_error, std::fabs(av - nv) / mag);
    }
    report.max_rel_error = std::max(report.max_rel_error, grp.max_rel_error);
    report.groups.push_back(std::move(grp));
  }
  report.pass = report.max_rel_error < tolerance;
  return report;
}

GradCheckReport grad_check(Model& model, const Sentence& sentence, const OpinionLexicon& lexicon,
                           double tolerance) {
  TrainingExample ex = make_example(sentence, model.vocab, lexicon, model.config);
  const std::uint64_t mask_seed = derive_seed(model.config.seed, kSaltGradCheck);
  ModelParams analytic = model_gradients(model, ex, mask_seed);
  ModelParams numeric = fd_gradients(model, ex, mask_seed);
  return compare_gradients(analytic, numeric, tolerance);
}

}  // namespace tbsa
