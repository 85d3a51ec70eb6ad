#include "tbsa/evaluator.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "tbsa/trainer.hpp"

namespace tbsa {
namespace {

// (start, end, sentiment-or-none); -1 marks a sentiment-free span
using SpanKey = std::tuple<std::size_t, std::size_t, int>;

SpanKey key_of(const TargetSpan& s) {
  return {s.start, s.end, s.sentiment ? static_cast<int>(*s.sentiment) : -1};
}

PRF match_keys(const std::vector<SpanKey>& gold, const std::vector<SpanKey>& pred) {
  PRF r;
  r.n_gold = gold.size();
  r.n_pred = pred.size();
  std::map<SpanKey, std::size_t> open;
  for (const SpanKey& k : gold) ++open[k];
  for (const SpanKey& k : pred) {
    auto it = open.find(k);
    if (it != open.end() && it->second > 0) {
      --it->second;
      ++r.tp;
    }
  }
  return r;
}

std::vector<SpanKey> strip_sentiment(const std::vector<TargetSpan>& spans) {
  std::vector<SpanKey> keys;
  keys.reserve(spans.size());
  for (const TargetSpan& s : spans) keys.emplace_back(s.start, s.end, -1);
  return keys;
}

}  // namespace

void PRF::add(const PRF& o) {
  tp += o.tp;
  n_pred += o.n_pred;
  n_gold += o.n_gold;
}

void PRF::finalize() {
  precision = n_pred ? static_cast<double>(tp) / static_cast<double>(n_pred) : 0.0;
  recall = n_gold ? static_cast<double>(tp) / static_cast<double>(n_gold) : 0.0;
  f1 = (precision + recall > 0.0) ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

PRF exact_match(const std::vector<TargetSpan>& gold, const std::vector<TargetSpan>& pred) {
  std::vector<SpanKey> gk, pk;
  gk.reserve(gold.size());
  pk.reserve(pred.size());
  for (const TargetSpan& s : gold) gk.push_back(key_of(s));
  for (const TargetSpan& s : pred) pk.push_back(key_of(s));
  return match_keys(gk, pk);
}

CorpusEval evaluate_corpus(const Model& model, const std::vector<Sentence>& sentences) {
  CorpusEval ev;
  for (const Sentence& s : sentences) {
    Prediction pred = predict(model, s.tokens);
    ev.unified.add(exact_match(s.spans, pred.spans));
    ev.boundary.add(
        match_keys(strip_sentiment(s.spans), strip_sentiment(pred.boundary_spans)));
  }
  ev.unified.finalize();
  ev.boundary.finalize();
  return ev;
}

std::vector<AblationRow> ablation_table(const std::vector<Sentence>& train_set,
                                        const std::vector<Sentence>& dev,
                                        const std::vector<Sentence>& test,
                                        const OpinionLexicon& lexicon,
                                        const EmbeddingTable& table, const ModelConfig& base,
                                        const TrainConfig& tcfg) {
  struct Variant {
    const char* name;
    bool bg, sc, oe;
  };
  const Variant variants[] = {
      {"base", false, false, false}, {"base+bg", true, false, false},
      {"base+bg+sc", true, true, false}, {"base+bg+oe", true, false, true},
      {"full", true, true, true},
  };
  std::vector<AblationRow> rows;
  for (const Variant& v : variants) {
    AblationRow row;
    row.name = v.name;
    row.config = base;
    row.config.use_bg = v.bg;
    row.config.use_sc = v.sc;
    row.config.use_oe = v.oe;
    Model model = make_model(row.config, table);
    TrainHistory hist = train(model, train_set, dev, lexicon, tcfg);
    row.dev_f1 = hist.epochs[hist.best_epoch].dev_f1;
    row.test = evaluate_corpus(model, test).unified;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepPoint> sweep(const std::vector<Sentence>& train_set,
                              const std::vector<Sentence>& dev, const OpinionLexicon& lexicon,
                              const EmbeddingTable& table, const ModelConfig& base,
                              const TrainConfig& tcfg, const std::vector<double>& eps_values,
                              const std::vector<std::size_t>& s_values) {
  std::vector<double> eps = eps_values;
  std::vector<std::size_t> wins = s_values;
  std::sort(eps.begin(), eps.end());
  std::sort(wins.begin(), wins.end());
  std::vector<SweepPoint> grid;
  for (double e : eps) {
    for (std::size_t s : wins) {
      ModelConfig cfg = base;
      cfg.epsilon = e;
      cfg.window = s;
      Model model = make_model(cfg, table);
      TrainHistory hist = train(model, train_set, dev, lexicon, tcfg);
      grid.push_back({e, s, hist.epochs[hist.best_epoch].dev_f1});
    }
  }
  return grid;
}

}  // namespace tbsa
