#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tbsa/corpus.hpp"
#include "tbsa/graph.hpp"
#include "tbsa/lstm.hpp"
#include "tbsa/rng.hpp"
#include "tbsa/tags.hpp"
#include "tbsa/tensor.hpp"

namespace tbsa {

struct ModelConfig {
  std::size_t embedding_dim = 300;
  std::size_t boundary_hidden = 50;  // concatenated bidirectional width
  std::size_t unified_hidden = 50;
  double epsilon = 0.5;  // cap on the boundary-score share of the mix
  std::size_t window = 3;
  double dropout = 0.5;
  bool use_bg = true;
  bool use_sc = true;
  bool use_oe = true;
  bool transition_trainable = true;
  std::uint64_t seed = 1;

  void validate() const;  // throws std::invalid_argument
};

struct ModelParams {
  Tensor embeddings;  // |V| x d, fine-tuned
  LstmParams bound_fwd, bound_bwd;  // boundary-task BiLSTM
  LstmParams unif_fwd, unif_bwd;    // unified-task BiLSTM
  Tensor w_boundary;  // 5 x boundary_hidden
  Tensor w_unified;   // 13 x unified_hidden
  Tensor w_opinion;   // 2 x boundary_hidden
  Tensor w_gate;      // unified_hidden x unified_hidden
  Tensor b_gate;      // unified_hidden
  TransitionMatrix transition;

  // Draws every tensor in one fixed order from a generator derived from
  // cfg.seed, independent of the component flags, so that two configs
  // differing only in flags start from identical weights.
  static ModelParams init(const ModelConfig& cfg, Tensor embeddings);

  static ModelParams zeros_like(const ModelParams& p);
};

// Canonical enumeration of all parameter tensors; single source of truth
// for optimizer slots, graph binding, and checkpoints. P is ModelParams,
// possibly const.
template <typename P, typename F>
void visit_params(P& p, F&& f) {
  auto lstm = [&](const std::string& prefix, auto& q) {
    f(prefix + ".wx_i", q.wx_i);
    f(prefix + ".wh_i", q.wh_i);
    f(prefix + ".b_i", q.b_i);
    f(prefix + ".wx_f", q.wx_f);
    f(prefix + ".wh_f", q.wh_f);
    f(prefix + ".b_f", q.b_f);
    f(prefix + ".wx_o", q.wx_o);
    f(prefix + ".wh_o", q.wh_o);
    f(prefix + ".b_o", q.b_o);
    f(prefix + ".wx_c", q.wx_c);
    f(prefix + ".wh_c", q.wh_c);
    f(prefix + ".b_c", q.b_c);
  };
  f("embeddings", p.embeddings);
  lstm("lstm_boundary.fwd", p.bound_fwd);
  lstm("lstm_boundary.bwd", p.bound_bwd);
  lstm("lstm_unified.fwd", p.unif_fwd);
  lstm("lstm_unified.bwd", p.unif_bwd);
  f("w_boundary", p.w_boundary);
  f("w_unified", p.w_unified);
  f("w_opinion", p.w_opinion);
  f("w_gate", p.w_gate);
  f("b_gate", p.b_gate);
  f("transition_logits", p.transition.logits);
}

// Graph handles for the bound parameters of one forward pass.
struct BoundVars {
  Var embeddings;
  LstmVars bound_fwd, bound_bwd, unif_fwd, unif_bwd;
  Var w_boundary, w_unified, w_opinion, w_gate, b_gate;
  Var transition;  // realized 5x13 matrix (rows sum to 1, zeros fixed)
};

// Binds every parameter with gradient storage in `grads`. A frozen
// transition matrix is bound without a gradient sink so it never updates.
BoundVars bind_params(Graph& g, const ModelParams& params, ModelParams& grads);

// Forward-only binding: no external gradient storage.
BoundVars bind_params(Graph& g, const ModelParams& params);

// Per-token graph handles produced by one forward build. Sequences for
// disabled components are left empty; z_mixed aliases z_unified when the
// boundary-guidance mix is off, h_tilde aliases h_unified when the
// consistency gate is off.
struct ForwardVars {
  std::vector<Var> h_boundary, h_unified, h_tilde, gate;
  std::vector<Var> z_boundary, z_unified, z_trans, z_mixed, z_opinion;
  std::vector<Var> conf, alpha;  // scalars
};

ForwardVars build_forward(Graph& g, const BoundVars& vars, const ModelConfig& cfg,
                          const std::vector<std::size_t>& token_ids, bool training, Rng& rng);

struct LossVars {
  Var total = 0;
  Var boundary = 0;
  Var unified = 0;
  Var opinion = 0;
  bool has_opinion = false;
};

LossVars build_loss(Graph& g, const ForwardVars& f, const std::vector<BoundaryTag>& gold_boundary,
                    const std::vector<UnifiedTag>& gold_unified,
                    const std::vector<int>& opinion_labels, const ModelConfig& cfg);

// Plain-value snapshot of a forward pass, for inspection and tests.
struct ForwardTrace {
  std::vector<Tensor> h_boundary, h_unified, h_tilde, gate;
  std::vector<Tensor> z_boundary, z_unified, z_trans, z_mixed, z_opinion;
  std::vector<double> conf, alpha;
};

ForwardTrace forward(const std::vector<std::size_t>& token_ids, const ModelParams& params,
                     const ModelConfig& cfg, bool training, Rng& rng);

// --- standalone pieces, shared with the graph path's semantics ---

// c = sum of squared probabilities; alpha = epsilon * c.
std::pair<double, double> boundary_confidence(const Tensor& z_boundary, double epsilon);

// z' = W^T z (rows of W indexed by boundary tag), a probability vector.
Tensor transition_scores(const Tensor& z_boundary, const Tensor& realized);

// alpha * z_trans + (1 - alpha) * z_unified.
Tensor mix_scores(const Tensor& z_trans, const Tensor& z_unified, double alpha);

// Gated carry-over: g_t = sigmoid(W h_t + b); out_1 = h_1,
// out_t = g_t*h_t + (1-g_t)*out_{t-1}. Returns (blended, gates).
std::pair<std::vector<Tensor>, std::vector<Tensor>> sc_gate(const std::vector<Tensor>& hs,
                                                            const Tensor& w_gate,
                                                            const Tensor& b_gate);

struct Model {
  ModelConfig config;
  Vocabulary vocab;
  ModelParams params;
};

Model make_model(const ModelConfig& cfg, const EmbeddingTable& table);

struct Prediction {
  std::vector<UnifiedTag> unified;
  std::vector<BoundaryTag> boundary;
  std::vector<TargetSpan> spans;           // from the unified tags
  std::vector<TargetSpan> boundary_spans;  // sentiment-free, from z^T argmax
};

Prediction predict(const Model& model, const std::vector<std::string>& tokens);

// Checkpoints hold config, vocabulary, and raw tensor bytes; a save/load
// roundtrip is bit-exact.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace tbsa
