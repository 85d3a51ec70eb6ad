#include "tbsa/model.hpp"

#include <stdexcept>
#include <utility>

#include "tbsa/error.hpp"

namespace tbsa {

void ModelConfig::validate() const {
  if (embedding_dim < 1) throw std::invalid_argument("embedding_dim must be >= 1");
  if (boundary_hidden < 2 || boundary_hidden % 2 != 0) {
    throw std::invalid_argument("boundary_hidden must be even and >= 2");
  }
  if (unified_hidden < 2 || unified_hidden % 2 != 0) {
    throw std::invalid_argument("unified_hidden must be even and >= 2");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must be in [0,1]");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must be in [0,1)");
}

ModelParams ModelParams::init(const ModelConfig& cfg, Tensor embeddings) {
  cfg.validate();
  if (embeddings.rank() != 2 || embeddings.cols() != cfg.embedding_dim) {
    throw std::invalid_argument("init: embedding matrix does not match embedding_dim");
  }
  Rng rng(derive_seed(cfg.seed, 2));
  ModelParams p;
  p.embeddings = std::move(embeddings);
  const std::size_t bh = cfg.boundary_hidden / 2;
  const std::size_t uh = cfg.unified_hidden / 2;
  p.bound_fwd = LstmParams::glorot(cfg.embedding_dim, bh, rng);
  p.bound_bwd = LstmParams::glorot(cfg.embedding_dim, bh, rng);
  p.unif_fwd = LstmParams::glorot(cfg.boundary_hidden, uh, rng);
  p.unif_bwd = LstmParams::glorot(cfg.boundary_hidden, uh, rng);
  p.w_boundary = uniform_matrix(kNumBoundaryTags, cfg.boundary_hidden, -0.2, 0.2, rng);
  p.w_unified = uniform_matrix(kNumUnifiedTags, cfg.unified_hidden, -0.2, 0.2, rng);
  p.w_opinion = uniform_matrix(2, cfg.boundary_hidden, -0.2, 0.2, rng);
  p.w_gate = uniform_matrix(cfg.unified_hidden, cfg.unified_hidden, -0.2, 0.2, rng);
  p.b_gate = Tensor({cfg.unified_hidden});
  p.transition = TransitionMatrix::initial(cfg.transition_trainable);
  return p;
}

ModelParams ModelParams::zeros_like(const ModelParams& p) {
  ModelParams z = p;
  visit_params(z, [](const std::string&, Tensor& t) { t.fill(0.0); });
  return z;
}

namespace {

BoundVars bind_common(Graph& g, const ModelParams& p, ModelParams* grads) {
  auto bind = [&](const Tensor& value, Tensor* grad) { return g.param(value, grad); };
  auto lstm = [&](const LstmParams& q, LstmParams* qg) {
    LstmVars v;
    v.wx_i = bind(q.wx_i, qg ? &qg->wx_i : nullptr);
    v.wh_i = bind(q.wh_i, qg ? &qg->wh_i : nullptr);
    v.b_i = bind(q.b_i, qg ? &qg->b_i : nullptr);
    v.wx_f = bind(q.wx_f, qg ? &qg->wx_f : nullptr);
    v.wh_f = bind(q.wh_f, qg ? &qg->wh_f : nullptr);
    v.b_f = bind(q.b_f, qg ? &qg->b_f : nullptr);
    v.wx_o = bind(q.wx_o, qg ? &qg->wx_o : nullptr);
    v.wh_o = bind(q.wh_o, qg ? &qg->wh_o : nullptr);
    v.b_o = bind(q.b_o, qg ? &qg->b_o : nullptr);
    v.wx_c = bind(q.wx_c, qg ? &qg->wx_c : nullptr);
    v.wh_c = bind(q.wh_c, qg ? &qg->wh_c : nullptr);
    v.b_c = bind(q.b_c, qg ? &qg->b_c : nullptr);
    return v;
  };
  BoundVars v;
  v.embeddings = bind(p.embeddings, grads ? &grads->embeddings : nullptr);
  v.bound_fwd = lstm(p.bound_fwd, grads ? &grads->bound_fwd : nullptr);
  v.bound_bwd = lstm(p.bound_bwd, grads ? &grads->bound_bwd : nullptr);
  v.unif_fwd = lstm(p.unif_fwd, grads ? &grads->unif_fwd : nullptr);
  v.unif_bwd = lstm(p.unif_bwd, grads ? &grads->unif_bwd : nullptr);
  v.w_boundary = bind(p.w_boundary, grads ? &grads->w_boundary : nullptr);
  v.w_unified = bind(p.w_unified, grads ? &grads->w_unified : nullptr);
  v.w_opinion = bind(p.w_opinion, grads ? &grads->w_opinion : nullptr);
  v.w_gate = bind(p.w_gate, grads ? &grads->w_gate : nullptr);
  v.b_gate = bind(p.b_gate, grads ? &grads->b_gate : nullptr);
  Tensor* tg = (grads && p.transition.trainable) ? &grads->transition.logits : nullptr;
  Var logits = g.param(p.transition.logits, tg);
  v.transition = g.masked_row_softmax(logits, TransitionMatrix::mask_tensor());
  return v;
}

}  // namespace

BoundVars bind_params(Graph& g, const ModelParams& params) {
  return bind_common(g, params, nullptr);
}

BoundVars bind_params(Graph& g, const ModelParams& params, ModelParams& grads) {
  return bind_common(g, params, &grads);
}

ForwardVars build_forward(Graph& g, const BoundVars& vars, const ModelConfig& cfg,
                          const std::vector<std::size_t>& token_ids, bool training, Rng& rng) {
  if (token_ids.empty()) throw std::invalid_argument("forward: empty sentence");
  const std::size_t n = token_ids.size();
  const bool drop = training && cfg.dropout > 0.0;
  ForwardVars f;

  std::vector<Var> xs(n);
  for (std::size_t t = 0; t < n; ++t) {
    Var x = g.row(vars.embeddings, token_ids[t]);
    if (drop) x = g.mul_const(x, dropout_mask(cfg.embedding_dim, cfg.dropout, rng));
    xs[t] = x;
  }

  f.h_boundary = bilstm(g, xs, vars.bound_fwd, vars.bound_bwd, cfg.boundary_hidden / 2);
  f.z_boundary.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    f.z_boundary[t] = g.softmax(g.linear(vars.w_boundary, f.h_boundary[t]));
  }

  f.h_unified = bilstm(g, f.h_boundary, vars.unif_fwd, vars.unif_bwd, cfg.unified_hidden / 2);

  if (cfg.use_sc) {
    f.gate.resize(n);
    f.h_tilde.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      f.gate[t] = g.sigmoid(g.add(g.linear(vars.w_gate, f.h_unified[t]), vars.b_gate));
      if (t == 0) {
        f.h_tilde[t] = f.h_unified[t];
      } else {
        f.h_tilde[t] = g.add(g.mul(f.gate[t], f.h_unified[t]),
                             g.mul(g.one_minus(f.gate[t]), f.h_tilde[t - 1]));
      }
    }
  } else {
    f.h_tilde = f.h_unified;
  }

  f.z_unified.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    Var ht = f.h_tilde[t];
    if (drop) ht = g.mul_const(ht, dropout_mask(cfg.unified_hidden, cfg.dropout, rng));
    f.z_unified[t] = g.softmax(g.linear(vars.w_unified, ht));
  }

  if (cfg.use_bg) {
    f.z_trans.resize(n);
    f.conf.resize(n);
    f.alpha.resize(n);
    f.z_mixed.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      f.z_trans[t] = g.linear_t(vars.transition, f.z_boundary[t]);
      f.conf[t] = g.dot(f.z_boundary[t], f.z_boundary[t]);
      f.alpha[t] = g.scale(f.conf[t], cfg.epsilon);
      f.z_mixed[t] = g.add(g.scale_vec(f.alpha[t], f.z_trans[t]),
                           g.scale_vec(g.one_minus(f.alpha[t]), f.z_unified[t]));
    }
  } else {
    f.z_mixed = f.z_unified;
  }

  if (cfg.use_oe) {
    f.z_opinion.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      f.z_opinion[t] = g.softmax(g.linear(vars.w_opinion, f.h_boundary[t]));
    }
  }
  return f;
}

LossVars build_loss(Graph& g, const ForwardVars& f, const std::vector<BoundaryTag>& gold_boundary,
                    const std::vector<UnifiedTag>& gold_unified,
                    const std::vector<int>& opinion_labels, const ModelConfig& cfg) {
  const std::size_t n = f.z_boundary.size();
  if (gold_boundary.size() != n || gold_unified.size() != n) {
    throw std::invalid_argument("loss: gold sequence length mismatch");
  }
  if (cfg.use_oe && opinion_labels.size() != n) {
    throw std::invalid_argument("loss: opinion label length mismatch");
  }
  LossVars l;
  std::vector<Var> terms(n);
  for (std::size_t t = 0; t < n; ++t) {
    terms[t] = g.cross_entropy(f.z_mixed[t], static_cast<std::size_t>(gold_unified[t]));
  }
  l.unified = g.mean(terms);
  for (std::size_t t = 0; t < n; ++t) {
    terms[t] = g.cross_entropy(f.z_boundary[t], static_cast<std::size_t>(gold_boundary[t]));
  }
  l.boundary = g.mean(terms);
  l.total = g.add(l.unified, l.boundary);
  if (cfg.use_oe) {
    for (std::size_t t = 0; t < n; ++t) {
      terms[t] = g.cross_entropy(f.z_opinion[t], static_cast<std::size_t>(opinion_labels[t]));
    }
    l.opinion = g.mean(terms);
    l.has_opinion = true;
    l.total = g.add(l.total, l.opinion);
  }
  return l;
}

ForwardTrace forward(const std::vector<std::size_t>& token_ids, const ModelParams& params,
                     const ModelConfig& cfg, bool training, Rng& rng) {
  Graph g;
  BoundVars bv = bind_params(g, params);
  ForwardVars fv = build_forward(g, bv, cfg, token_ids, training, rng);
  const std::size_t n = token_ids.size();

  ForwardTrace tr;
  auto copy_seq = [&](const std::vector<Var>& vs, std::vector<Tensor>& out) {
    out.reserve(vs.size());
    for (Var v : vs) out.push_back(g.value(v));
  };
  copy_seq(fv.h_boundary, tr.h_boundary);
  copy_seq(fv.h_unified, tr.h_unified);
  copy_seq(fv.h_tilde, tr.h_tilde);
  copy_seq(fv.gate, tr.gate);
  copy_seq(fv.z_boundary, tr.z_boundary);
  copy_seq(fv.z_unified, tr.z_unified);
  copy_seq(fv.z_trans, tr.z_trans);
  copy_seq(fv.z_mixed, tr.z_mixed);
  copy_seq(fv.z_opinion, tr.z_opinion);
  tr.conf.resize(n);
  tr.alpha.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    auto [c, a] = boundary_confidence(tr.z_boundary[t], cfg.epsilon);
    tr.conf[t] = c;
    tr.alpha[t] = cfg.use_bg ? a : 0.0;
  }
  return tr;
}

std::pair<double, double> boundary_confidence(const Tensor& z_boundary, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must be in [0,1]");
  double c = 0.0;
  for (std::size_t i = 0; i < z_boundary.size(); ++i) c += z_boundary[i] * z_boundary[i];
  return {c, epsilon * c};
}

Tensor transition_scores(const Tensor& z_boundary, const Tensor& realized) {
  if (realized.rank() != 2 || realized.rows() != z_boundary.size()) {
    throw std::invalid_argument("transition_scores: shape mismatch");
  }
  Tensor out({realized.cols()});
  for (std::size_t j = 0; j < realized.cols(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < realized.rows(); ++i) acc += realized.at(i, j) * z_boundary[i];
    out[j] = acc;
  }
  return out;
}

Tensor mix_scores(const Tensor& z_trans, const Tensor& z_unified, double alpha) {
  if (!z_trans.same_shape(z_unified)) throw std::invalid_argument("mix_scores: shape mismatch");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0,1]");
  Tensor out(z_trans.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = alpha * z_trans[i] + (1.0 - alpha) * z_unified[i];
  }
  return out;
}

std::pair<std::vector<Tensor>, std::vector<Tensor>> sc_gate(const std::vector<Tensor>& hs,
                                                            const Tensor& w_gate,
                                                            const Tensor& b_gate) {
  if (hs.empty()) throw std::invalid_argument("sc_gate: empty sequence");
  std::vector<Tensor> blended(hs.size()), gates(hs.size());
  for (std::size_t t = 0; t < hs.size(); ++t) {
    Tensor pre = linear(w_gate, hs[t]);
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += b_gate[i];
    gates[t] = sigmoid(pre);
    if (t == 0) {
      blended[t] = hs[t];
    } else {
      Tensor out(hs[t].shape());
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = gates[t][i] * hs[t][i] + (1.0 - gates[t][i]) * blended[t - 1][i];
      }
      blended[t] = std::move(out);
    }
  }
  return {std::move(blended), std::move(gates)};
}

Model make_model(const ModelConfig& cfg, const EmbeddingTable& table) {
  cfg.validate();
  if (table.vectors.cols() != cfg.embedding_dim) {
    throw std::invalid_argument("embedding table width does not match embedding_dim");
  }
  Model m;
  m.config = cfg;
  m.vocab = table.vocab;
  m.params = ModelParams::init(cfg, table.vectors);
  return m;
}

Prediction predict(const Model& model, const std::vector<std::string>& tokens) {
  std::vector<std::size_t> ids(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) ids[t] = model.vocab.lookup(tokens[t]);

  Graph g;
  BoundVars bv = bind_params(g, model.params);
  Rng rng(0);  // inference path draws nothing
  ForwardVars fv = build_forward(g, bv, model.config, ids, /*training=*/false, rng);

  Prediction pred;
  pred.unified.resize(ids.size());
  pred.boundary.resize(ids.size());
  for (std::size_t t = 0; t < ids.size(); ++t) {
    pred.unified[t] = static_cast<UnifiedTag>(argmax(g.value(fv.z_mixed[t])));
    pred.boundary[t] = static_cast<BoundaryTag>(argmax(g.value(fv.z_boundary[t])));
  }
  pred.spans = decode_unified(pred.unified);
  pred.boundary_spans = decode_boundary(pred.boundary);
  return pred;
}

}  // namespace tbsa
