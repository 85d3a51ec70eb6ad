#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "tbsa/corpus.hpp"
#include "tbsa/error.hpp"
#include "tbsa/model.hpp"
#include "tbsa/rng.hpp"
#include "tbsa/tags.hpp"

using namespace tbsa;

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.embedding_dim = 2;
  cfg.boundary_hidden = 2;  // one unit per direction
  cfg.unified_hidden = 2;
  cfg.epsilon = 0.5;
  cfg.window = 1;
  cfg.dropout = 0.0;
  cfg.seed = 3;
  return cfg;
}

Model tiny_model(const ModelConfig& cfg, const std::vector<std::string>& words) {
  Vocabulary vocab;
  for (const auto& w : words) vocab.add(w);
  EmbeddingTable table = load_embeddings("", vocab, cfg.embedding_dim, derive_seed(cfg.seed, 1));
  return make_model(cfg, table);
}

// scalar softmax over a plain vector
std::vector<double> naive_softmax(const std::vector<double>& v) {
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

// single-unit LSTM direction over 2-dim inputs, all in plain doubles
std::vector<double> naive_lstm_1unit(const LstmParams& p,
                                     const std::vector<std::vector<double>>& xs) {
  std::vector<double> hs;
  double h = 0.0, c = 0.0;
  for (const auto& x : xs) {
    auto gate = [&](const Tensor& wx, const Tensor& wh, const Tensor& b) {
      double a = b[0] + wh[0] * h;
      for (std::size_t j = 0; j < x.size(); ++j) a += wx[j] * x[j];
      return a;
    };
    const double i = sig(gate(p.wx_i, p.wh_i, p.b_i));
    const double f = sig(gate(p.wx_f, p.wh_f, p.b_f));
    const double o = sig(gate(p.wx_o, p.wh_o, p.b_o));
    const double cand = std::tanh(gate(p.wx_c, p.wh_c, p.b_c));
    c = f * c + i * cand;
    h = o * std::tanh(c);
    hs.push_back(h);
  }
  return hs;
}

}  // namespace

TEST_CASE("config validation rejects impossible settings") {
  ModelConfig cfg = tiny_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.boundary_hidden = 3;  // cannot split across two directions
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.epsilon = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.epsilon = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.dropout = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.window = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.embedding_dim = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("initialization is seed-deterministic and independent of component flags") {
  ModelConfig cfg = tiny_config();
  Model a = tiny_model(cfg, {"x", "y"});
  Model b = tiny_model(cfg, {"x", "y"});
  bool equal = true;
  visit_params(a.params, [&](const std::string& name, const Tensor& t) {
    visit_params(b.params, [&](const std::string& name2, const Tensor& t2) {
      if (name == name2) equal = equal && (t == t2);
    });
  });
  CHECK(equal);

  // disabling components must not shift the random draws of anything else
  ModelConfig stripped = cfg;
  stripped.use_bg = false;
  stripped.use_sc = false;
  stripped.use_oe = false;
  Model c = tiny_model(stripped, {"x", "y"});
  bool same_weights = true;
  visit_params(a.params, [&](const std::string& name, const Tensor& t) {
    visit_params(c.params, [&](const std::string& name2, const Tensor& t2) {
      if (name == name2) same_weights = same_weights && (t == t2);
    });
  });
  CHECK(same_weights);

  ModelConfig other = cfg;
  other.seed = 4;
  Model d = tiny_model(other, {"x", "y"});
  CHECK(a.params.w_unified != d.params.w_unified);
}

TEST_CASE("forward pass satisfies the distribution and mixing invariants") {
  ModelConfig cfg;
  cfg.embedding_dim = 6;
  cfg.boundary_hidden = 4;
  cfg.unified_hidden = 4;
  cfg.epsilon = 0.7;
  cfg.dropout = 0.0;
  cfg.seed = 9;
  Model model = tiny_model(cfg, {"a", "b", "c", "d", "e"});

  Rng rng(1234);
  for (int iter = 0; iter < 50; ++iter) {
    const std::size_t n = 1 + rng.below(9);
    std::vector<std::size_t> ids;
    for (std::size_t t = 0; t < n; ++t) ids.push_back(rng.below(model.vocab.size()));
    Rng fwd_rng(0);
    ForwardTrace tr = forward(ids, model.params, cfg, false, fwd_rng);

    auto check_dist = [&](const Tensor& z) {
      double sum = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        CHECK(z[i] >= 0.0);
        sum += z[i];
      }
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    };
    REQUIRE(tr.z_boundary.size() == n);
    for (std::size_t t = 0; t < n; ++t) {
      check_dist(tr.z_boundary[t]);
      check_dist(tr.z_unified[t]);
      check_dist(tr.z_trans[t]);
      check_dist(tr.z_mixed[t]);
      check_dist(tr.z_opinion[t]);
      // alpha = epsilon * sum(z^2) lives in [epsilon/5, epsilon]
      CHECK(tr.alpha[t] >= cfg.epsilon / 5.0 - 1e-12);
      CHECK(tr.alpha[t] <= cfg.epsilon + 1e-12);
      CHECK(tr.conf[t] == doctest::Approx(tr.alpha[t] / cfg.epsilon).epsilon(1e-9));
    }
  }
}

TEST_CASE("disabled components alias their inputs bitwise") {
  ModelConfig cfg;
  cfg.embedding_dim = 6;
  cfg.boundary_hidden = 4;
  cfg.unified_hidden = 4;
  cfg.dropout = 0.0;
  cfg.seed = 5;

  std::vector<std::size_t> ids{1, 2, 3, 1};

  ModelConfig no_bg = cfg;
  no_bg.use_bg = false;
  Model m1 = tiny_model(no_bg, {"a", "b", "c"});
  Rng r1(0);
  ForwardTrace t1 = forward(ids, m1.params, no_bg, false, r1);
  CHECK(t1.z_trans.empty());
  REQUIRE(t1.z_mixed.size() == ids.size());
  for (std::size_t t = 0; t < ids.size(); ++t) {
    CHECK(t1.z_mixed[t] == t1.z_unified[t]);  // exact aliasing
    CHECK(t1.alpha[t] == 0.0);
  }

  ModelConfig no_sc = cfg;
  no_sc.use_sc = false;
  Model m2 = tiny_model(no_sc, {"a", "b", "c"});
  Rng r2(0);
  ForwardTrace t2 = forward(ids, m2.params, no_sc, false, r2);
  CHECK(t2.gate.empty());
  REQUIRE(t2.h_tilde.size() == ids.size());
  for (std::size_t t = 0; t < ids.size(); ++t) {
    CHECK(t2.h_tilde[t] == t2.h_unified[t]);  // exact aliasing
  }

  ModelConfig no_oe = cfg;
  no_oe.use_oe = false;
  Model m3 = tiny_model(no_oe, {"a", "b", "c"});
  Rng r3(0);
  ForwardTrace t3 = forward(ids, m3.params, no_oe, false, r3);
  CHECK(t3.z_opinion.empty());
}

TEST_CASE("boundary confidence and mixing arithmetic") {
  // a one-hot boundary distribution yields alpha = epsilon exactly
  Tensor onehot = Tensor::vec({0.0, 0.0, 1.0, 0.0, 0.0});
  auto [c1, a1] = boundary_confidence(onehot, 0.37);
  CHECK(c1 == 1.0);
  CHECK(a1 == 0.37);

  // the uniform distribution is the minimum-confidence case: alpha = eps/5
  Tensor uniform = Tensor::vec({0.2, 0.2, 0.2, 0.2, 0.2});
  auto [c2, a2] = boundary_confidence(uniform, 0.5);
  CHECK(c2 == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(a2 == doctest::Approx(0.1).epsilon(1e-12));

  // alpha = 0 and alpha = 1 collapse the mix onto one operand, bit for bit
  Tensor zt = Tensor::vec({0.3, 0.7});
  Tensor zs = Tensor::vec({0.6, 0.4});
  CHECK(mix_scores(zt, zs, 0.0) == zs);
  CHECK(mix_scores(zt, zs, 1.0) == zt);
  Tensor half = mix_scores(zt, zs, 0.5);
  CHECK(half[0] == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(half[1] == doctest::Approx(0.55).epsilon(1e-15));
}

TEST_CASE("transition scores redistribute boundary mass over coherent unified tags") {
  TransitionMatrix tr = TransitionMatrix::initial();
  Tensor w = tr.realized();

  // one-hot B input: the B-* family splits the mass evenly
  Tensor zb = Tensor::vec({1.0, 0.0, 0.0, 0.0, 0.0});
  Tensor zp = transition_scores(zb, w);
  REQUIRE(zp.size() == kNumUnifiedTags);
  CHECK(zp[0] == 1.0 / 3.0);   // B-POS
  CHECK(zp[4] == 1.0 / 3.0);   // B-NEG
  CHECK(zp[8] == 1.0 / 3.0);   // B-NEU
  CHECK(zp[12] == 0.0);

  // one-hot O input puts everything on unified O
  Tensor zo = Tensor::vec({0.0, 0.0, 0.0, 0.0, 1.0});
  Tensor zq = transition_scores(zo, w);
  CHECK(zq[12] == 1.0);

  // any distribution stays a distribution
  Tensor mixed = Tensor::vec({0.1, 0.2, 0.3, 0.15, 0.25});
  Tensor zr = transition_scores(mixed, w);
  double sum = 0.0;
  for (std::size_t i = 0; i < zr.size(); ++i) sum += zr[i];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gated carry-over matches a scalar recurrence") {
  Rng rng(31);
  const std::size_t d = 3, n = 4;
  std::vector<Tensor> hs;
  for (std::size_t t = 0; t < n; ++t) {
    Tensor h(std::vector<std::size_t>{d});
    for (std::size_t k = 0; k < d; ++k) h[k] = rng.uniform(-1.0, 1.0);
    hs.push_back(h);
  }
  Tensor w = Tensor::matrix(d, d);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-1.0, 1.0);
  Tensor b(std::vector<std::size_t>{d});
  for (std::size_t i = 0; i < d; ++i) b[i] = rng.uniform(-0.5, 0.5);

  auto [blended, gates] = sc_gate(hs, w, b);
  REQUIRE(blended.size() == n);
  REQUIRE(gates.size() == n);

  std::vector<double> prev(d);
  for (std::size_t k = 0; k < d; ++k) prev[k] = hs[0][k];  // first step passes through
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < d; ++k) {
      double a = b[k];
      for (std::size_t j = 0; j < d; ++j) a += w.at(k, j) * hs[t][j];
      const double g = sig(a);
      CHECK(gates[t][k] == doctest::Approx(g).epsilon(1e-12));
      const double expect = t == 0 ? hs[0][k] : g * hs[t][k] + (1.0 - g) * prev[k];
      CHECK(blended[t][k] == doctest::Approx(expect).epsilon(1e-12));
    }
    for (std::size_t k = 0; k < d; ++k) prev[k] = blended[t][k];
  }
}

TEST_CASE("whole forward pass matches an independent scalar recomputation") {
  ModelConfig cfg = tiny_config();
  Model model = tiny_model(cfg, {"a", "b", "c"});
  // non-trivial transition logits so the masked softmax is exercised
  Rng lrng(77);
  for (std::size_t i = 0; i < model.params.transition.logits.size(); ++i) {
    model.params.transition.logits[i] = lrng.uniform(-1.0, 1.0);
  }

  const std::vector<std::size_t> ids{1, 2, 3};
  Rng fwd_rng(0);
  ForwardTrace tr = forward(ids, model.params, cfg, false, fwd_rng);

  const ModelParams& P = model.params;
  const std::size_t n = ids.size();

  // embeddings
  std::vector<std::vector<double>> xs;
  for (std::size_t id : ids) {
    xs.push_back({P.embeddings.at(id, 0), P.embeddings.at(id, 1)});
  }

  // boundary-task BiLSTM: one unit forward, one unit backward
  auto fwd_h = naive_lstm_1unit(P.bound_fwd, xs);
  std::vector<std::vector<double>> rev(xs.rbegin(), xs.rend());
  auto bwd_h = naive_lstm_1unit(P.bound_bwd, rev);
  std::vector<std::vector<double>> hT(n);
  for (std::size_t t = 0; t < n; ++t) hT[t] = {fwd_h[t], bwd_h[n - 1 - t]};

  // boundary scores
  std::vector<std::vector<double>> zT(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> logits(kNumBoundaryTags);
    for (std::size_t r = 0; r < kNumBoundaryTags; ++r) {
      logits[r] = P.w_boundary.at(r, 0) * hT[t][0] + P.w_boundary.at(r, 1) * hT[t][1];
    }
    zT[t] = naive_softmax(logits);
    for (std::size_t r = 0; r < kNumBoundaryTags; ++r) {
      CHECK(tr.z_boundary[t][r] == doctest::Approx(zT[t][r]).epsilon(1e-12));
    }
  }

  // unified-task BiLSTM consumes the boundary features
  auto ufwd = naive_lstm_1unit(P.unif_fwd, hT);
  std::vector<std::vector<double>> hT_rev(hT.rbegin(), hT.rend());
  auto ubwd = naive_lstm_1unit(P.unif_bwd, hT_rev);
  std::vector<std::vector<double>> hS(n);
  for (std::size_t t = 0; t < n; ++t) hS[t] = {ufwd[t], ubwd[n - 1 - t]};
  for (std::size_t t = 0; t < n; ++t) {
    CHECK(tr.h_unified[t][0] == doctest::Approx(hS[t][0]).epsilon(1e-12));
    CHECK(tr.h_unified[t][1] == doctest::Approx(hS[t][1]).epsilon(1e-12));
  }

  // consistency gate
  std::vector<std::vector<double>> htil(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> gate(2);
    for (std::size_t k = 0; k < 2; ++k) {
      gate[k] = sig(P.w_gate.at(k, 0) * hS[t][0] + P.w_gate.at(k, 1) * hS[t][1] + P.b_gate[k]);
    }
    if (t == 0) {
      htil[t] = hS[0];
    } else {
      htil[t] = {gate[0] * hS[t][0] + (1.0 - gate[0]) * htil[t - 1][0],
                 gate[1] * hS[t][1] + (1.0 - gate[1]) * htil[t - 1][1]};
    }
    CHECK(tr.h_tilde[t][0] == doctest::Approx(htil[t][0]).epsilon(1e-12));
    CHECK(tr.h_tilde[t][1] == doctest::Approx(htil[t][1]).epsilon(1e-12));
  }

  // unified scores
  std::vector<std::vector<double>> zS(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> logits(kNumUnifiedTags);
    for (std::size_t r = 0; r < kNumUnifiedTags; ++r) {
      logits[r] = P.w_unified.at(r, 0) * htil[t][0] + P.w_unified.at(r, 1) * htil[t][1];
    }
    zS[t] = naive_softmax(logits);
    for (std::size_t r = 0; r < kNumUnifiedTags; ++r) {
      CHECK(tr.z_unified[t][r] == doctest::Approx(zS[t][r]).epsilon(1e-12));
    }
  }

  // realized transition rows: softmax restricted to each row's valid family
  const auto& mask = TransitionMatrix::mask();
  std::vector<std::vector<double>> W(kNumBoundaryTags,
                                     std::vector<double>(kNumUnifiedTags, 0.0));
  for (std::size_t b = 0; b < kNumBoundaryTags; ++b) {
    double mx = -1e300;
    for (std::size_t u = 0; u < kNumUnifiedTags; ++u) {
      if (mask[b][u]) mx = std::max(mx, P.transition.logits.at(b, u));
    }
    double sum = 0.0;
    for (std::size_t u = 0; u < kNumUnifiedTags; ++u) {
      if (mask[b][u]) sum += std::exp(P.transition.logits.at(b, u) - mx);
    }
    for (std::size_t u = 0; u < kNumUnifiedTags; ++u) {
      if (mask[b][u]) W[b][u] = std::exp(P.transition.logits.at(b, u) - mx) / sum;
    }
  }

  // guided mix and opinion scores
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> zprime(kNumUnifiedTags, 0.0);
    for (std::size_t u = 0; u < kNumUnifiedTags; ++u) {
      for (std::size_t b = 0; b < kNumBoundaryTags; ++b) zprime[u] += W[b][u] * zT[t][b];
    }
    double c = 0.0;
    for (std::size_t b = 0; b < kNumBoundaryTags; ++b) c += zT[t][b] * zT[t][b];
    const double alpha = cfg.epsilon * c;
    CHECK(tr.conf[t] == doctest::Approx(c).epsilon(1e-12));
    CHECK(tr.alpha[t] == doctest::Approx(alpha).epsilon(1e-12));
    for (std::size_t u = 0; u < kNumUnifiedTags; ++u) {
      CHECK(tr.z_trans[t][u] == doctest::Approx(zprime[u]).epsilon(1e-12));
      const double mixed = alpha * zprime[u] + (1.0 - alpha) * zS[t][u];
      CHECK(tr.z_mixed[t][u] == doctest::Approx(mixed).epsilon(1e-12));
    }

    std::vector<double> olog(2);
    for (std::size_t r = 0; r < 2; ++r) {
      olog[r] = P.w_opinion.at(r, 0) * hT[t][0] + P.w_opinion.at(r, 1) * hT[t][1];
    }
    auto zO = naive_softmax(olog);
    CHECK(tr.z_opinion[t][0] == doctest::Approx(zO[0]).epsilon(1e-12));
    CHECK(tr.z_opinion[t][1] == doctest::Approx(zO[1]).epsilon(1e-12));
  }
}

TEST_CASE("prediction is the decoded argmax of the mixed scores") {
  ModelConfig cfg;
  cfg.embedding_dim = 6;
  cfg.boundary_hidden = 4;
  cfg.unified_hidden = 4;
  cfg.dropout = 0.3;  // must not affect inference
  cfg.seed = 17;
  Model model = tiny_model(cfg, {"the", "screen", "is", "great"});

  const std::vector<std::string> tokens{"the", "screen", "is", "great", "wat"};
  Prediction pred = predict(model, tokens);
  REQUIRE(pred.unified.size() == tokens.size());
  REQUIRE(pred.boundary.size() == tokens.size());

  std::vector<std::size_t> ids;
  for (const auto& tok : tokens) ids.push_back(model.vocab.lookup(tok));
  CHECK(ids.back() == Vocabulary::kUnkIndex);  // unseen word maps to the unknown entry
  Rng rng(0);
  ForwardTrace tr = forward(ids, model.params, cfg, false, rng);
  std::vector<UnifiedTag> expect_u;
  std::vector<BoundaryTag> expect_b;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    expect_u.push_back(static_cast<UnifiedTag>(argmax(tr.z_mixed[t])));
    expect_b.push_back(static_cast<BoundaryTag>(argmax(tr.z_boundary[t])));
  }
  CHECK(pred.unified == expect_u);
  CHECK(pred.boundary == expect_b);
  CHECK(pred.spans == decode_unified(expect_u));
  CHECK(pred.boundary_spans == decode_boundary(expect_b));

  // inference is deterministic even with dropout configured
  Prediction again = predict(model, tokens);
  CHECK(again.unified == pred.unified);
}

TEST_CASE("checkpoint roundtrip preserves everything bit for bit") {
  ModelConfig cfg;
  cfg.embedding_dim = 4;
  cfg.boundary_hidden = 4;
  cfg.unified_hidden = 2;
  cfg.epsilon = 0.25;
  cfg.window = 2;
  cfg.dropout = 0.1;
  cfg.use_sc = false;
  cfg.transition_trainable = false;
  cfg.seed = 23;
  Model model = tiny_model(cfg, {"alpha", "beta", "gamma"});
  Rng lrng(5);
  for (std::size_t i = 0; i < model.params.transition.logits.size(); ++i) {
    model.params.transition.logits[i] = lrng.uniform(-1.0, 1.0);
  }

  const std::string path =
      (std::filesystem::temp_directory_path() / "tbsa_ckpt_test.bin").string();
  save_model(model, path);
  Model loaded = load_model(path);

  CHECK(loaded.config.embedding_dim == cfg.embedding_dim);
  CHECK(loaded.config.epsilon == cfg.epsilon);
  CHECK(loaded.config.use_sc == cfg.use_sc);
  CHECK(loaded.config.transition_trainable == false);
  CHECK(loaded.config.seed == cfg.seed);
  CHECK(loaded.vocab == model.vocab);
  CHECK(loaded.params.transition.trainable == false);

  bool equal = true;
  std::size_t seen = 0;
  visit_params(model.params, [&](const std::string& name, const Tensor& t) {
    visit_params(loaded.params, [&](const std::string& name2, const Tensor& t2) {
      if (name == name2) {
        ++seen;
        equal = equal && (t == t2);
      }
    });
  });
  CHECK(equal);
  CHECK(seen == 55);  // 1 embedding + 4*12 lstm + 5 heads/gates + logits

  // predictions agree exactly
  const std::vector<std::string> tokens{"alpha", "gamma", "beta"};
  CHECK(predict(model, tokens).unified == predict(loaded, tokens).unified);

  std::filesystem::remove(path);

  // corrupt file: wrong magic
  const std::string bad =
      (std::filesystem::temp_directory_path() / "tbsa_ckpt_bad.bin").string();
  {
    std::FILE* f = std::fopen(bad.c_str(), "wb");
    REQUIRE(f != nullptr);
    std::fwrite("NOTTBSA!", 1, 8, f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_model(bad), DataError);
  std::filesystem::remove(bad);
  CHECK_THROWS_AS(load_model("/nonexistent/path/x.bin"), DataError);
}
