#include "tbsa/lstm.hpp"

#include <stdexcept>
#include <tuple>

namespace tbsa {

LstmParams LstmParams::glorot(std::size_t input, std::size_t hidden, Rng& rng) {
  LstmParams p;
  p.input_size = input;
  p.hidden_size = hidden;
  auto gate = [&](Tensor& wx, Tensor& wh, Tensor& b) {
    wx = glorot_init(hidden, input, rng);
    wh = glorot_init(hidden, hidden, rng);
    b = Tensor({hidden});
  };
  gate(p.wx_i, p.wh_i, p.b_i);
  gate(p.wx_f, p.wh_f, p.b_f);
  gate(p.wx_o, p.wh_o, p.b_o);
  gate(p.wx_c, p.wh_c, p.b_c);
  return p;
}

std::pair<Tensor, Tensor> lstm_cell(const Tensor& x, const Tensor& h_prev,
                                    const Tensor& c_prev, const LstmParams& p) {
  if (x.size() != p.input_size || h_prev.size() != p.hidden_size ||
      c_prev.size() != p.hidden_size) {
    throw std::invalid_argument("lstm_cell: state/input sizes inconsistent with params");
  }
  auto pre = [&](const Tensor& wx, const Tensor& wh, const Tensor& b) {
    Tensor z = linear(wx, x);
    Tensor r = linear(wh, h_prev);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += r[k] + b[k];
    return z;
  };
  const Tensor gate_i = sigmoid(pre(p.wx_i, p.wh_i, p.b_i));
  const Tensor gate_f = sigmoid(pre(p.wx_f, p.wh_f, p.b_f));
  const Tensor gate_o = sigmoid(pre(p.wx_o, p.wh_o, p.b_o));
  const Tensor cand = tanh_vec(pre(p.wx_c, p.wh_c, p.b_c));

  Tensor c({p.hidden_size});
  for (std::size_t k = 0; k < p.hidden_size; ++k) {
    c[k] = gate_f[k] * c_prev[k] + gate_i[k] * cand[k];
  }
  Tensor h({p.hidden_size});
  for (std::size_t k = 0; k < p.hidden_size; ++k) {
    h[k] = gate_o[k] * std::tanh(c[k]);
  }
  return {h, c};
}

std::vector<Tensor> bilstm(const std::vector<Tensor>& xs, const LstmParams& fwd,
                           const LstmParams& bwd) {
  if (xs.empty()) throw std::invalid_argument("bilstm: empty sequence");
  if (fwd.hidden_size != bwd.hidden_size) {
    throw std::invalid_argument("bilstm: directions must share the hidden size");
  }
  const std::size_t n = xs.size();
  const std::size_t h = fwd.hidden_size;

  std::vector<Tensor> fwd_states(n), bwd_states(n);
  Tensor hs({h}), cs({h});
  for (std::size_t t = 0; t < n; ++t) {
    std::tie(hs, cs) = lstm_cell(xs[t], hs, cs, fwd);
    fwd_states[t] = hs;
  }
  hs = Tensor({h});
  cs = Tensor({h});
  for (std::size_t t = n; t-- > 0;) {
    std::tie(hs, cs) = lstm_cell(xs[t], hs, cs, bwd);
    bwd_states[t] = hs;
  }

  std::vector<Tensor> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    Tensor v({2 * h});
    for (std::size_t k = 0; k < h; ++k) v[k] = fwd_states[t][k];
    for (std::size_t k = 0; k < h; ++k) v[h + k] = bwd_states[t][k];
    out[t] = std::move(v);
  }
  return out;
}

}  // namespace tbsa
