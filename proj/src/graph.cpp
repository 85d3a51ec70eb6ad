#include "tbsa/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tbsa {

Var Graph::make(Tensor value) {
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  Node& stored = nodes_.back();
  stored.value = &stored.owned;
  return nodes_.size() - 1;
}

Var Graph::input(Tensor value) { return make(std::move(value)); }

Var Graph::param(const Tensor& value, Tensor* grad) {
  Node n;
  n.value = &value;
  if (grad && !grad->same_shape(value)) {
    throw std::invalid_argument("param: grad shape mismatch");
  }
  n.grad = grad;
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

const Tensor& Graph::grad(Var v) const {
  if (!nodes_[v].grad) throw std::logic_error("grad: backward() has not run");
  return *nodes_[v].grad;
}

Var Graph::row(Var matrix, std::size_t r) {
  const Tensor& m = val(matrix);
  if (m.rank() != 2 || r >= m.rows()) throw std::invalid_argument("row: bad index");
  const std::size_t c = m.cols();
  Tensor v({c});
  for (std::size_t j = 0; j < c; ++j) v[j] = m.at(r, j);
  Var out = make(std::move(v));
  nodes_[out].back = [this, matrix, r, c, out] {
    const Tensor& go = *nodes_[out].grad;
    Tensor& gm = *nodes_[matrix].grad;
    for (std::size_t j = 0; j < c; ++j) gm.at(r, j) += go[j];
  };
  return out;
}

Var Graph::linear(Var w, Var x) {
  const Tensor& wm = val(w);
  const Tensor& xv = val(x);
  Var out = make(tbsa::linear(wm, xv));
  nodes_[out].back = [this, w, x, out] {
    const Tensor& go = *nodes_[out].grad;
    const Tensor& wm = val(w);
    const Tensor& xv = val(x);
    Tensor& gw = *nodes_[w].grad;
    Tensor& gx = *nodes_[x].grad;
    for (std::size_t r = 0; r < wm.rows(); ++r) {
      const double gr = go[r];
      for (std::size_t c = 0; c < wm.cols(); ++c) {
        gw.at(r, c) += gr * xv[c];
        gx[c] += wm.at(r, c) * gr;
      }
    }
  };
  return out;
}

Var Graph::linear_t(Var w, Var x) {
  const Tensor& wm = val(w);
  const Tensor& xv = val(x);
  if (wm.rank() != 2 || xv.size() != wm.rows()) {
    throw std::invalid_argument("linear_t: shape mismatch");
  }
  Tensor y({wm.cols()});
  for (std::size_t j = 0; j < wm.cols(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < wm.rows(); ++i) acc += wm.at(i, j) * xv[i];
    y[j] = acc;
  }
  Var out = make(std::move(y));
  nodes_[out].back = [this, w, x, out] {
    const Tensor& go = *nodes_[out].grad;
    const Tensor& wm = val(w);
    const Tensor& xv = val(x);
    Tensor& gw = *nodes_[w].grad;
    Tensor& gx = *nodes_[x].grad;
    for (std::size_t i = 0; i < wm.rows(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < wm.cols(); ++j) {
        gw.at(i, j) += xv[i] * go[j];
        acc += wm.at(i, j) * go[j];
      }
      gx[i] += acc;
    }
  };
  return out;
}

Var Graph::add(Var a, Var b) {
  const Tensor& av = val(a);
  const Tensor& bv = val(b);
  if (!av.same_shape(bv)) throw std::invalid_argument("add: shape mismatch");
  Tensor y(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) y[i] = av[i] + bv[i];
  Var out = make(std::move(y));
  nodes_[out].back = [this, a, b, out] {
    const Tensor& go = *nodes_[out].grad;
    Tensor& ga = *nodes_[a].grad;
    Tensor& gb = *nodes_[b].grad;
    for (std::size_t i = 0; i < go.size(); ++i) {
      ga[i] += go[i];
      gb[i] += go[i];
    }
  };
  return out;
}

Var Graph::mul(Var a, Var b) {
  const Tensor& av = val(a);
  const Tensor& bv = val(b);
  if (!av.same_shape(bv)) throw std::invalid_argument("mul: shape mismatch");
  Tensor y(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) y[i] = av[i] * bv[i];
  Var out = make(std::move(y));
  nodes_[out].back = [this, a, b, out] {
    const Tensor& go = *nodes_[out].grad;
    const Tensor& av = val(a);
    const Tensor& bv = val(b);
    Tensor& ga = *nodes_[a].grad;
    Tensor& gb = *nodes_[b].grad;
    for (std::size_t i = 0; i < go.size(); ++i) {
      ga[i] += go[i] * bv[i];
      gb[i] += go[i] * av[i];
    }
  };
  return out;
}

Var Graph::mul_const(Var a, Tensor k) {
  const Tensor& av = val(a);
  if (!av.same_shape(k)) throw std::invalid_argument("mul_const: shape mismatch");
  Tensor y(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) y[i] = av[i] * k[i];
  Var out = make(std::move(y));
  nodes_[out].back = [this, a, out, k = std::move(k)] {
    const Tensor& go = *nodes_[out].grad;
    Tensor& ga = *nodes_[a].grad;
    for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * k[i];
  };
  return out;
}

Var Graph::sigmoid(Var a) {
  Var out = make(tbsa::sigmoid(val(a)));
  nodes_[out].back = [this, a, out] {
    const Tensor& go = *nodes_[out].grad;
    const Tensor& y = val(out);
    Tensor& ga = *nodes_[a].grad;
    for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * y[i] * (1.0 - y[i]);
  };
  return out;
}

Var Graph::tanh_op(Var a) {
  Var out = make(tanh_vec(val(a)));
  nodes_[out].back = [this, a, out] {
    const Tensor& go = *nodes_[out].grad;
    const Tensor& y = val(out);
    Tensor& ga = *nodes_[a].grad;
    for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * (1.0 - y[i] * y[i]);
  };
  return out;
}

Var Graph::softmax(Var a) {
  Var out = make(tbsa::softmax(val(a)));
  nodes_[out].back = [this, a, out] {
    const Tensor& go = *nodes_[out].grad;
    const Tensor& y = val(out);
    Tensor& ga = *nodes_[a].grad;
    double dot = 0.0;
    for (std::size_t i = 0; i < go.size(); ++i) dot += go[i] * y[i];
    for (std::size_t i = 0; i < go.size(); ++i) ga[i] += y[i] * (go[i] - dot);
  };
  return out;
}

Var Graph::concat(Var a, Var b) {
  const Tensor& av = val(a);
  const Tensor& bv = val(b);
  Tensor y({av.size() + bv.size()});
  for (std::size_t i = 0; i < av.size(); ++i) y[i] = av[i];
  for (std::size_t i = 0; i < bv.size(); ++i) y[av.size() + i] = bv[i];
  Var out = make(std::move(y));
  const std::size_t na = av.size();
  nodes_[out].back = [this, a, b, out, na] {
    const Tensor& go = *nodes_[out].grad;
    Tensor& ga = *nodes_[a].grad;
    Tensor& gb = *nodes_[b].grad;
    for (std::size_t i = 0; i < na; ++i) ga[i] += go[i];
    for (std::size_t i = na; i < go.size(); ++i) gb[i - na] += go[i];
  };
  return out;
}

Var Graph::dot(Var a, Var b) {
  const Tensor& av = val(a);
  const Tensor& bv = val(b);
  if (av.size() != bv.size()) throw std::invalid_argument("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
  Var out = make(Tensor::vec({acc}));
  nodes_[out].back = [this, a, b, out] {
    const double g0 = (*nodes_[out].grad)[0];
    const Tensor& av = val(a);
    const Tensor& bv = val(b);
    Tensor& ga = *nodes_[a].grad;
    Tensor& gb = *nodes_[b].grad;
    for (std::size_t i = 0; i < av.size(); ++i) {
      ga[i] += g0 * bv[i];
      gb[i] += g0 * av[i];
    }
  };
  return out;
}

Var Graph::scale(Var a, double k) {
  const Tensor& av = val(a);
  Tensor y(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) y[i] = av[i] * k;
  Var out = make(std::move(y));
  nodes_[out].back = [this, a, out, k] {
    const Tensor& go = *nodes_[out].grad;
    Tensor& ga = *nodes_[a].grad;
    for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * k;
  };
  return out;
}

Var Graph::scale_vec(Var s, Var v) {
  const Tensor& sv = val(s);
  const Tensor& vv = val(v);
  if (sv.size() != 1) throw std::invalid_argument("scale_vec: scalar expected");
  Tensor y(vv.shape());
  for (std::size_t i = 0; i < vv.size(); ++i) y[i] = sv[0] * vv[i];
  Var out = make(std::move(y));
  nodes_[out].back = [this, s, v, out] {
    const Tensor& go = *nodes_[out].grad;
    const Tensor& sv = val(s);
    const Tensor& vv = val(v);
    Tensor& gs = *nodes_[s].grad;
    Tensor& gv = *nodes_[v].grad;
    double acc = 0.0;
    for (std::size_t i = 0; i < go.size(); ++i) {
      gv[i] += sv[0] * go[i];
      acc += go[i] * vv[i];
    }
    gs[0] += acc;
  };
  return out;
}

Var Graph::one_minus(Var a) {
  const Tensor& av = val(a);
  Tensor y(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) y[i] = 1.0 - av[i];
  Var out = make(std::move(y));
  nodes_[out].back = [this, a, out] {
    const Tensor& go = *nodes_[out].grad;
    Tensor& ga = *nodes_[a].grad;
    for (std::size_t i = 0; i < go.size(); ++i) ga[i] -= go[i];
  };
  return out;
}

Var Graph::cross_entropy(Var p, std::size_t y) {
  const Tensor& pv = val(p);
  Var out = make(Tensor::vec({tbsa::cross_entropy(pv, y)}));
  nodes_[out].back = [this, p, y, out] {
    const double g0 = (*nodes_[out].grad)[0];
    const Tensor& pv = val(p);
    if (pv[y] > kLogClamp) {
      (*nodes_[p].grad)[y] += -g0 / pv[y];
    }
    // below the clamp the loss is locally constant in p[y]
  };
  return out;
}

Var Graph::mean(const std::vector<Var>& scalars) {
  if (scalars.empty()) throw std::invalid_argument("mean: no terms");
  Var acc = scalars[0];
  for (std::size_t i = 1; i < scalars.size(); ++i) acc = add(acc, scalars[i]);
  return scale(acc, 1.0 / static_cast<double>(scalars.size()));
}

Var Graph::masked_row_softmax(Var logits, Tensor mask01) {
  const Tensor& lm = val(logits);
  if (!lm.same_shape(mask01)) throw std::invalid_argument("masked_row_softmax: shape mismatch");
  const std::size_t rows = lm.rows(), cols = lm.cols();
  Tensor y = Tensor::matrix(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    double mx = -HUGE_VAL;
    for (std::size_t j = 0; j < cols; ++j) {
      if (mask01.at(i, j) != 0.0) mx = std::max(mx, lm.at(i, j));
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      if (mask01.at(i, j) != 0.0) sum += std::exp(lm.at(i, j) - mx);
    }
    for (std::size_t j = 0; j < cols; ++j) {
      y.at(i, j) = mask01.at(i, j) != 0.0 ? std::exp(lm.at(i, j) - mx) / sum : 0.0;
    }
  }
  Var out = make(std::move(y));
  nodes_[out].back = [this, logits, out, mask01 = std::move(mask01)] {
    const Tensor& go = *nodes_[out].grad;
    const Tensor& y = val(out);
    Tensor& gl = *nodes_[logits].grad;
    for (std::size_t i = 0; i < y.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < y.cols(); ++j) {
        if (mask01.at(i, j) != 0.0) dot += go.at(i, j) * y.at(i, j);
      }
      for (std::size_t j = 0; j < y.cols(); ++j) {
        if (mask01.at(i, j) != 0.0) gl.at(i, j) += y.at(i, j) * (go.at(i, j) - dot);
      }
    }
  };
  return out;
}

void Graph::backward(Var loss) {
  if (value(loss).size() != 1) throw std::invalid_argument("backward: loss must be scalar");
  for (Node& n : nodes_) {
    if (!n.grad) {
      n.grad_local = Tensor(n.value->shape());
      n.grad = &n.grad_local;
    }
  }
  (*nodes_[loss].grad)[0] += 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    if (nodes_[i].back) nodes_[i].back();
  }
}

std::pair<Var, Var> lstm_cell(Graph& g, Var x, Var h_prev, Var c_prev, const LstmVars& p) {
  auto pre = [&](Var wx, Var wh, Var b) {
    return g.add(g.add(g.linear(wx, x), g.linear(wh, h_prev)), b);
  };
  Var gate_i = g.sigmoid(pre(p.wx_i, p.wh_i, p.b_i));
  Var gate_f = g.sigmoid(pre(p.wx_f, p.wh_f, p.b_f));
  Var gate_o = g.sigmoid(pre(p.wx_o, p.wh_o, p.b_o));
  Var cand = g.tanh_op(pre(p.wx_c, p.wh_c, p.b_c));
  Var c = g.add(g.mul(gate_f, c_prev), g.mul(gate_i, cand));
  Var h = g.mul(gate_o, g.tanh_op(c));
  return {h, c};
}

std::vector<Var> bilstm(Graph& g, const std::vector<Var>& xs, const LstmVars& fwd,
                        const LstmVars& bwd, std::size_t hidden) {
  if (xs.empty()) throw std::invalid_argument("bilstm: empty sequence");
  const std::size_t n = xs.size();
  std::vector<Var> fwd_h(n), bwd_h(n);

  Var h = g.input(Tensor({hidden}));
  Var c = g.input(Tensor({hidden}));
  for (std::size_t t = 0; t < n; ++t) {
    std::tie(h, c) = lstm_cell(g, xs[t], h, c, fwd);
    fwd_h[t] = h;
  }
  h = g.input(Tensor({hidden}));
  c = g.input(Tensor({hidden}));
  for (std::size_t t = n; t-- > 0;) {
    std::tie(h, c) = lstm_cell(g, xs[t], h, c, bwd);
    bwd_h[t] = h;
  }

  std::vector<Var> out(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = g.concat(fwd_h[t], bwd_h[t]);
  return out;
}

}  // namespace tbsa
