#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <utility>
#include <vector>

#include "tbsa/tensor.hpp"

namespace tbsa {

using Var = std::size_t;

// Reverse-mode computation tape. A forward pass builds nodes; backward()
// walks them in reverse and accumulates exact derivatives of a scalar loss
// into every bound parameter's gradient tensor.
//
// One graph serves one forward/backward pass; grads accumulate, so call
// backward at most once per graph.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Constant leaf: participates in the forward pass, receives no gradient
  // of interest.
  Var input(Tensor value);

  // Parameter leaf bound to external storage. The value is not copied;
  // gradients are accumulated into *grad (may be null for inference).
  Var param(const Tensor& value, Tensor* grad);

  // --- operations ---
  Var row(Var matrix, std::size_t r);          // select row r of a rank-2 var
  Var linear(Var w, Var x);                    // W·x
  Var linear_t(Var w, Var x);                  // Wᵀ·x
  Var add(Var a, Var b);                       // elementwise, same shape
  Var mul(Var a, Var b);                       // elementwise, same shape
  Var mul_const(Var a, Tensor k);              // elementwise by a constant
  Var sigmoid(Var a);
  Var tanh_op(Var a);
  Var softmax(Var a);
  Var concat(Var a, Var b);
  Var dot(Var a, Var b);                       // -> scalar (shape {1})
  Var scale(Var a, double k);
  Var scale_vec(Var s, Var v);                 // scalar var times vector
  Var one_minus(Var a);                        // 1 − a, any shape
  Var cross_entropy(Var p, std::size_t y);     // -> scalar, clamped log
  Var mean(const std::vector<Var>& scalars);   // -> scalar

  // Realize a row-stochastic matrix from free logits: softmax per row over
  // the entries where mask01 is 1; entries where mask01 is 0 are exactly 0.
  Var masked_row_softmax(Var logits, Tensor mask01);

  const Tensor& value(Var v) const { return *nodes_[v].value; }
  const Tensor& grad(Var v) const;  // valid after backward()

  // Seeds d(loss)/d(loss) = 1 and runs the tape in reverse. The loss must
  // be scalar.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor owned;                 // empty for param leaves
    const Tensor* value = nullptr;
    Tensor grad_local;            // allocated lazily by backward()
    Tensor* grad = nullptr;       // &grad_local, or external for params
    std::function<void()> back;   // empty for leaves
  };

  Var make(Tensor value);
  Tensor& g(Var v) { return *nodes_[v].grad; }
  const Tensor& val(Var v) const { return *nodes_[v].value; }

  // deque: node addresses must stay stable, nodes point at their own tensors
  std::deque<Node> nodes_;
};

// --- LSTM built from graph primitives ---

struct LstmVars {
  Var wx_i, wh_i, b_i;
  Var wx_f, wh_f, b_f;
  Var wx_o, wh_o, b_o;
  Var wx_c, wh_c, b_c;
};

std::pair<Var, Var> lstm_cell(Graph& g, Var x, Var h_prev, Var c_prev, const LstmVars& p);

// Bidirectional pass with zero initial states; hidden is the per-direction
// state width. Returns one 2*hidden vector per position.
std::vector<Var> bilstm(Graph& g, const std::vector<Var>& xs, const LstmVars& fwd,
                        const LstmVars& bwd, std::size_t hidden);

}  // namespace tbsa
