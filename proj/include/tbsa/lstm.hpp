#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "tbsa/tensor.hpp"

namespace tbsa {

// One direction of an LSTM: per-gate weight matrices for the input and
// recurrent paths plus bias vectors. Gate order everywhere: input, forget,
// output, candidate.
struct LstmParams {
  Tensor wx_i, wh_i, b_i;
  Tensor wx_f, wh_f, b_f;
  Tensor wx_o, wh_o, b_o;
  Tensor wx_c, wh_c, b_c;
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;

  // Glorot-uniform weights, zero biases.
  static LstmParams glorot(std::size_t input, std::size_t hidden, Rng& rng);
};

// Standard LSTM gating: sigmoid input/forget/output gates, tanh candidate
// and cell output. Returns (h, c).
std::pair<Tensor, Tensor> lstm_cell(const Tensor& x, const Tensor& h_prev,
                                    const Tensor& c_prev, const LstmParams& p);

// output_t = concat(forward state at t, backward state at t); zero initial
// states in both directions. Both directions must share the hidden size.
std::vector<Tensor> bilstm(const std::vector<Tensor>& xs, const LstmParams& fwd,
                           const LstmParams& bwd);

}  // namespace tbsa
