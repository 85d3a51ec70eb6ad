#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tbsa/tensor.hpp"

namespace tbsa {

// One optimizer slot: a parameter tensor plus its gradient accumulator.
struct ParamSlot {
  Tensor* value = nullptr;
  Tensor* grad = nullptr;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.9;
  double eps = 1e-8;
};

// Adam with bias correction: one shared step counter, first/second moments
// kept per tensor. Caller owns the schedule and passes lr per step.
class Adam {
 public:
  explicit Adam(std::vector<ParamSlot> slots, AdamConfig cfg = {});

  void step(double lr);
  void zero_grads();

  std::int64_t steps_taken() const { return step_; }

 private:
  std::vector<ParamSlot> slots_;
  AdamConfig cfg_;
  std::int64_t step_ = 0;
  std::vector<Tensor> m_, v_;
};

// Rescales all gradients in place so their combined L2 norm is at most
// max_norm (no-op when max_norm <= 0). Returns the pre-clip norm.
double clip_global_norm(const std::vector<ParamSlot>& slots, double max_norm);

}  // namespace tbsa
