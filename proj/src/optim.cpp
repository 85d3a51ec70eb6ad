#include "tbsa/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace tbsa {

Adam::Adam(std::vector<ParamSlot> slots, AdamConfig cfg)
    : slots_(std::move(slots)), cfg_(cfg) {
  m_.reserve(slots_.size());
  v_.reserve(slots_.size());
  for (const ParamSlot& s : slots_) {
    if (!s.value || !s.grad || !s.value->same_shape(*s.grad)) {
      throw std::invalid_argument("Adam: bad param slot");
    }
    m_.emplace_back(s.value->shape());
    v_.emplace_back(s.value->shape());
  }
}

void Adam::step(double lr) {
  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    Tensor& w = *slots_[k].value;
    const Tensor& g = *slots_[k].grad;
    Tensor& m = m_[k];
    Tensor& v = v_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      w[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg_.eps);
    }
  }
}

void Adam::zero_grads() {
  for (ParamSlot& s : slots_) s.grad->fill(0.0);
}

double clip_global_norm(const std::vector<ParamSlot>& slots, double max_norm) {
  double sq = 0.0;
  for (const ParamSlot& s : slots) {
    for (std::size_t i = 0; i < s.grad->size(); ++i) sq += (*s.grad)[i] * (*s.grad)[i];
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double k = max_norm / norm;
    for (const ParamSlot& s : slots) {
      for (std::size_t i = 0; i < s.grad->size(); ++i) (*s.grad)[i] *= k;
    }
  }
  return norm;
}

}  // namespace tbsa
