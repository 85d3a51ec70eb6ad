#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "tbsa/rng.hpp"

namespace tbsa {

// Dense row-major tensor of doubles. Rank 1 (vectors) and rank 2 (matrices)
// cover everything the model needs. Double precision by default so training
// is deterministic and the finite-difference checks are meaningful.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);  // zero-filled
  static Tensor vec(std::initializer_list<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  std::size_t rows() const;
  std::size_t cols() const;

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  void fill(double v);
  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  std::string shape_str() const;

  bool operator==(const Tensor& o) const = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// --- elementary numeric operations ---

// W·x, no bias. W is out×in, x has length in.
Tensor linear(const Tensor& w, const Tensor& x);

// Shift-invariant stable softmax over a rank-1 tensor.
Tensor softmax(const Tensor& v);

Tensor sigmoid(const Tensor& v);
Tensor tanh_vec(const Tensor& v);

// −log p[y] with p[y] clamped below at kLogClamp.
inline constexpr double kLogClamp = 1e-12;
double cross_entropy(const Tensor& p, std::size_t y);

// Inverted dropout: each entry zeroed with probability rate, survivors scaled
// by 1/(1−rate). Inference (training=false) is the identity.
Tensor dropout(const Tensor& v, double rate, Rng& rng, bool training);

// Mask of 0 / 1/(1−rate) entries; the multiplicative form used in training.
Tensor dropout_mask(std::size_t n, double rate, Rng& rng);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(const Tensor& v);

// Entries i.i.d. U(−a, a), a = sqrt(6/(rows+cols)).
Tensor glorot_init(std::size_t rows, std::size_t cols, Rng& rng);

Tensor uniform_matrix(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng);
Tensor uniform_vector(std::size_t n, double lo, double hi, Rng& rng);

}  // namespace tbsa
