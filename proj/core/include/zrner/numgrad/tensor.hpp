#pragma once

#include <memory>

#include "zrner/numgrad/matrix.hpp"

namespace zrner::numgrad {

// A shared handle to a value and (optionally) its gradient. Copies alias the
// same storage, so a parameter captured by the tape is updated in place by
// the optimizer.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Matrix value, bool requires_grad = false);

  // Trainable leaf with a zero-initialized gradient buffer.
  static Tensor parameter(Matrix value);
  // Non-trainable leaf.
  static Tensor constant(Matrix value) { return Tensor(std::move(value), false); }

  bool defined() const { return node_ != nullptr; }
  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on);

  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  std::size_t rows() const { return node_->value.rows(); }
  std::size_t cols() const { return node_->value.cols(); }
  Shape shape() const { return node_->value.shape(); }
  double item() const;

  bool has_grad() const { return !node_->grad.empty(); }
  const Matrix& grad() const { return node_->grad; }
  // Gradient buffer, allocated (zeroed) on first access.
  Matrix& grad_buffer() const;
  void zero_grad();
  void drop_grad() { node_->grad = Matrix(); }

  bool same_node(const Tensor& other) const { return node_ == other.node_; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
  };
  std::shared_ptr<Node> node_;
};

}  // namespace zrner::numgrad
