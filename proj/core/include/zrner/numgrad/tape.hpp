#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "zrner/numgrad/tensor.hpp"

namespace zrner::numgrad {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one generator draw.
double uniform01(Rng& rng);

// Records differentiable operations in execution order; backward() replays
// them in reverse. A tape is used by one thread for one forward/backward pass
// and then cleared. Parameters are plain Tensors owned elsewhere and survive
// clear().
class Tape {
 public:
  // Receives the gradient of the op's output; accumulates into its inputs.
  using BackwardFn = std::function<void(const Matrix& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Checked mode (default on) raises NumericError when an op produces NaN/Inf.
  void set_checked(bool on) { checked_ = on; }
  bool checked() const { return checked_; }

  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }

  // Populates gradients of every requires_grad tensor reachable from `loss`.
  void backward(const Tensor& loss);

  // Extension point for fused operations. The backward rule is only recorded
  // when at least one input requires a gradient.
  Tensor record(std::string_view op, Matrix value, std::initializer_list<Tensor> inputs,
                BackwardFn backward);
  Tensor record(std::string_view op, Matrix value, std::span<const Tensor> inputs,
                BackwardFn backward);

  Tensor matmul(const Tensor& a, const Tensor& b);
  Tensor add(const Tensor& a, const Tensor& b);
  Tensor sub(const Tensor& a, const Tensor& b);
  Tensor mul(const Tensor& a, const Tensor& b);
  Tensor scale(const Tensor& x, double factor);
  // x[m x n] + bias[1 x n] broadcast over rows.
  Tensor add_bias(const Tensor& x, const Tensor& bias);
  // x[m x n] * s[m x 1] broadcast over columns.
  Tensor scale_rows(const Tensor& x, const Tensor& s);
  Tensor tanh(const Tensor& x);
  Tensor sigmoid(const Tensor& x);
  Tensor log(const Tensor& x);

  Tensor concat_cols(std::span<const Tensor> parts);
  Tensor concat_rows(std::span<const Tensor> parts);
  Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end);
  Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end);

  // Row-wise reductions and normalizations.
  Tensor softmax(const Tensor& x);
  Tensor log_softmax(const Tensor& x);
  Tensor logsumexp(const Tensor& x);  // [m x n] -> [m x 1]

  Tensor sum(const Tensor& x);        // -> [1 x 1]
  Tensor mean_rows(const Tensor& x);  // [m x n] -> [1 x n]
  // out[i] = x[i, cols[i]], shape [m x 1].
  Tensor pick(const Tensor& x, std::span<const int> cols);

  // Inverted dropout. Identity when !training or rate == 0.
  Tensor dropout(const Tensor& x, double rate, Rng& rng, bool training);

  Tensor embedding_lookup(const Tensor& table, std::size_t index);
  Tensor gather_rows(const Tensor& table, std::span<const std::size_t> indices);

 private:
  struct Entry {
    Tensor output;
    BackwardFn backward;
  };

  Tensor finish(std::string_view op, Matrix value, bool needs_grad);

  std::vector<Entry> entries_;
  bool checked_ = true;
};

}  // namespace zrner::numgrad
