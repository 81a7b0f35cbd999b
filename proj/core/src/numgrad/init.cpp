#include "zrner/numgrad/init.hpp"

#include <cmath>

namespace zrner::numgrad {

Matrix uniform_fan_in(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng) {
  const double bound = std::sqrt(1.0 / static_cast<double>(fan_in ? fan_in : 1));
  Matrix m(rows, cols);
  for (double& v : m.values()) v = (2.0 * uniform01(rng) - 1.0) * bound;
  return m;
}

Affine Affine::create(std::size_t in, std::size_t out, Rng& rng) {
  return {Tensor::parameter(uniform_fan_in(in, out, in, rng)), Tensor::parameter(Matrix(1, out))};
}

Tensor Affine::apply(Tape& tape, const Tensor& x) const {
  return tape.add_bias(tape.matmul(x, weight), bias);
}

}  // namespace zrner::numgrad
