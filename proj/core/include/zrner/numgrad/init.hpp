#pragma once

#include "zrner/numgrad/tape.hpp"

namespace zrner::numgrad {

// Uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)) fill of a rows x cols matrix.
Matrix uniform_fan_in(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng);

// Affine map x W + b over row-vector inputs.
struct Affine {
  Tensor weight;  // [in x out]
  Tensor bias;    // [1 x out]

  // Weight from uniform_fan_in(in), zero bias.
  static Affine create(std::size_t in, std::size_t out, Rng& rng);

  std::size_t input_dim() const { return weight.rows(); }
  std::size_t output_dim() const { return weight.cols(); }
  Tensor apply(Tape& tape, const Tensor& x) const;
};

}  // namespace zrner::numgrad
