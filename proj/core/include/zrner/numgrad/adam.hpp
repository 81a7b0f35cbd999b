#pragma once

#include <cstdint>
#include <vector>

#include "zrner/numgrad/tensor.hpp"

namespace zrner::numgrad {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment accumulators for a fixed parameter list.
struct AdamState {
  AdamConfig config;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::uint64_t step = 0;

  static AdamState for_parameters(const std::vector<Tensor>& params, AdamConfig config = {});
};

// One bias-corrected Adam update over `params`, then zeroes their gradients.
// Throws ContractError if a parameter has no gradient buffer or the state
// does not match the parameter shapes.
void adam_step(std::vector<Tensor>& params, AdamState& state);

}  // namespace zrner::numgrad
