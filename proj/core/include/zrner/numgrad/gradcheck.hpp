#pragma once

#include <functional>
#include <vector>

#include "zrner/numgrad/tape.hpp"

namespace zrner::numgrad {

struct ParameterCheck {
  std::size_t parameter = 0;
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;  // at worst_index
  double numeric = 0.0;   // at worst_index
  std::size_t failures = 0;
};

struct GradCheckReport {
  std::vector<ParameterCheck> parameters;
  double tolerance = 0.0;

  bool passed() const;
  double max_relative_error() const;
};

// Builds a scalar loss on the supplied tape. Must be deterministic: any
// randomness inside has to be reseeded on every call.
using LossFunction = std::function<Tensor(Tape&)>;

// Compares reverse-mode gradients with central differences
// (f(x+h) - f(x-h)) / 2h for every component of every parameter. The
// relative error of a component is |a - b| / max(1, |a|, |b|).
GradCheckReport finite_difference_check(const LossFunction& f, std::vector<Tensor> params,
                                        double h = 1e-5, double tolerance = 1e-4);

}  // namespace zrner::numgrad
