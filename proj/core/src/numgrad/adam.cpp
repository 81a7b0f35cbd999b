#include "zrner/numgrad/adam.hpp"

#include <cmath>
#include <string>

#include "zrner/error.hpp"

namespace zrner::numgrad {

AdamState AdamState::for_parameters(const std::vector<Tensor>& params, AdamConfig config) {
  AdamState state;
  state.config = config;
  for (const auto& p : params) {
    state.first_moment.emplace_back(p.rows(), p.cols());
    state.second_moment.emplace_back(p.rows(), p.cols());
  }
  return state;
}

void adam_step(std::vector<Tensor>& params, AdamState& state) {
  if (params.size() != state.first_moment.size()) {
    throw ContractError("adam_step: state tracks " + std::to_string(state.first_moment.size()) +
                        " parameters, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].has_grad()) {
      throw ContractError("adam_step: parameter " + std::to_string(i) + " has no gradient");
    }
    if (params[i].shape() != state.first_moment[i].shape()) {
      throw ContractError("adam_step: parameter " + std::to_string(i) + " shape " +
                          to_string(params[i].shape()) + " does not match state " +
                          to_string(state.first_moment[i].shape()));
    }
  }

  ++state.step;
  const AdamConfig& cfg = state.config;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& value = params[i].mutable_value();
    Matrix& grad = params[i].grad_buffer();
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double g = grad[k];
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g;
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      value[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
    grad.fill(0.0);
  }
}

}  // namespace zrner::numgrad
