#include "zrner/numgrad/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "zrner/error.hpp"

namespace zrner::numgrad {

bool GradCheckReport::passed() const {
  return std::all_of(parameters.begin(), parameters.end(),
                     [](const ParameterCheck& p) { return p.failures == 0; });
}

double GradCheckReport::max_relative_error() const {
  double worst = 0.0;
  for (const auto& p : parameters) worst = std::max(worst, p.max_relative_error);
  return worst;
}

namespace {

double evaluate(const LossFunction& f) {
  Tape tape;
  return f(tape).item();
}

}  // namespace

GradCheckReport finite_difference_check(const LossFunction& f, std::vector<Tensor> params,
                                        double h, double tolerance) {
  if (!(h > 0.0)) throw ContractError("finite_difference_check: step must be positive");

  // Analytic pass. Gradients are restored afterwards so the check has no
  // side effect on accumulated training gradients.
  std::vector<Matrix> saved;
  for (auto& p : params) {
    if (!p.requires_grad()) {
      throw ContractError("finite_difference_check: parameter does not require grad");
    }
    saved.push_back(p.grad_buffer());
    p.zero_grad();
  }
  {
    Tape tape;
    Tensor loss = f(tape);
    tape.backward(loss);
  }
  std::vector<Matrix> analytic;
  for (std::size_t i = 0; i < params.size(); ++i) {
    analytic.push_back(params[i].grad());
    params[i].grad_buffer() = saved[i];
  }

  GradCheckReport report;
  report.tolerance = tolerance;
  for (std::size_t i = 0; i < params.size(); ++i) {
    ParameterCheck check;
    check.parameter = i;
    Matrix& value = params[i].mutable_value();
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double original = value[k];
      value[k] = original + h;
      const double plus = evaluate(f);
      value[k] = original - h;
      const double minus = evaluate(f);
      value[k] = original;

      const double numeric = (plus - minus) / (2.0 * h);
      const double a = analytic[i][k];
      const double rel =
          std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
      if (rel > tolerance) ++check.failures;
      if (rel >= check.max_relative_error) {
        check.max_relative_error = rel;
        check.worst_index = k;
        check.analytic = a;
        check.numeric = numeric;
      }
    }
    report.parameters.push_back(check);
  }
  return report;
}

}  // namespace zrner::numgrad
