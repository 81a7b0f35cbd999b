#include "zrner/moee.hpp"

#include <cmath>
#include <string>

#include "zrner/error.hpp"

namespace zrner::moee {

using numgrad::Matrix;

ExpertBank ExpertBank::create(std::size_t input_dim, std::size_t expert_dim,
                              std::size_t num_experts, Rng& rng) {
  if (num_experts == 0 || expert_dim == 0) {
    throw ContractError("ExpertBank: need at least one expert of positive width");
  }
  ExpertBank bank;
  for (std::size_t a = 0; a < num_experts; ++a) {
    bank.experts.push_back(Affine::create(input_dim, expert_dim, rng));
  }
  bank.gate = Affine::create(input_dim, num_experts, rng);
  return bank;
}

std::vector<Tensor> ExpertBank::parameters() const {
  std::vector<Tensor> params;
  for (const auto& e : experts) {
    params.push_back(e.weight);
    params.push_back(e.bias);
  }
  params.push_back(gate.weight);
  params.push_back(gate.bias);
  return params;
}

namespace {

void check_input(const Tensor& h, const ExpertBank& bank, const char* op) {
  if (h.cols() != bank.input_dim()) {
    throw ContractError(std::string(op) + ": input " + numgrad::to_string(h.shape()) +
                        " does not match bank input width " + std::to_string(bank.input_dim()));
  }
}

}  // namespace

std::vector<Tensor> expert_features(Tape& tape, const Tensor& h, const ExpertBank& bank) {
  check_input(h, bank, "expert_features");
  std::vector<Tensor> out;
  out.reserve(bank.num_experts());
  for (const auto& expert : bank.experts) out.push_back(expert.apply(tape, h));
  return out;
}

Tensor gate_logits(Tape& tape, const Tensor& h, const ExpertBank& bank) {
  check_input(h, bank, "gate");
  return bank.gate.apply(tape, h);
}

Tensor gate(Tape& tape, const Tensor& h, const ExpertBank& bank) {
  return tape.softmax(gate_logits(tape, h, bank));
}

Tensor combine(Tape& tape, std::span<const Tensor> features, const Tensor& alpha) {
  if (features.empty() || features.size() != alpha.cols()) {
    throw ContractError("combine: " + std::to_string(features.size()) + " experts for gate " +
                        numgrad::to_string(alpha.shape()));
  }
  Tensor meta;
  for (std::size_t a = 0; a < features.size(); ++a) {
    if (features[a].rows() != alpha.rows() || features[a].shape() != features[0].shape()) {
      throw ContractError("combine: expert " + std::to_string(a) + " has shape " +
                          numgrad::to_string(features[a].shape()));
    }
    Tensor weighted = tape.scale_rows(features[a], tape.slice_cols(alpha, a, a + 1));
    meta = a == 0 ? weighted : tape.add(meta, weighted);
  }
  return meta;
}

MoeeOutput run(Tape& tape, const Tensor& h, const ExpertBank& bank) {
  MoeeOutput out;
  out.features = expert_features(tape, h, bank);
  const Tensor logits = gate_logits(tape, h, bank);
  out.alpha = tape.softmax(logits);
  out.log_alpha = tape.log_softmax(logits);
  out.meta = combine(tape, out.features, out.alpha);
  return out;
}

Tensor gate_loss_from_log_probs(Tape& tape, const Tensor& log_alpha, std::span<const int> labels,
                                std::span<const std::uint8_t> mask) {
  const std::size_t n = log_alpha.rows();
  if (labels.size() != n || mask.size() != n) {
    throw ContractError("gate_loss: " + std::to_string(labels.size()) + " labels / " +
                        std::to_string(mask.size()) + " mask entries for " + std::to_string(n) +
                        " positions");
  }
  std::vector<int> picked_cols(n);
  Matrix weights(n, 1);
  std::size_t active = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= log_alpha.cols()) {
      throw ContractError("gate_loss: label " + std::to_string(labels[i]) + " outside [0, " +
                          std::to_string(log_alpha.cols()) + ")");
    }
    picked_cols[i] = labels[i];
    if (mask[i]) ++active;
  }
  if (active == 0) return Tensor::constant(Matrix::scalar(0.0));
  for (std::size_t i = 0; i < n; ++i) weights[i] = mask[i] ? -1.0 / static_cast<double>(active) : 0.0;
  Tensor picked = tape.pick(log_alpha, picked_cols);
  return tape.sum(tape.mul(picked, Tensor::constant(std::move(weights))));
}

Tensor gate_loss(Tape& tape, const Tensor& alpha, std::span<const int> labels,
                 std::span<const std::uint8_t> mask) {
  const std::size_t n = alpha.rows();
  if (labels.size() != n || mask.size() != n) {
    throw ContractError("gate_loss: " + std::to_string(labels.size()) + " labels / " +
                        std::to_string(mask.size()) + " mask entries for " + std::to_string(n) +
                        " positions");
  }
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= alpha.cols()) {
      throw ContractError("gate_loss: label " + std::to_string(labels[i]) + " outside [0, " +
                          std::to_string(alpha.cols()) + ")");
    }
    if (mask[i]) active.push_back(i);
  }
  if (active.empty()) return Tensor::constant(Matrix::scalar(0.0));
  // Only the gold entries are logged, so zero probabilities elsewhere are fine.
  const double inv = 1.0 / static_cast<double>(active.size());
  double total = 0.0;
  for (std::size_t i : active) total -= std::log(alpha.value()(i, labels[i]));
  std::vector<int> gold(labels.begin(), labels.end());
  return tape.record("gate_loss", Matrix::scalar(total * inv), {alpha},
                     [alpha, gold = std::move(gold), active = std::move(active), inv](
                         const Matrix& g) {
                       Matrix& ga = alpha.grad_buffer();
                       for (std::size_t i : active) {
                         ga(i, gold[i]) -= g[0] * inv / alpha.value()(i, gold[i]);
                       }
                     });
}

}  // namespace zrner::moee
