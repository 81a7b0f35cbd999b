#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zrner/numgrad/init.hpp"

namespace zrner::moee {

using numgrad::Affine;
using numgrad::Rng;
using numgrad::Tape;
using numgrad::Tensor;

// One affine expert per expert category (entity categories plus the
// non-entity expert) and a softmax gate over them, both reading the encoder
// state h_i.
struct ExpertBank {
  std::vector<Affine> experts;  // each [in x expert_dim]
  Affine gate;                  // [in x E]

  static ExpertBank create(std::size_t input_dim, std::size_t expert_dim, std::size_t num_experts,
                           Rng& rng);

  std::size_t num_experts() const { return experts.size(); }
  std::size_t input_dim() const { return gate.input_dim(); }
  std::size_t expert_dim() const { return experts.front().output_dim(); }
  std::vector<Tensor> parameters() const;
};

struct MoeeOutput {
  Tensor meta;                   // [n x expert_dim]
  Tensor alpha;                  // [n x E], rows sum to 1
  Tensor log_alpha;              // [n x E], log-softmax of the gate logits
  std::vector<Tensor> features;  // E tensors of [n x expert_dim]
};

// Slot a holds L^a(h) for every position.
std::vector<Tensor> expert_features(Tape& tape, const Tensor& h, const ExpertBank& bank);
Tensor gate_logits(Tape& tape, const Tensor& h, const ExpertBank& bank);
// Row-wise softmax of the gate projection.
Tensor gate(Tape& tape, const Tensor& h, const ExpertBank& bank);
// m_i = sum_a alpha[i, a] * features[a][i].
Tensor combine(Tape& tape, std::span<const Tensor> features, const Tensor& alpha);
MoeeOutput run(Tape& tape, const Tensor& h, const ExpertBank& bank);

// Mean of -log alpha[i, label_i] over positions with mask[i] != 0. Zero when
// every position is masked.
Tensor gate_loss(Tape& tape, const Tensor& alpha, std::span<const int> labels,
                 std::span<const std::uint8_t> mask);
// Same loss from log-probabilities (numerically safer for training).
Tensor gate_loss_from_log_probs(Tape& tape, const Tensor& log_alpha, std::span<const int> labels,
                                std::span<const std::uint8_t> mask);

}  // namespace zrner::moee
