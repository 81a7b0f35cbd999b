#pragma once

#include <span>
#include <vector>

#include "zrner/corpus/tag_scheme.hpp"
#include "zrner/numgrad/init.hpp"

namespace zrner::crf {

using corpus::TagSequence;
using numgrad::Matrix;
using numgrad::Rng;
using numgrad::Tape;
using numgrad::Tensor;

// Linear-chain CRF layer: an affine emission projection plus tag transition
// scores. transitions(a, b) scores moving from tag a to tag b; start and stop
// score the first and last tag of a sequence.
struct CrfHead {
  numgrad::Affine projection;  // [in x K]
  Tensor transitions;          // [K x K]
  Tensor start;                // [1 x K]
  Tensor stop;                 // [1 x K]

  // Fan-in uniform projection; transitions, start and stop start at zero.
  static CrfHead create(std::size_t input_dim, std::size_t num_tags, Rng& rng);
  // Head with given chain scores and a zero projection (input_dim 1), for
  // working directly on emission matrices.
  static CrfHead from_scores(Matrix transitions, Matrix start, Matrix stop);

  std::size_t num_tags() const { return transitions.rows(); }
  std::size_t input_dim() const { return projection.input_dim(); }
  std::vector<Tensor> parameters() const;

  // [n x in] -> [n x K]
  Tensor emissions(Tape& tape, const Tensor& features) const;
};

// Additive decode-time penalties on transitions and on the first tag.
struct DecodeConstraints {
  Matrix transitions;  // [K x K]
  Matrix start;        // [1 x K]
};

// Penalizes every transition that would produce an invalid IOB sequence
// (I-X after anything but B-X / I-X, or I-X first) with `penalty`.
DecodeConstraints iob_constraints(const corpus::TagSet& tags, double penalty = -1e4);

struct ViterbiResult {
  TagSequence tags;
  double score = 0.0;
};

// --- value-level algorithms --------------------------------------------------

// start[t0] + sum_i emissions[i, t_i] + sum_i T[t_i, t_i+1] + stop[t_n-1]
double sequence_score(const Matrix& emissions, std::span<const int> tags, const CrfHead& head);
// log of the sum over all K^n tag sequences of exp(sequence_score), by the
// forward recursion.
double log_partition(const Matrix& emissions, const CrfHead& head);
// Highest-scoring sequence. Among equal scores the lowest tag id wins, both
// for the final tag and at every back-pointer.
ViterbiResult viterbi(const Matrix& emissions, const CrfHead& head,
                      const DecodeConstraints* constraints = nullptr);

// Exhaustive oracles. Throw GuardError when K^n exceeds `limit`.
inline constexpr double kBruteForceLimit = 1e6;
double brute_force_log_partition(const Matrix& emissions, const CrfHead& head,
                                 double limit = kBruteForceLimit);
ViterbiResult brute_force_best(const Matrix& emissions, const CrfHead& head,
                               double limit = kBruteForceLimit);

// --- differentiable ops --------------------------------------------------------

Tensor sequence_score(Tape& tape, const Tensor& emissions, std::span<const int> tags,
                      const CrfHead& head);
Tensor log_partition(Tape& tape, const Tensor& emissions, const CrfHead& head);
// Log-partition restricted to sequences with tag `tag` at `position`.
Tensor constrained_log_partition(Tape& tape, const Tensor& emissions, const CrfHead& head,
                                 std::size_t position, int tag);
// Sequence negative log-likelihood: log_partition - sequence_score(gold).
Tensor nll(Tape& tape, const Tensor& emissions, std::span<const int> gold, const CrfHead& head);
// Token-level alternative: sum_i -log p(y_i = gold_i | x) under the CRF marginals.
Tensor marginal_nll(Tape& tape, const Tensor& emissions, std::span<const int> gold,
                    const CrfHead& head);

}  // namespace zrner::crf
