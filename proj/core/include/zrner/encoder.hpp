#pragma once

#include <span>
#include <string>
#include <vector>

#include "zrner/corpus/ngram.hpp"
#include "zrner/corpus/vectors.hpp"
#include "zrner/corpus/vocabulary.hpp"
#include "zrner/numgrad/tape.hpp"

namespace zrner::encoder {

using numgrad::Rng;
using numgrad::Tape;
using numgrad::Tensor;

// Word embeddings plus a hashed character n-gram table for words outside the
// vocabulary. Freezing stops gradients to the word table only; the n-gram
// table always trains.
class EmbeddingLayer {
 public:
  // Rows of in-vocabulary words found in `vectors` are copied from it; the
  // remaining rows are drawn from the fan-in uniform init. The padding row is
  // zero and the n-gram table starts at zero.
  static EmbeddingLayer create(const corpus::Vocabulary& vocab, std::size_t dim,
                               const corpus::PretrainedVectors* vectors,
                               const corpus::NgramConfig& ngram, bool frozen, Rng& rng);

  std::size_t dim() const { return table.cols(); }
  bool frozen() const { return !table.requires_grad(); }
  void set_frozen(bool on);
  std::vector<Tensor> trainable_parameters() const;

  // [n x dim]. Ids equal to Vocabulary::kUnk are composed from `words`.
  // Dropout is applied in training mode.
  Tensor embed(Tape& tape, std::span<const std::size_t> ids, std::span<const std::string> words,
               bool training, double dropout, Rng* rng) const;

  Tensor table;   // [|V| x dim]
  Tensor ngrams;  // [buckets x dim]
  corpus::NgramConfig ngram;
  std::size_t pretrained_rows = 0;
};

// Standard LSTM cell. Gate blocks in the 4H-wide matrices are ordered
// input, forget, candidate, output.
struct LstmCell {
  Tensor w_input;   // [in x 4H]
  Tensor w_hidden;  // [H x 4H]
  Tensor bias;      // [1 x 4H]

  // Fan-in uniform weights, zero bias except +1 on the forget block.
  static LstmCell create(std::size_t input_dim, std::size_t hidden, Rng& rng);

  std::size_t input_dim() const { return w_input.rows(); }
  std::size_t hidden_size() const { return w_hidden.rows(); }
  std::vector<Tensor> parameters() const { return {w_input, w_hidden, bias}; }
};

struct LstmState {
  Tensor h;  // [1 x H]
  Tensor c;  // [1 x H]
};

LstmState zero_state(std::size_t hidden);

// One step from input row x [1 x in].
LstmState lstm_step(Tape& tape, const LstmCell& cell, const Tensor& x, const LstmState& prev);

// Runs the cell over the rows of `inputs` ([n x in]) left-to-right, or
// right-to-left when `reverse`; row i of the result is the state after
// consuming position i.
Tensor run_lstm(Tape& tape, const LstmCell& cell, const Tensor& inputs, bool reverse);

// Stacked bidirectional LSTM. Layer l > 0 consumes the concatenated
// [forward | backward] output of layer l-1.
class BiLstmEncoder {
 public:
  static BiLstmEncoder create(std::size_t input_dim, std::size_t hidden, std::size_t layers,
                              Rng& rng);

  std::size_t input_dim() const { return forward.front().input_dim(); }
  std::size_t hidden_size() const { return forward.front().hidden_size(); }
  std::size_t output_dim() const { return 2 * hidden_size(); }
  std::size_t num_layers() const { return forward.size(); }
  std::vector<Tensor> parameters() const;

  // [n x d] -> [n x 2H]. Dropout (training only) sits between layers.
  Tensor encode(Tape& tape, const Tensor& embeddings, bool training, double dropout,
                Rng* rng) const;

  std::vector<LstmCell> forward;
  std::vector<LstmCell> backward;
};

}  // namespace zrner::encoder
