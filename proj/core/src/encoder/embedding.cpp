#include <algorithm>
#include <cmath>

#include "zrner/encoder.hpp"
#include "zrner/error.hpp"
#include "zrner/numgrad/init.hpp"

namespace zrner::encoder {

using numgrad::Matrix;

EmbeddingLayer EmbeddingLayer::create(const corpus::Vocabulary& vocab, std::size_t dim,
                                      const corpus::PretrainedVectors* vectors,
                                      const corpus::NgramConfig& ngram, bool frozen, Rng& rng) {
  if (dim == 0) throw ContractError("EmbeddingLayer: dimension must be positive");
  if (vectors && vectors->dimension() != dim) {
    throw ContractError("EmbeddingLayer: vectors have dimension " +
                        std::to_string(vectors->dimension()) + ", layer expects " +
                        std::to_string(dim));
  }
  EmbeddingLayer layer;
  layer.ngram = ngram;
  Matrix table(vocab.size(), dim);
  const double bound = std::sqrt(1.0 / static_cast<double>(dim));
  for (std::size_t i = corpus::Vocabulary::kUnk; i < vocab.size(); ++i) {
    auto row = table.row(i);
    const auto pretrained = vectors ? vectors->lookup(vocab.word(i)) : std::span<const double>{};
    if (!pretrained.empty()) {
      std::copy(pretrained.begin(), pretrained.end(), row.begin());
      ++layer.pretrained_rows;
    } else {
      for (double& v : row) v = (2.0 * numgrad::uniform01(rng) - 1.0) * bound;
    }
  }
  layer.table = Tensor::parameter(std::move(table));
  layer.ngrams = Tensor::parameter(Matrix(ngram.buckets, dim));
  layer.set_frozen(frozen);
  return layer;
}

void EmbeddingLayer::set_frozen(bool on) {
  table.set_requires_grad(!on);
  if (!on) table.grad_buffer();
}

std::vector<Tensor> EmbeddingLayer::trainable_parameters() const {
  if (frozen()) return {ngrams};
  return {table, ngrams};
}

Tensor EmbeddingLayer::embed(Tape& tape, std::span<const std::size_t> ids,
                             std::span<const std::string> words, bool training, double dropout,
                             Rng* rng) const {
  if (ids.empty()) throw ContractError("embed: empty sentence");
  if (ids.size() != words.size()) throw ContractError("embed: ids and words differ in length");

  const bool any_oov =
      std::find(ids.begin(), ids.end(), corpus::Vocabulary::kUnk) != ids.end();
  Tensor out;
  if (!any_oov) {
    out = tape.gather_rows(table, ids);
  } else {
    std::vector<Tensor> rows;
    rows.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] != corpus::Vocabulary::kUnk) {
        rows.push_back(tape.embedding_lookup(table, ids[i]));
      } else {
        const auto buckets = corpus::ngram_rows(words[i], ngram);
        rows.push_back(tape.mean_rows(tape.gather_rows(ngrams, buckets)));
      }
    }
    out = tape.concat_rows(rows);
  }
  if (training && dropout > 0.0) {
    if (!rng) throw ContractError("embed: dropout in training mode needs a generator");
    out = tape.dropout(out, dropout, *rng, true);
  }
  return out;
}

}  // namespace zrner::encoder
