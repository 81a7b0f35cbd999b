#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zrner/corpus/sentence.hpp"

namespace zrner::corpus {

// A group of sentences processed together. Sentences keep their own lengths;
// `mask` is the padded [size x max_length] view with 1 on real tokens.
struct Batch {
  std::vector<const AnnotatedSentence*> sentences;
  std::size_t max_length = 0;
  std::vector<std::vector<std::uint8_t>> mask;

  std::size_t size() const { return sentences.size(); }
  std::size_t token_count() const;
};

Batch make_batch(std::vector<const AnnotatedSentence*> sentences);

// Shuffles sentence order with `shuffle_seed` and cuts consecutive batches of
// `size`; the last batch may be smaller. The batches point into `sentences`.
std::vector<Batch> batch(std::span<const AnnotatedSentence> sentences, std::size_t size,
                         std::uint64_t shuffle_seed);

// Same cut without shuffling, in input order.
std::vector<Batch> batch_in_order(std::span<const AnnotatedSentence> sentences, std::size_t size);

}  // namespace zrner::corpus
