#include "zrner/corpus/batch.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "zrner/error.hpp"

namespace zrner::corpus {

std::size_t Batch::token_count() const {
  std::size_t n = 0;
  for (const auto* s : sentences) n += s->size();
  return n;
}

Batch make_batch(std::vector<const AnnotatedSentence*> sentences) {
  Batch b;
  b.sentences = std::move(sentences);
  for (const auto* s : b.sentences) b.max_length = std::max(b.max_length, s->size());
  for (const auto* s : b.sentences) {
    std::vector<std::uint8_t> row(b.max_length, 0);
    std::fill_n(row.begin(), s->size(), 1);
    b.mask.push_back(std::move(row));
  }
  return b;
}

namespace {

std::vector<Batch> cut(std::span<const AnnotatedSentence> sentences,
                       const std::vector<std::size_t>& order, std::size_t size) {
  if (size == 0) throw ContractError("batch: size must be at least 1");
  std::vector<Batch> batches;
  for (std::size_t begin = 0; begin < order.size(); begin += size) {
    std::vector<const AnnotatedSentence*> members;
    for (std::size_t i = begin; i < std::min(order.size(), begin + size); ++i) {
      members.push_back(&sentences[order[i]]);
    }
    batches.push_back(make_batch(std::move(members)));
  }
  return batches;
}

}  // namespace

std::vector<Batch> batch(std::span<const AnnotatedSentence> sentences, std::size_t size,
                         std::uint64_t shuffle_seed) {
  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  // Fisher-Yates driven by raw generator output so the permutation does not
  // depend on the standard library's distribution implementation.
  std::mt19937_64 rng(shuffle_seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return cut(sentences, order, size);
}

std::vector<Batch> batch_in_order(std::span<const AnnotatedSentence> sentences, std::size_t size) {
  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  return cut(sentences, order, size);
}

}  // namespace zrner::corpus
