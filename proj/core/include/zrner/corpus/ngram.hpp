#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "zrner/numgrad/matrix.hpp"

namespace zrner::corpus {

// Hashed character n-gram settings for out-of-vocabulary composition.
struct NgramConfig {
  std::size_t min_n = 3;
  std::size_t max_n = 6;
  std::size_t buckets = std::size_t{1} << 16;
  std::uint32_t seed = 0;
};

// Character n-grams (UTF-8 code points) of "<word>" with min_n <= n <= max_n,
// ordered by start position then length.
std::vector<std::string> char_ngrams(std::string_view word, std::size_t min_n, std::size_t max_n);

// 32-bit FNV-1a with the seed folded into the offset basis.
std::uint32_t ngram_hash(std::string_view text, std::uint32_t seed);

// Table rows used to compose `word`. Falls back to the whole "<word>" when no
// n-gram fits the length bounds.
std::vector<std::size_t> ngram_rows(std::string_view word, const NgramConfig& config);

// Mean of the n-gram rows of `table` for `word`.
std::vector<double> compose_oov_vector(std::string_view word, const numgrad::Matrix& table,
                                       const NgramConfig& config);

}  // namespace zrner::corpus
