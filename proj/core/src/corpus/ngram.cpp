#include "zrner/corpus/ngram.hpp"

#include "zrner/error.hpp"

namespace zrner::corpus {

namespace {

// Byte offsets of code point starts in `s`, plus s.size() as a sentinel.
std::vector<std::size_t> code_point_starts(std::string_view s) {
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) starts.push_back(i);
  }
  starts.push_back(s.size());
  return starts;
}

}  // namespace

std::vector<std::string> char_ngrams(std::string_view word, std::size_t min_n, std::size_t max_n) {
  const std::string bracketed = "<" + std::string(word) + ">";
  const auto starts = code_point_starts(bracketed);
  const std::size_t length = starts.size() - 1;
  std::vector<std::string> grams;
  for (std::size_t i = 0; i < length; ++i) {
    for (std::size_t n = min_n; n <= max_n && i + n <= length; ++n) {
      grams.push_back(bracketed.substr(starts[i], starts[i + n] - starts[i]));
    }
  }
  return grams;
}

std::uint32_t ngram_hash(std::string_view text, std::uint32_t seed) {
  std::uint32_t h = 2166136261u ^ seed;
  for (char c : text) {
    h ^= static_cast<std::uint32_t>(static_cast<std::int8_t>(c));
    h *= 16777619u;
  }
  return h;
}

std::vector<std::size_t> ngram_rows(std::string_view word, const NgramConfig& config) {
  if (config.buckets == 0) throw ContractError("ngram_rows: bucket count must be positive");
  auto grams = char_ngrams(word, config.min_n, config.max_n);
  if (grams.empty()) grams.push_back("<" + std::string(word) + ">");
  std::vector<std::size_t> rows;
  rows.reserve(grams.size());
  for (const auto& g : grams) rows.push_back(ngram_hash(g, config.seed) % config.buckets);
  return rows;
}

std::vector<double> compose_oov_vector(std::string_view word, const numgrad::Matrix& table,
                                       const NgramConfig& config) {
  if (word.empty()) throw ContractError("compose_oov_vector: empty word");
  if (table.rows() != config.buckets) {
    throw ContractError("compose_oov_vector: table has " + std::to_string(table.rows()) +
                        " rows, config expects " + std::to_string(config.buckets));
  }
  const auto rows = ngram_rows(word, config);
  std::vector<double> out(table.cols(), 0.0);
  for (std::size_t r : rows) {
    const auto src = table.row(r);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += src[c];
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (double& v : out) v *= inv;
  return out;
}

}  // namespace zrner::corpus
