#pragma once

// Seeded generators and fixtures shared by the unit and acceptance suites.

#include <filesystem>
#include <string>
#include <vector>

#include "zrner/corpus/conll.hpp"
#include "zrner/crf.hpp"
#include "zrner/model.hpp"
#include "zrner/numgrad/tape.hpp"

namespace zrner::testing {

using numgrad::Matrix;
using numgrad::Rng;

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(ZRNER_TEST_DATA_DIR) / name;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * numgrad::uniform01(rng);
}

inline std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = uniform(rng, lo, hi);
  return m;
}

inline std::vector<int> random_tags(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<int> tags(n);
  for (int& t : tags) t = static_cast<int>(rng() % k);
  return tags;
}

inline crf::CrfHead random_head(std::size_t k, Rng& rng, double scale = 1.0) {
  return crf::CrfHead::from_scores(random_matrix(k, k, rng, -scale, scale),
                                   random_matrix(1, k, rng, -scale, scale),
                                   random_matrix(1, k, rng, -scale, scale));
}

// Random valid IOB sequence over `categories` entity types.
inline std::vector<int> random_iob(std::size_t n, std::size_t categories, Rng& rng) {
  std::vector<int> tags(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = rng() % 4;
    if (r == 0 || categories == 0) {
      tags[i] = 0;
    } else if (r == 1 && i > 0 && tags[i - 1] != 0) {
      tags[i] = corpus::TagSet::inside_of(corpus::TagSet::category(tags[i - 1]));
    } else {
      tags[i] = corpus::TagSet::begin_of(static_cast<int>(rng() % categories));
    }
  }
  return tags;
}

inline std::vector<corpus::AnnotatedSentence> synthetic_corpus() {
  return corpus::read_conll(data_path("synthetic_train.conll"), corpus::TagScheme::conll2003());
}

// Small model configuration for fast tests.
inline model::ModelConfig tiny_config(std::size_t dim = 6, std::size_t hidden = 4,
                                      std::size_t expert = 5) {
  model::ModelConfig c;
  c.embedding_dim = dim;
  c.hidden_size = hidden;
  c.num_layers = 1;
  c.expert_dim = expert;
  c.dropout = 0.0;
  c.ngram.buckets = 64;
  return c;
}

}  // namespace zrner::testing
