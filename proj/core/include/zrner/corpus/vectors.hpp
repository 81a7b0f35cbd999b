#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace zrner::corpus {

// Word vectors in the fastText/word2vec text format: a "count dim" header,
// then one "word v1 ... vd" row per line.
class PretrainedVectors {
 public:
  std::size_t dimension() const { return dimension_; }
  std::size_t declared_count() const { return declared_count_; }
  std::size_t size() const { return index_.size(); }
  bool contains(const std::string& word) const { return index_.count(word) != 0; }
  // Empty span when the word is absent.
  std::span<const double> lookup(const std::string& word) const;

  static PretrainedVectors parse(std::istream& in);
  static PretrainedVectors load(const std::filesystem::path& path);

 private:
  std::size_t dimension_ = 0;
  std::size_t declared_count_ = 0;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline PretrainedVectors load_vectors(const std::filesystem::path& path) {
  return PretrainedVectors::load(path);
}

}  // namespace zrner::corpus
