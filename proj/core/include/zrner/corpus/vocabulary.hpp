#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "zrner/corpus/sentence.hpp"

namespace zrner::corpus {

// Word index over source-domain training tokens. Index 0 is padding, 1 is
// unknown; words follow in order of first occurrence.
class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary();
  static Vocabulary build(std::span<const AnnotatedSentence> training);
  // Rebuilds from an index -> word list (specials first), as stored in checkpoints.
  static Vocabulary from_words(std::vector<std::string> words);

  std::size_t size() const { return words_.size(); }
  // Total: unseen words map to kUnk.
  std::size_t lookup(const std::string& word) const;
  bool contains(const std::string& word) const { return index_.count(word) != 0; }
  const std::string& word(std::size_t index) const { return words_.at(index); }
  const std::vector<std::string>& words() const { return words_; }
  // Training-set frequency of the word at `index` (0 for specials / rebuilt vocabularies).
  std::size_t count(std::size_t index) const { return index < counts_.size() ? counts_[index] : 0; }

 private:
  std::size_t add(const std::string& word);

  std::vector<std::string> words_;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace zrner::corpus
