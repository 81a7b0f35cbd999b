#include "zrner/corpus/vocabulary.hpp"

#include "zrner/error.hpp"

namespace zrner::corpus {

Vocabulary::Vocabulary() {
  add(kPadToken);
  add(kUnkToken);
}

std::size_t Vocabulary::add(const std::string& word) {
  auto [it, inserted] = index_.emplace(word, words_.size());
  if (inserted) {
    words_.push_back(word);
    counts_.push_back(0);
  }
  return it->second;
}

Vocabulary Vocabulary::build(std::span<const AnnotatedSentence> training) {
  Vocabulary v;
  for (const auto& s : training)
    for (const auto& tok : s.tokens) ++v.counts_[v.add(tok)];
  v.counts_[kPad] = v.counts_[kUnk] = 0;
  return v;
}

Vocabulary Vocabulary::from_words(std::vector<std::string> words) {
  if (words.size() < 2 || words[kPad] != kPadToken || words[kUnk] != kUnkToken) {
    throw FormatError("vocabulary must start with the padding and unknown specials");
  }
  Vocabulary v;
  for (std::size_t i = 2; i < words.size(); ++i) {
    if (v.add(words[i]) != i) throw FormatError("duplicate vocabulary entry '" + words[i] + "'");
  }
  return v;
}

std::size_t Vocabulary::lookup(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? kUnk : it->second;
}

}  // namespace zrner::corpus
