#include "zrner/corpus/sentence.hpp"

#include "zrner/error.hpp"

namespace zrner::corpus {

TagSequence derive_task1_labels(std::span<const int> tags_task2, const TagScheme& scheme) {
  TagSequence out;
  out.reserve(tags_task2.size());
  for (int t : tags_task2) out.push_back(scheme.task1_tag(t));
  return out;
}

std::vector<int> derive_gate_labels(std::span<const int> tags_task2, const TagScheme& scheme) {
  std::vector<int> out;
  out.reserve(tags_task2.size());
  for (int t : tags_task2) out.push_back(scheme.gate_label(t));
  return out;
}

AnnotatedSentence annotate(std::vector<std::string> tokens, TagSequence tags_task2,
                           const TagScheme& scheme) {
  if (tokens.empty()) throw ValidationError("sentence has no tokens");
  if (tokens.size() != tags_task2.size()) {
    throw ValidationError("sentence has " + std::to_string(tokens.size()) + " tokens but " +
                          std::to_string(tags_task2.size()) + " tags");
  }
  for (int t : tags_task2) {
    if (t < 0 || static_cast<std::size_t>(t) >= scheme.task2().size()) {
      throw TagError("tag id " + std::to_string(t) + " out of range");
    }
  }
  if (const long bad = first_iob_violation(tags_task2); bad >= 0) {
    throw ValidationError("invalid IOB transition at token " + std::to_string(bad) + " ('" +
                          scheme.task2().name(tags_task2[bad]) + "')");
  }
  AnnotatedSentence s;
  s.tags_task1 = derive_task1_labels(tags_task2, scheme);
  s.gate_labels = derive_gate_labels(tags_task2, scheme);
  s.tokens = std::move(tokens);
  s.tags_task2 = std::move(tags_task2);
  return s;
}

AnnotatedSentence unlabeled(std::vector<std::string> tokens, const TagScheme& scheme) {
  TagSequence tags(tokens.size(), TagSet::outside());
  return annotate(std::move(tokens), std::move(tags), scheme);
}

}  // namespace zrner::corpus
