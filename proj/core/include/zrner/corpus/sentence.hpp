#pragma once

#include <span>
#include <string>
#include <vector>

#include "zrner/corpus/tag_scheme.hpp"

namespace zrner::corpus {

// A tokenized sentence with its full-task tags and the two label sequences
// derived from them. All four sequences share one length n >= 1.
struct AnnotatedSentence {
  std::vector<std::string> tokens;
  TagSequence tags_task2;
  TagSequence tags_task1;
  std::vector<int> gate_labels;

  std::size_t size() const { return tokens.size(); }
};

// B-C -> B-ENT, I-C -> I-ENT, O -> O.
TagSequence derive_task1_labels(std::span<const int> tags_task2, const TagScheme& scheme);
// B-C, I-C -> expert of C; O -> expert O.
std::vector<int> derive_gate_labels(std::span<const int> tags_task2, const TagScheme& scheme);

// Builds a sentence and derives its task-1 and gate labels. Throws
// ValidationError on length mismatch, empty input or an invalid IOB sequence.
AnnotatedSentence annotate(std::vector<std::string> tokens, TagSequence tags_task2,
                           const TagScheme& scheme);

// Sentence carrying tokens only (all tags O), used for unlabeled input.
AnnotatedSentence unlabeled(std::vector<std::string> tokens, const TagScheme& scheme);

}  // namespace zrner::corpus
