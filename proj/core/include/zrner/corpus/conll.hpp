#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "zrner/corpus/sentence.hpp"

namespace zrner::corpus {

struct ConllOptions {
  // Field holding the tag; negative counts from the end (-1 = last column).
  int column = -1;
  // Rewrite I-X after an incompatible tag into B-X instead of failing.
  bool repair = false;
};

// CoNLL reader: whitespace-separated columns, blank lines between sentences,
// lines whose first field is "-DOCSTART-" skipped. Errors carry 1-based line
// numbers.
std::vector<AnnotatedSentence> parse_conll(std::istream& in, const TagScheme& scheme,
                                           ConllOptions options = {});
std::vector<AnnotatedSentence> read_conll(const std::filesystem::path& path,
                                          const TagScheme& scheme, ConllOptions options = {});

// Token column only; any further columns are ignored.
std::vector<std::vector<std::string>> parse_tokens(std::istream& in);
std::vector<std::vector<std::string>> read_tokens(const std::filesystem::path& path);

// Writes "token tag" lines with single-space separation and a blank line
// after each sentence.
void write_conll(std::ostream& out, std::span<const AnnotatedSentence> sentences,
                 const TagScheme& scheme);
void write_conll(std::ostream& out, std::span<const std::vector<std::string>> tokens,
                 std::span<const TagSequence> tags, const TagSet& tag_set);

}  // namespace zrner::corpus
