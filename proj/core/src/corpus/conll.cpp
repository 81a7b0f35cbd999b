#include "zrner/corpus/conll.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "zrner/error.hpp"

namespace zrner::corpus {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string f;
  while (ss >> f) fields.push_back(f);
  return fields;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

// Iterates sentences as lists of (line number, fields).
template <typename OnSentence>
void for_each_block(std::istream& in, OnSentence&& on_sentence) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> block;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) {
      if (!block.empty()) on_sentence(block);
      block.clear();
      continue;
    }
    if (fields.front() == "-DOCSTART-") continue;
    block.emplace_back(line_no, std::move(fields));
  }
  if (!block.empty()) on_sentence(block);
}

}  // namespace

std::vector<AnnotatedSentence> parse_conll(std::istream& in, const TagScheme& scheme,
                                           ConllOptions options) {
  std::vector<AnnotatedSentence> sentences;
  for_each_block(in, [&](const auto& block) {
    std::vector<std::string> tokens;
    TagSequence tags;
    for (const auto& [line_no, fields] : block) {
      const long n = static_cast<long>(fields.size());
      const long col = options.column < 0 ? n + options.column : options.column;
      const long needed = options.column < 0 ? 1 - options.column : options.column + 1;
      if (n < 2 || col < 0 || col >= n) {
        throw ParseError("expected at least " + std::to_string(std::max(needed, 2L)) +
                             " columns, found " + std::to_string(n),
                         line_no);
      }
      tokens.push_back(fields[0]);
      try {
        tags.push_back(scheme.task2().id(fields[col]));
      } catch (const TagError&) {
        throw TagError("unknown tag '" + fields[col] + "'", line_no);
      }
    }
    if (options.repair) {
      tags = repair_iob(tags);
    } else if (const long bad = first_iob_violation(tags); bad >= 0) {
      throw ValidationError("invalid IOB transition to '" + scheme.task2().name(tags[bad]) + "'",
                            block[bad].first);
    }
    sentences.push_back(annotate(std::move(tokens), std::move(tags), scheme));
  });
  return sentences;
}

std::vector<AnnotatedSentence> read_conll(const std::filesystem::path& path,
                                          const TagScheme& scheme, ConllOptions options) {
  auto in = open_input(path);
  return parse_conll(in, scheme, options);
}

std::vector<std::vector<std::string>> parse_tokens(std::istream& in) {
  std::vector<std::vector<std::string>> sentences;
  for_each_block(in, [&](const auto& block) {
    std::vector<std::string> tokens;
    for (const auto& entry : block) tokens.push_back(entry.second.front());
    sentences.push_back(std::move(tokens));
  });
  return sentences;
}

std::vector<std::vector<std::string>> read_tokens(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_tokens(in);
}

void write_conll(std::ostream& out, std::span<const AnnotatedSentence> sentences,
                 const TagScheme& scheme) {
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << s.tokens[i] << ' ' << scheme.task2().name(s.tags_task2[i]) << '\n';
    }
    out << '\n';
  }
}

void write_conll(std::ostream& out, std::span<const std::vector<std::string>> tokens,
                 std::span<const TagSequence> tags, const TagSet& tag_set) {
  if (tokens.size() != tags.size()) throw ContractError("write_conll: sentence count mismatch");
  for (std::size_t s = 0; s < tokens.size(); ++s) {
    if (tokens[s].size() != tags[s].size()) {
      throw ContractError("write_conll: length mismatch in sentence " + std::to_string(s));
    }
    for (std::size_t i = 0; i < tokens[s].size(); ++i) {
      out << tokens[s][i] << ' ' << tag_set.name(tags[s][i]) << '\n';
    }
    out << '\n';
  }
}

}  // namespace zrner::corpus
