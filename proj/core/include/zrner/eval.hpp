#pragma once

#include <compare>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zrner/corpus/sentence.hpp"

namespace zrner::eval {

using corpus::TagSequence;
using corpus::TagSet;

// Half-open token range [start, end) labeled with an entity category.
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string category;

  auto operator<=>(const EntitySpan&) const = default;
};

// Maximal IOB spans: B-C (or, with repair, a stray I-C) opens a span that
// absorbs the following I-C tags. Throws ValidationError on an invalid
// sequence unless `repair` is set.
std::vector<EntitySpan> extract_spans(std::span<const int> tags, const TagSet& tag_set,
                                      bool repair = false);
// Inverse of extract_spans for valid sequences.
TagSequence spans_to_tags(std::span<const EntitySpan> spans, std::size_t length,
                          const TagSet& tag_set);

struct Score {
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  // Percentages. Precision (recall) is 0 when nothing was predicted (gold).
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static Score from_counts(std::size_t tp, std::size_t predicted, std::size_t gold);
};

struct F1Report {
  std::vector<std::pair<std::string, Score>> categories;  // tag-set order
  Score micro;
  std::size_t tokens = 0;
  std::size_t correct_tokens = 0;

  const Score* category(const std::string& name) const;
};

// Exact-match entity scoring (start, end and category must agree). Both
// sides are repaired before span extraction. Throws ContractError naming the
// first misaligned sentence.
F1Report f1(std::span<const TagSequence> gold, std::span<const TagSequence> pred,
            const TagSet& tag_set);
F1Report f1(std::span<const corpus::AnnotatedSentence> gold,
            std::span<const corpus::AnnotatedSentence> pred, const corpus::TagScheme& scheme);

struct ComparisonRow {
  std::string name;
  double micro_f1 = 0.0;
  double delta = 0.0;  // versus the baseline row
  std::vector<std::pair<std::string, double>> category_f1;
  std::vector<std::pair<std::string, double>> category_delta;
};

struct Comparison {
  std::string baseline;
  std::vector<ComparisonRow> rows;
};

// Aligns micro and per-category F1 of named reports against `baseline`.
Comparison compare(std::span<const std::pair<std::string, F1Report>> reports,
                   const std::string& baseline);

std::string format_report(const F1Report& report);
std::string report_json(const F1Report& report);
std::string format_comparison(const Comparison& comparison);

}  // namespace zrner::eval
