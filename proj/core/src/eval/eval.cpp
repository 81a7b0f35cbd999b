#include "zrner/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "zrner/error.hpp"

namespace zrner::eval {

namespace {

std::vector<std::string> categories_of(const TagSet& tag_set) {
  std::vector<std::string> cats;
  for (std::size_t id = 1; id < tag_set.size(); id += 2) {
    cats.push_back(tag_set.name(static_cast<int>(id)).substr(2));
  }
  return cats;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string signed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f", v);
  return buf;
}

}  // namespace

std::vector<EntitySpan> extract_spans(std::span<const int> tags, const TagSet& tag_set,
                                      bool repair) {
  TagSequence seq(tags.begin(), tags.end());
  if (repair) {
    seq = corpus::repair_iob(seq);
  } else if (const long bad = corpus::first_iob_violation(seq); bad >= 0) {
    throw ValidationError("invalid IOB sequence at position " + std::to_string(bad) + " ('" +
                          tag_set.name(seq[bad]) + "')");
  }
  const auto cats = categories_of(tag_set);
  std::vector<EntitySpan> spans;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!TagSet::is_begin(seq[i])) continue;
    const int cat = TagSet::category(seq[i]);
    std::size_t end = i + 1;
    while (end < seq.size() && seq[end] == TagSet::inside_of(cat)) ++end;
    spans.push_back({i, end, cats.at(cat)});
    i = end - 1;
  }
  return spans;
}

TagSequence spans_to_tags(std::span<const EntitySpan> spans, std::size_t length,
                          const TagSet& tag_set) {
  const auto cats = categories_of(tag_set);
  TagSequence tags(length, TagSet::outside());
  for (const auto& s : spans) {
    auto it = std::find(cats.begin(), cats.end(), s.category);
    if (it == cats.end() || s.start >= s.end || s.end > length) {
      throw ContractError("spans_to_tags: bad span for category '" + s.category + "'");
    }
    const int c = static_cast<int>(it - cats.begin());
    tags[s.start] = TagSet::begin_of(c);
    for (std::size_t i = s.start + 1; i < s.end; ++i) tags[i] = TagSet::inside_of(c);
  }
  return tags;
}

Score Score::from_counts(std::size_t tp, std::size_t predicted, std::size_t gold) {
  Score s;
  s.true_positives = tp;
  s.predicted = predicted;
  s.gold = gold;
  s.precision = predicted ? 100.0 * static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
  s.recall = gold ? 100.0 * static_cast<double>(tp) / static_cast<double>(gold) : 0.0;
  const double denom = s.precision + s.recall;
  s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

const Score* F1Report::category(const std::string& name) const {
  for (const auto& [cat, score] : categories) {
    if (cat == name) return &score;
  }
  return nullptr;
}

F1Report f1(std::span<const TagSequence> gold, std::span<const TagSequence> pred,
            const TagSet& tag_set) {
  if (gold.size() != pred.size()) {
    throw ContractError("f1: " + std::to_string(gold.size()) + " gold sentences vs " +
                        std::to_string(pred.size()) + " predicted");
  }
  const auto cats = categories_of(tag_set);
  std::vector<std::size_t> tp(cats.size()), n_pred(cats.size()), n_gold(cats.size());
  F1Report report;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size()) {
      throw ContractError("f1: sentence " + std::to_string(s) + " has " +
                          std::to_string(gold[s].size()) + " gold tags but " +
                          std::to_string(pred[s].size()) + " predicted");
    }
    report.tokens += gold[s].size();
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      if (gold[s][i] == pred[s][i]) ++report.correct_tokens;
    }
    auto gold_spans = extract_spans(gold[s], tag_set, true);
    auto pred_spans = extract_spans(pred[s], tag_set, true);
    auto index_of = [&](const std::string& c) {
      return static_cast<std::size_t>(std::find(cats.begin(), cats.end(), c) - cats.begin());
    };
    for (const auto& g : gold_spans) ++n_gold[index_of(g.category)];
    for (const auto& p : pred_spans) {
      const std::size_t c = index_of(p.category);
      ++n_pred[c];
      if (std::find(gold_spans.begin(), gold_spans.end(), p) != gold_spans.end()) ++tp[c];
    }
  }
  std::size_t all_tp = 0, all_pred = 0, all_gold = 0;
  for (std::size_t c = 0; c < cats.size(); ++c) {
    report.categories.emplace_back(cats[c], Score::from_counts(tp[c], n_pred[c], n_gold[c]));
    all_tp += tp[c];
    all_pred += n_pred[c];
    all_gold += n_gold[c];
  }
  report.micro = Score::from_counts(all_tp, all_pred, all_gold);
  return report;
}

F1Report f1(std::span<const corpus::AnnotatedSentence> gold,
            std::span<const corpus::AnnotatedSentence> pred, const corpus::TagScheme& scheme) {
  if (gold.size() != pred.size()) {
    throw ContractError("f1: " + std::to_string(gold.size()) + " gold sentences vs " +
                        std::to_string(pred.size()) + " predicted");
  }
  std::vector<TagSequence> g, p;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].tokens.size() != pred[s].tokens.size()) {
      throw ContractError("f1: sentence " + std::to_string(s) + " differs in length");
    }
    g.push_back(gold[s].tags_task2);
    p.push_back(pred[s].tags_task2);
  }
  return f1(g, p, scheme.task2());
}

Comparison compare(std::span<const std::pair<std::string, F1Report>> reports,
                   const std::string& baseline) {
  if (reports.size() < 2) throw ContractError("compare: needs at least two reports");
  auto base = std::find_if(reports.begin(), reports.end(),
                           [&](const auto& r) { return r.first == baseline; });
  if (base == reports.end()) throw ContractError("compare: no report named '" + baseline + "'");
  Comparison out;
  out.baseline = baseline;
  for (const auto& [name, report] : reports) {
    ComparisonRow row;
    row.name = name;
    row.micro_f1 = report.micro.f1;
    row.delta = report.micro.f1 - base->second.micro.f1;
    for (const auto& [cat, score] : report.categories) {
      row.category_f1.emplace_back(cat, score.f1);
      const Score* b = base->second.category(cat);
      row.category_delta.emplace_back(cat, b ? score.f1 - b->f1 : score.f1);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string format_report(const F1Report& report) {
  std::ostringstream out;
  out << "processed " << report.tokens << " tokens with " << report.micro.gold
      << " phrases; found: " << report.micro.predicted << " phrases; correct: "
      << report.micro.true_positives << ".\n";
  const double accuracy =
      report.tokens ? 100.0 * static_cast<double>(report.correct_tokens) / report.tokens : 0.0;
  out << "accuracy: " << fixed2(accuracy) << "%; precision: " << fixed2(report.micro.precision)
      << "%; recall: " << fixed2(report.micro.recall) << "%; FB1: " << fixed2(report.micro.f1)
      << '\n';
  for (const auto& [cat, s] : report.categories) {
    char line[160];
    std::snprintf(line, sizeof line, "%17s: precision: %6.2f%%; recall: %6.2f%%; FB1: %6.2f  %zu\n",
                  cat.c_str(), s.precision, s.recall, s.f1, s.predicted);
    out << line;
  }
  return out.str();
}

std::string report_json(const F1Report& report) {
  auto score_json = [](const Score& s) {
    return nlohmann::ordered_json{{"tp", s.true_positives}, {"predicted", s.predicted},
                                  {"gold", s.gold},         {"precision", s.precision},
                                  {"recall", s.recall},     {"f1", s.f1}};
  };
  nlohmann::ordered_json j;
  j["micro"] = score_json(report.micro);
  j["tokens"] = report.tokens;
  j["correct_tokens"] = report.correct_tokens;
  nlohmann::ordered_json cats = nlohmann::ordered_json::object();
  for (const auto& [cat, s] : report.categories) cats[cat] = score_json(s);
  j["categories"] = cats;
  return j.dump();
}

std::string format_comparison(const Comparison& comparison) {
  std::ostringstream out;
  std::size_t width = 8;
  for (const auto& row : comparison.rows) width = std::max(width, row.name.size());
  out << std::string(width - 5, ' ') << "model  micro-F1    delta";
  if (!comparison.rows.empty()) {
    for (const auto& [cat, f] : comparison.rows.front().category_f1) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "  %8s", cat.c_str());
      out << buf;
    }
  }
  out << "   (deltas vs " << comparison.baseline << ")\n";
  for (const auto& row : comparison.rows) {
    out << std::string(width - row.name.size(), ' ') << row.name << "  " << fixed2(row.micro_f1)
        << std::string(row.micro_f1 < 10 ? 5 : row.micro_f1 < 100 ? 4 : 3, ' ')
        << signed2(row.delta);
    for (const auto& [cat, d] : row.category_delta) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "  %8s", signed2(d).c_str());
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace zrner::eval
