#include "zrner/corpus/tag_scheme.hpp"

#include <set>

#include "zrner/error.hpp"

namespace zrner::corpus {

TagSet::TagSet(std::vector<std::string> categories) {
  names_.push_back("O");
  for (const auto& c : categories) {
    names_.push_back("B-" + c);
    names_.push_back("I-" + c);
  }
  for (std::size_t i = 0; i < names_.size(); ++i) ids_.emplace(names_[i], static_cast<int>(i));
}

const std::string& TagSet::name(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= names_.size()) {
    throw TagError("tag id " + std::to_string(id) + " out of range");
  }
  return names_[id];
}

int TagSet::id(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) throw TagError("unknown tag '" + name + "'");
  return it->second;
}

bool TagSet::allowed_after(int prev, int next) {
  if (!is_inside(next)) return true;
  return !is_outside(prev) && category(prev) == category(next);
}

TagScheme::TagScheme(std::vector<std::string> entity_categories)
    : categories_(std::move(entity_categories)) {
  std::set<std::string> seen;
  for (const auto& c : categories_) {
    if (c.empty() || c == "O" || c.find_first_of(" \t\n") != std::string::npos) {
      throw TagError("invalid entity category '" + c + "'");
    }
    if (!seen.insert(c).second) throw TagError("duplicate entity category '" + c + "'");
  }
  task2_ = TagSet(categories_);
  task1_ = categories_.empty() ? TagSet(std::vector<std::string>{}) : TagSet(std::vector<std::string>{"ENT"});
  experts_.push_back("O");
  experts_.insert(experts_.end(), categories_.begin(), categories_.end());
}

TagScheme TagScheme::conll2003() { return TagScheme({"PER", "LOC", "ORG", "MISC"}); }

int TagScheme::expert_id(const std::string& category) const {
  for (std::size_t i = 0; i < experts_.size(); ++i) {
    if (experts_[i] == category) return static_cast<int>(i);
  }
  throw TagError("unknown expert category '" + category + "'");
}

int TagScheme::task1_tag(int task2_id) const {
  if (TagSet::is_outside(task2_id)) return TagSet::outside();
  return TagSet::is_begin(task2_id) ? TagSet::begin_of(0) : TagSet::inside_of(0);
}

int TagScheme::gate_label(int task2_id) const { return TagSet::category(task2_id) + 1; }

long first_iob_violation(std::span<const int> tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const bool ok = i == 0 ? TagSet::allowed_at_start(tags[i])
                           : TagSet::allowed_after(tags[i - 1], tags[i]);
    if (!ok) return static_cast<long>(i);
  }
  return -1;
}

bool is_valid_iob(std::span<const int> tags) { return first_iob_violation(tags) < 0; }

TagSequence repair_iob(std::span<const int> tags) {
  TagSequence out(tags.begin(), tags.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool ok =
        i == 0 ? TagSet::allowed_at_start(out[i]) : TagSet::allowed_after(out[i - 1], out[i]);
    if (!ok) out[i] = TagSet::begin_of(TagSet::category(out[i]));
  }
  return out;
}

}  // namespace zrner::corpus
