#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace zrner::corpus {

using TagSequence = std::vector<int>;

// One IOB tag inventory. Id 0 is always "O"; category c (0-based) owns
// B at 2c+1 and I at 2c+2.
class TagSet {
 public:
  TagSet() = default;
  explicit TagSet(std::vector<std::string> categories);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int id) const;
  // Throws TagError for unknown names.
  int id(const std::string& name) const;
  bool contains(const std::string& name) const { return ids_.count(name) != 0; }

  static constexpr int outside() { return 0; }
  static bool is_outside(int id) { return id == 0; }
  static bool is_begin(int id) { return id > 0 && id % 2 == 1; }
  static bool is_inside(int id) { return id > 0 && id % 2 == 0; }
  // 0-based entity category of a B/I tag; -1 for O.
  static int category(int id) { return id == 0 ? -1 : (id - 1) / 2; }
  static int begin_of(int category) { return 2 * category + 1; }
  static int inside_of(int category) { return 2 * category + 2; }

  // An I-X tag may only follow B-X or I-X; everything else may follow anything.
  static bool allowed_after(int prev, int next);
  static bool allowed_at_start(int next) { return !is_inside(next); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
};

// Tag inventories for the full NER task, the entity-detection task, and the
// expert gate. Expert id 0 is the non-entity expert "O"; entity category c
// maps to expert c+1.
class TagScheme {
 public:
  TagScheme() = default;
  explicit TagScheme(std::vector<std::string> entity_categories);

  // PER, LOC, ORG, MISC.
  static TagScheme conll2003();

  const std::vector<std::string>& entity_categories() const { return categories_; }
  const TagSet& task2() const { return task2_; }
  // {O, B-ENT, I-ENT}, or just {O} when there are no entity categories.
  const TagSet& task1() const { return task1_; }
  const std::vector<std::string>& expert_categories() const { return experts_; }
  std::size_t num_experts() const { return experts_.size(); }
  int expert_id(const std::string& category) const;

  // Maps a task-2 tag id to its task-1 / gate counterpart.
  int task1_tag(int task2_id) const;
  int gate_label(int task2_id) const;

  friend bool operator==(const TagScheme& a, const TagScheme& b) {
    return a.categories_ == b.categories_;
  }

 private:
  std::vector<std::string> categories_;
  TagSet task2_;
  TagSet task1_;
  std::vector<std::string> experts_;
};

// Returns the index of the first tag that violates IOB order, or -1.
long first_iob_violation(std::span<const int> tags);
bool is_valid_iob(std::span<const int> tags);
// Rewrites every I-X that follows an incompatible tag into B-X.
TagSequence repair_iob(std::span<const int> tags);

}  // namespace zrner::corpus
