#include "zrner/corpus/vectors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "zrner/error.hpp"

namespace zrner::corpus {

namespace {

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::span<const double> PretrainedVectors::lookup(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return {};
  return {data_.data() + it->second * dimension_, dimension_};
}

PretrainedVectors PretrainedVectors::parse(std::istream& in) {
  PretrainedVectors v;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing 'count dimension' header", 1);
  {
    std::istringstream header(line);
    std::string count, dim, extra;
    if (!(header >> count >> dim) || (header >> extra) ||
        !parse_number(count, v.declared_count_) || !parse_number(dim, v.dimension_) ||
        v.dimension_ == 0) {
      throw FormatError("malformed header '" + line + "', expected 'count dimension'", 1);
    }
  }

  std::size_t line_no = 1;
  std::vector<double> row(v.dimension_);
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string word;
    if (!(ss >> word)) continue;
    std::size_t d = 0;
    std::string field;
    while (ss >> field) {
      double value = 0.0;
      if (d >= v.dimension_) {
        ++d;
        continue;
      }
      if (!parse_number(field, value)) {
        throw FormatError("unparsable component '" + field + "'", line_no);
      }
      if (!std::isfinite(value)) throw FormatError("non-finite component", line_no);
      row[d++] = value;
    }
    if (d != v.dimension_) {
      throw FormatError("expected " + std::to_string(v.dimension_) + " components, found " +
                            std::to_string(d),
                        line_no);
    }
    if (v.index_.emplace(word, v.index_.size()).second) {
      v.data_.insert(v.data_.end(), row.begin(), row.end());
    }
  }
  if (v.index_.size() != v.declared_count_) {
    throw FormatError("header declares " + std::to_string(v.declared_count_) +
                      " vectors, file has " + std::to_string(v.index_.size()) + " distinct words");
  }
  return v;
}

PretrainedVectors PretrainedVectors::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vectors file '" + path.string() + "'");
  return parse(in);
}

}  // namespace zrner::corpus
