// Checkpoint layout (integers little-endian):
//   "ZRNERCKP" | u32 version | u32 section count
//   per section: u32 name length | name | u64 payload length | payload
//   u32 CRC-32 of every preceding byte
// Text sections hold UTF-8 key=value lines or length-prefixed strings;
// "params" holds named row-major float64 matrices.

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "zrner/error.hpp"
#include "zrner/model.hpp"

namespace zrner::model {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

namespace {

constexpr char kMagic[8] = {'Z', 'R', 'N', 'E', 'R', 'C', 'K', 'P'};

class Writer {
 public:
  template <typename T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    data_.append(buf, sizeof(T));
  }
  void put_string(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    data_ += s;
  }
  void put_raw(const void* p, std::size_t n) { data_.append(static_cast<const char*>(p), n); }
  std::string& data() { return data_; }

 private:
  std::string data_;
};

class Reader {
 public:
  Reader(std::string_view data, std::string section) : data_(data), section_(std::move(section)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    return std::string(get_bytes(n));
  }
  std::string_view get_bytes(std::size_t n) {
    need(n);
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  bool done() const { return pos_ == data_.size(); }
  [[noreturn]] void fail(const std::string& what) const { throw CheckpointError(section_, what); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail("unexpected end of data");
  }

  std::string_view data_;
  std::string section_;
  std::size_t pos_ = 0;
};

std::string key_values_text(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

template <typename Config>
Config parse_key_values(std::string_view text, const std::string& section) {
  Config config;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CheckpointError(section, "malformed line '" + line + "'");
    try {
      if (!set_key(config, line.substr(0, eq), line.substr(eq + 1))) {
        throw CheckpointError(section, "unknown key '" + line.substr(0, eq) + "'");
      }
    } catch (const FormatError& e) {
      throw CheckpointError(section, e.what());
    }
  }
  return config;
}

std::string string_list(const std::vector<std::string>& items) {
  Writer w;
  w.put<std::uint64_t>(items.size());
  for (const auto& s : items) w.put_string(s);
  return std::move(w.data());
}

std::vector<std::string> parse_string_list(std::string_view data, const std::string& section) {
  Reader r(data, section);
  const auto n = r.get<std::uint64_t>();
  std::vector<std::string> out;
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(r.get_string());
  if (!r.done()) r.fail("trailing bytes");
  return out;
}

}  // namespace

void save_checkpoint(const ZeroResourceNerModel& model, const TrainConfig* train_config,
                     std::ostream& out) {
  std::vector<std::pair<std::string, std::string>> sections;
  sections.emplace_back("config", key_values_text(to_key_values(model.config())));
  if (train_config) {
    sections.emplace_back("train_config", key_values_text(to_key_values(*train_config)));
  }
  sections.emplace_back("scheme", string_list(model.scheme().entity_categories()));
  sections.emplace_back("vocab", string_list(model.vocabulary().words()));
  Writer params;
  const auto named = model.named_parameters();
  params.put<std::uint64_t>(named.size());
  for (const auto& [name, t] : named) {
    params.put_string(name);
    params.put<std::uint64_t>(t.rows());
    params.put<std::uint64_t>(t.cols());
    params.put_raw(t.value().values().data(), t.value().values().size() * sizeof(double));
  }
  sections.emplace_back("params", std::move(params.data()));

  Writer w;
  w.put_raw(kMagic, sizeof kMagic);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(sections.size()));
  for (const auto& [name, payload] : sections) {
    w.put_string(name);
    w.put<std::uint64_t>(payload.size());
    w.put_raw(payload.data(), payload.size());
  }
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(w.data().data()), static_cast<uInt>(w.data().size())));
  w.put<std::uint32_t>(crc);
  out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
  if (!out) throw Error("checkpoint: write failed");
}

void save_checkpoint(const ZeroResourceNerModel& model, const TrainConfig* train_config,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  save_checkpoint(model, train_config, out);
}

LoadedCheckpoint load_checkpoint(std::istream& in, const corpus::TagScheme* expected_scheme) {
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  {
    Reader header(data, "header");
    if (header.get_bytes(sizeof kMagic) != std::string_view(kMagic, sizeof kMagic)) {
      header.fail("not a checkpoint file (bad magic)");
    }
    const auto version = header.get<std::uint32_t>();
    if (version != kCheckpointVersion) {
      header.fail("unsupported format version " + std::to_string(version) + " (expected " +
                  std::to_string(kCheckpointVersion) + ")");
    }
  }
  if (data.size() < sizeof kMagic + 12) throw CheckpointError("checksum", "file truncated");
  const std::size_t body = data.size() - sizeof(std::uint32_t);
  std::uint32_t stored;
  std::memcpy(&stored, data.data() + body, sizeof stored);
  const auto actual = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(body)));
  if (stored != actual) throw CheckpointError("checksum", "CRC mismatch (truncated or corrupted)");

  Reader r(std::string_view(data).substr(0, body), "header");
  r.get_bytes(sizeof kMagic);
  r.get<std::uint32_t>();
  const auto count = r.get<std::uint32_t>();
  std::map<std::string, std::string_view> sections;
  for (std::uint32_t i = 0; i < count; ++i) {
    auto name = r.get_string();
    const auto len = r.get<std::uint64_t>();
    sections[name] = r.get_bytes(len);
  }
  auto section = [&](const std::string& name) {
    auto it = sections.find(name);
    if (it == sections.end()) throw CheckpointError(name, "missing");
    return it->second;
  };

  const auto config = parse_key_values<ModelConfig>(section("config"), "config");
  std::optional<TrainConfig> train_config;
  if (sections.count("train_config")) {
    train_config = parse_key_values<TrainConfig>(sections["train_config"], "train_config");
  }
  const corpus::TagScheme scheme(parse_string_list(section("scheme"), "scheme"));
  if (expected_scheme && !(scheme == *expected_scheme)) {
    std::string stored_cats, wanted;
    for (const auto& c : scheme.entity_categories()) stored_cats += " " + c;
    for (const auto& c : expected_scheme->entity_categories()) wanted += " " + c;
    throw SchemeError("checkpoint tag scheme {" + stored_cats + " } does not match {" + wanted +
                      " }");
  }
  corpus::Vocabulary vocab;
  try {
    vocab = corpus::Vocabulary::from_words(parse_string_list(section("vocab"), "vocab"));
  } catch (const FormatError& e) {
    throw CheckpointError("vocab", e.what());
  }

  Rng scratch(0);
  LoadedCheckpoint loaded{
      ZeroResourceNerModel::create(config, scheme, std::move(vocab), nullptr, scratch),
      train_config};
  auto named = loaded.model.named_parameters();
  Reader p(section("params"), "params");
  const auto n = p.get<std::uint64_t>();
  if (n != named.size()) {
    p.fail("holds " + std::to_string(n) + " tensors, configuration needs " +
           std::to_string(named.size()));
  }
  for (auto& [name, tensor] : named) {
    const auto stored_name = p.get_string();
    if (stored_name != name) p.fail("expected tensor '" + name + "', found '" + stored_name + "'");
    const auto rows = p.get<std::uint64_t>();
    const auto cols = p.get<std::uint64_t>();
    if (rows != tensor.rows() || cols != tensor.cols()) {
      p.fail("tensor '" + name + "' has shape [" + std::to_string(rows) + " x " +
             std::to_string(cols) + "], expected " + numgrad::to_string(tensor.shape()));
    }
    const auto bytes = p.get_bytes(rows * cols * sizeof(double));
    auto& values = tensor.mutable_value().storage();
    std::memcpy(values.data(), bytes.data(), bytes.size());
  }
  if (!p.done()) p.fail("trailing bytes");
  return loaded;
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path,
                                 const corpus::TagScheme* expected_scheme) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
  return load_checkpoint(in, expected_scheme);
}

}  // namespace zrner::model
