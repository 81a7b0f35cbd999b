#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "zrner/error.hpp"
#include "zrner/model.hpp"

namespace zrner::model {

namespace {

std::string format_bool(bool v) { return v ? "true" : "false"; }

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw FormatError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

template <typename T>
T parse_unsigned(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end || value.empty() ||
      v > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) {
    throw FormatError("config key '" + key + "': expected a non-negative integer, got '" + value +
                      "'");
  }
  return static_cast<T>(v);
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end || value.empty() || !std::isfinite(v)) {
    throw FormatError("config key '" + key + "': expected a finite number, got '" + value + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<std::pair<std::string, std::string>> to_key_values(const ModelConfig& c) {
  return {
      {"embedding_dim", std::to_string(c.embedding_dim)},
      {"hidden_size", std::to_string(c.hidden_size)},
      {"num_layers", std::to_string(c.num_layers)},
      {"expert_dim", std::to_string(c.expert_dim)},
      {"dropout", format_double(c.dropout)},
      {"mtl", format_bool(c.mtl)},
      {"moee", format_bool(c.moee)},
      {"crf2_concat_hidden", format_bool(c.crf2_concat_hidden)},
      {"freeze_embeddings", format_bool(c.freeze_embeddings)},
      {"ngram.min_n", std::to_string(c.ngram.min_n)},
      {"ngram.max_n", std::to_string(c.ngram.max_n)},
      {"ngram.buckets", std::to_string(c.ngram.buckets)},
      {"ngram.seed", std::to_string(c.ngram.seed)},
  };
}

std::vector<std::pair<std::string, std::string>> to_key_values(const TrainConfig& c) {
  return {
      {"learning_rate", format_double(c.learning_rate)},
      {"batch_size", std::to_string(c.batch_size)},
      {"epochs", std::to_string(c.epochs)},
      {"patience", std::to_string(c.patience)},
      {"seed", std::to_string(c.seed)},
      {"weights.task1", format_double(c.weights.task1)},
      {"weights.task2", format_double(c.weights.task2)},
      {"weights.gate", format_double(c.weights.gate)},
      {"gate_include_outside", format_bool(c.gate_include_outside)},
      {"token_ce_on_marginals", format_bool(c.token_ce_on_marginals)},
      {"oov_train_rate", format_double(c.oov_train_rate)},
  };
}

bool set_key(ModelConfig& c, const std::string& key, const std::string& value) {
  if (key == "embedding_dim") c.embedding_dim = parse_unsigned<std::size_t>(key, value);
  else if (key == "hidden_size") c.hidden_size = parse_unsigned<std::size_t>(key, value);
  else if (key == "num_layers") c.num_layers = parse_unsigned<std::size_t>(key, value);
  else if (key == "expert_dim") c.expert_dim = parse_unsigned<std::size_t>(key, value);
  else if (key == "dropout") c.dropout = parse_double(key, value);
  else if (key == "mtl") c.mtl = parse_bool(key, value);
  else if (key == "moee") c.moee = parse_bool(key, value);
  else if (key == "crf2_concat_hidden") c.crf2_concat_hidden = parse_bool(key, value);
  else if (key == "freeze_embeddings") c.freeze_embeddings = parse_bool(key, value);
  else if (key == "ngram.min_n") c.ngram.min_n = parse_unsigned<std::size_t>(key, value);
  else if (key == "ngram.max_n") c.ngram.max_n = parse_unsigned<std::size_t>(key, value);
  else if (key == "ngram.buckets") c.ngram.buckets = parse_unsigned<std::size_t>(key, value);
  else if (key == "ngram.seed") c.ngram.seed = parse_unsigned<std::uint32_t>(key, value);
  else return false;
  return true;
}

bool set_key(TrainConfig& c, const std::string& key, const std::string& value) {
  if (key == "learning_rate") c.learning_rate = parse_double(key, value);
  else if (key == "batch_size") c.batch_size = parse_unsigned<std::size_t>(key, value);
  else if (key == "epochs") c.epochs = parse_unsigned<std::size_t>(key, value);
  else if (key == "patience") c.patience = parse_unsigned<std::size_t>(key, value);
  else if (key == "seed") c.seed = parse_unsigned<std::uint64_t>(key, value);
  else if (key == "weights.task1") c.weights.task1 = parse_double(key, value);
  else if (key == "weights.task2") c.weights.task2 = parse_double(key, value);
  else if (key == "weights.gate") c.weights.gate = parse_double(key, value);
  else if (key == "gate_include_outside") c.gate_include_outside = parse_bool(key, value);
  else if (key == "token_ce_on_marginals") c.token_ce_on_marginals = parse_bool(key, value);
  else if (key == "oov_train_rate") c.oov_train_rate = parse_double(key, value);
  else return false;
  return true;
}

void validate(const ModelConfig& c) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw FormatError("model config: " + what);
  };
  need(c.embedding_dim > 0, "embedding_dim must be positive");
  need(c.hidden_size > 0, "hidden_size must be positive");
  need(c.num_layers > 0, "num_layers must be positive");
  need(c.expert_dim > 0, "expert_dim must be positive");
  need(c.dropout >= 0.0 && c.dropout < 1.0, "dropout must lie in [0, 1)");
  need(c.ngram.min_n > 0 && c.ngram.min_n <= c.ngram.max_n, "need 0 < ngram.min_n <= ngram.max_n");
  need(c.ngram.buckets > 0, "ngram.buckets must be positive");
}

void validate(const TrainConfig& c) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw FormatError("train config: " + what);
  };
  need(c.learning_rate > 0.0, "learning_rate must be positive");
  need(c.batch_size > 0, "batch_size must be positive");
  need(c.weights.task1 >= 0.0 && c.weights.task2 >= 0.0 && c.weights.gate >= 0.0,
       "loss weights must be non-negative");
  need(c.oov_train_rate >= 0.0 && c.oov_train_rate <= 1.0, "oov_train_rate must lie in [0, 1]");
}

}  // namespace zrner::model
