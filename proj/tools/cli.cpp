#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "zrner/corpus/conll.hpp"
#include "zrner/eval.hpp"

namespace zrner::cli {

namespace fs = std::filesystem;

namespace {

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw UsageError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  std::size_t v = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (value.empty() || ec != std::errc() || ptr != end) {
    throw UsageError("config key '" + key + "': expected a non-negative integer, got '" + value +
                     "'");
  }
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

void require(const fs::path& value, const char* flag, const char* command) {
  if (value.empty()) throw UsageError(std::string(command) + ": " + flag + " is required");
}

std::string seed_header(std::uint64_t seed) { return "-DOCSTART- seed=" + std::to_string(seed); }

std::vector<corpus::AnnotatedSentence> read_labeled(const fs::path& path,
                                                    const corpus::TagScheme& scheme,
                                                    bool repair = false) {
  corpus::ConllOptions options;
  options.repair = repair;
  auto sentences = corpus::read_conll(path, scheme, options);
  if (sentences.empty()) throw DataError("no sentences in '" + path.string() + "'");
  return sentences;
}

std::string predictions_conll(const std::vector<corpus::AnnotatedSentence>& sentences,
                              const corpus::TagScheme& scheme, std::uint64_t seed) {
  std::ostringstream out;
  out << seed_header(seed) << "\n\n";
  corpus::write_conll(out, sentences, scheme);
  return out.str();
}

std::vector<corpus::AnnotatedSentence> predict_all(const model::ZeroResourceNerModel& m,
                                                   const std::vector<std::vector<std::string>>& tokens) {
  std::vector<corpus::AnnotatedSentence> out;
  out.reserve(tokens.size());
  for (const auto& p_tokens : tokens) {
    corpus::AnnotatedSentence s;
    s.tokens = p_tokens;
    s.tags_task2 = m.predict(p_tokens).tags;
    s.tags_task1 = corpus::derive_task1_labels(s.tags_task2, m.scheme());
    s.gate_labels = corpus::derive_gate_labels(s.tags_task2, m.scheme());
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::vector<std::string>> tokens_of(
    const std::vector<corpus::AnnotatedSentence>& sentences) {
  std::vector<std::vector<std::string>> out;
  for (const auto& s : sentences) out.push_back(s.tokens);
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct ReplicaOutcome {
  std::uint64_t seed = 0;
  model::TrainResult result;
  std::optional<double> test_f1;
};

// Trains one replica and writes its artifacts into `dir`.
ReplicaOutcome train_replica(const RunConfig& config, std::uint64_t seed, const fs::path& dir,
                             std::span<const corpus::AnnotatedSentence> train,
                             std::span<const corpus::AnnotatedSentence> dev,
                             std::span<const corpus::AnnotatedSentence> test,
                             const corpus::TagScheme& scheme,
                             const corpus::PretrainedVectors* vectors) {
  RunConfig resolved = config;
  resolved.train.seed = seed;
  resolved.out_dir = dir;
  fs::create_directories(dir);

  auto trained = model::train(train, dev, scheme, resolved.model, resolved.train, vectors);
  model::save_checkpoint(trained.model, &resolved.train, dir / "model.ckpt");

  std::ostringstream log;
  nlohmann::ordered_json header;
  header["seed"] = seed;
  header["command"] = "train";
  log << header.dump() << '\n';
  model::write_metrics_log(log, trained.result.log, resolved.log_timing);
  write_file(dir / "metrics.jsonl", log.str());
  write_file(dir / "config.txt", format_config(resolved, "train"));

  ReplicaOutcome outcome{seed, trained.result, std::nullopt};
  if (!test.empty()) {
    const auto predicted = predict_all(trained.model, tokens_of({test.begin(), test.end()}));
    const auto report = eval::f1(test, predicted, scheme);
    outcome.test_f1 = report.micro.f1;
    write_file(dir / "test_report.txt", format_report(report));
    write_file(dir / "test_report.json", eval::report_json(report));
    write_file(dir / "test_predictions.conll", predictions_conll(predicted, scheme, seed));
  }
  return outcome;
}

}  // namespace

// --- configuration -------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> to_key_values(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> kv = {
      {"train_file", c.train_file.string()},
      {"dev_file", c.dev_file.string()},
      {"test_file", c.test_file.string()},
      {"vectors_file", c.vectors_file.string()},
      {"checkpoint", c.checkpoint.string()},
      {"input_file", c.input_file.string()},
      {"gold_file", c.gold_file.string()},
      {"pred_file", c.pred_file.string()},
      {"out_dir", c.out_dir.string()},
      {"categories", c.categories},
      {"oov_only", c.oov_only ? "true" : "false"},
      {"gate", c.gate ? "true" : "false"},
      {"log_timing", c.log_timing ? "true" : "false"},
      {"seeds", std::to_string(c.seeds)},
  };
  for (auto& p : model::to_key_values(c.model)) kv.push_back(std::move(p));
  for (auto& p : model::to_key_values(c.train)) kv.push_back(std::move(p));
  return kv;
}

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "train_file") c.train_file = value;
  else if (key == "dev_file") c.dev_file = value;
  else if (key == "test_file") c.test_file = value;
  else if (key == "vectors_file") c.vectors_file = value;
  else if (key == "checkpoint") c.checkpoint = value;
  else if (key == "input_file") c.input_file = value;
  else if (key == "gold_file") c.gold_file = value;
  else if (key == "pred_file") c.pred_file = value;
  else if (key == "out_dir") c.out_dir = value;
  else if (key == "categories") c.categories = value;
  else if (key == "oov_only") c.oov_only = parse_bool(key, value);
  else if (key == "gate") c.gate = parse_bool(key, value);
  else if (key == "log_timing") c.log_timing = parse_bool(key, value);
  else if (key == "seeds") c.seeds = parse_count(key, value);
  else {
    try {
      if (model::set_key(c.model, key, value) || model::set_key(c.train, key, value)) return;
    } catch (const FormatError& e) {
      throw UsageError(e.what());
    }
    throw UsageError("unknown config key '" + key + "'");
  }
}

void load_config(RunConfig& config, std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      set_key(config, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void load_config_file(RunConfig& config, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path.string() + "'");
  load_config(config, in);
}

std::string format_config(const RunConfig& config, const std::string& command) {
  std::ostringstream out;
  out << "# zrner " << command << " seed=" << config.train.seed << '\n';
  for (const auto& [k, v] : to_key_values(config)) out << k << " = " << v << '\n';
  return out.str();
}

corpus::TagScheme infer_scheme(const std::string& categories, std::span<const fs::path> files) {
  std::vector<std::string> out;
  if (!categories.empty()) {
    std::istringstream in(categories);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      if (std::find(out.begin(), out.end(), item) != out.end()) {
        throw UsageError("categories: '" + item + "' listed twice");
      }
      out.push_back(item);
    }
    return corpus::TagScheme(out);
  }
  std::set<std::string> found;
  for (const auto& path : files) {
    if (path.empty()) continue;
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream fields(line);
      std::string field, last;
      if (!(fields >> field) || field == "-DOCSTART-") continue;
      while (fields >> last) {}
      if (last.size() > 2 && (last[0] == 'B' || last[0] == 'I') && last[1] == '-') {
        found.insert(last.substr(2));
      }
    }
  }
  for (const char* name : {"PER", "LOC", "ORG", "MISC"}) {
    if (found.erase(name)) out.emplace_back(name);
  }
  out.insert(out.end(), found.begin(), found.end());
  return corpus::TagScheme(out);
}

// --- commands ------------------------------------------------------------------

int cmd_train(const RunConfig& config, std::ostream& out) {
  require(config.train_file, "--train", "train");
  require(config.out_dir, "--out", "train");
  if (config.seeds == 0) throw UsageError("train: --seeds must be at least 1");

  const fs::path scheme_files[] = {config.train_file, config.dev_file};
  const auto scheme = infer_scheme(config.categories, scheme_files);
  const auto train = read_labeled(config.train_file, scheme);
  std::vector<corpus::AnnotatedSentence> dev, test;
  if (!config.dev_file.empty()) dev = read_labeled(config.dev_file, scheme);
  if (!config.test_file.empty()) test = read_labeled(config.test_file, scheme, true);

  RunConfig resolved = config;
  std::optional<corpus::PretrainedVectors> vectors;
  if (!config.oov_only) {
    if (config.vectors_file.empty()) {
      throw UsageError("train: --vectors is required unless --oov-only is given");
    }
    vectors = corpus::PretrainedVectors::load(config.vectors_file);
    resolved.model.embedding_dim = vectors->dimension();
  }
  model::validate(resolved.model);
  model::validate(resolved.train);
  fs::create_directories(config.out_dir);
  const corpus::PretrainedVectors* vec = vectors ? &*vectors : nullptr;

  if (config.seeds == 1) {
    const auto r = train_replica(resolved, resolved.train.seed, config.out_dir, train, dev, test,
                                 scheme, vec);
    const auto& last = r.result.log.back();
    out << "seed " << r.seed << ": " << r.result.log.size() << " epochs, final loss "
        << model::format_double(last.total);
    if (r.result.best_val_f1) {
      out << ", best dev F1 " << model::format_double(*r.result.best_val_f1) << " at epoch "
          << r.result.best_epoch;
    }
    if (r.test_f1) out << ", test F1 " << model::format_double(*r.test_f1);
    out << '\n';
    return kExitOk;
  }

  std::vector<ReplicaOutcome> outcomes(config.seeds);
  std::vector<std::exception_ptr> errors(config.seeds);
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < config.seeds; ++i) {
    workers.emplace_back([&, i] {
      const std::uint64_t seed = resolved.train.seed + i;
      try {
        outcomes[i] = train_replica(resolved, seed, config.out_dir / ("seed-" + std::to_string(seed)),
                                    train, dev, test, scheme, vec);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  nlohmann::ordered_json agg;
  agg["seed"] = resolved.train.seed;
  agg["replicas"] = nlohmann::ordered_json::array();
  std::vector<double> val, tst;
  for (const auto& o : outcomes) {
    nlohmann::ordered_json row;
    row["seed"] = o.seed;
    row["epochs"] = o.result.log.size();
    row["best_epoch"] = o.result.best_epoch;
    row["best_val_f1"] = o.result.best_val_f1 ? nlohmann::ordered_json(*o.result.best_val_f1)
                                              : nlohmann::ordered_json(nullptr);
    row["test_f1"] = o.test_f1 ? nlohmann::ordered_json(*o.test_f1) : nlohmann::ordered_json(nullptr);
    if (o.result.best_val_f1) val.push_back(*o.result.best_val_f1);
    if (o.test_f1) tst.push_back(*o.test_f1);
    agg["replicas"].push_back(row);
    out << "seed " << o.seed << ": " << o.result.log.size() << " epochs";
    if (o.result.best_val_f1) out << ", best dev F1 " << model::format_double(*o.result.best_val_f1);
    if (o.test_f1) out << ", test F1 " << model::format_double(*o.test_f1);
    out << '\n';
  }
  agg["median_val_f1"] = val.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(median(val));
  agg["median_test_f1"] = tst.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(median(tst));
  write_file(config.out_dir / "aggregate.json", agg.dump(2) + "\n");
  write_file(config.out_dir / "config.txt", format_config(resolved, "train"));
  if (!val.empty()) out << "median dev F1 " << model::format_double(median(val)) << '\n';
  if (!tst.empty()) out << "median test F1 " << model::format_double(median(tst)) << '\n';
  return kExitOk;
}

int cmd_eval(const RunConfig& config, std::ostream& out) {
  require(config.checkpoint, "--checkpoint", "eval");
  require(config.test_file, "--test", "eval");
  const auto loaded = model::load_checkpoint(config.checkpoint);
  const auto& m = loaded.model;
  const auto gold = read_labeled(config.test_file, m.scheme(), true);
  const auto predicted = predict_all(m, tokens_of(gold));
  const auto report = eval::f1(gold, predicted, m.scheme());
  out << eval::format_report(report);
  if (!config.out_dir.empty()) {
    RunConfig resolved = config;
    if (loaded.train_config) resolved.train = *loaded.train_config;
    resolved.model = m.config();
    fs::create_directories(config.out_dir);
    write_file(config.out_dir / "report.txt", eval::format_report(report));
    write_file(config.out_dir / "report.json", eval::report_json(report));
    write_file(config.out_dir / "predictions.conll",
               predictions_conll(predicted, m.scheme(), resolved.train.seed));
    write_file(config.out_dir / "config.txt", format_config(resolved, "eval"));
  }
  return kExitOk;
}

int cmd_predict(const RunConfig& config, std::ostream& out) {
  require(config.checkpoint, "--checkpoint", "predict");
  require(config.input_file, "--input", "predict");
  if (config.gate && config.out_dir.empty()) throw UsageError("predict: --gate needs --out");
  const auto loaded = model::load_checkpoint(config.checkpoint);
  const auto& m = loaded.model;
  if (config.gate && !m.experts) {
    throw UsageError("predict: --gate needs a checkpoint trained with the expert module");
  }
  const auto tokens = corpus::read_tokens(config.input_file);
  if (tokens.empty()) throw DataError("no sentences in '" + config.input_file.string() + "'");

  // Gold tags are echoed into the gate table when the input carries them.
  std::vector<corpus::AnnotatedSentence> gold;
  try {
    corpus::ConllOptions options;
    options.repair = true;
    gold = corpus::read_conll(config.input_file, m.scheme(), options);
  } catch (const DataError&) {
    gold.clear();
  }
  if (gold.size() != tokens.size()) gold.clear();

  RunConfig resolved = config;
  if (loaded.train_config) resolved.train = *loaded.train_config;
  resolved.model = m.config();
  const std::uint64_t seed = resolved.train.seed;

  std::vector<corpus::AnnotatedSentence> predicted;
  std::ostringstream table;
  if (config.gate) {
    table << "# zrner predict seed=" << seed << '\n' << "token\tgold_tag\tpredicted_tag";
    for (const auto& e : m.scheme().expert_categories()) table << '\t' << e;
    table << '\n';
  }
  const auto& tags = m.scheme().task2();
  for (std::size_t s = 0; s < tokens.size(); ++s) {
    const auto p = m.predict(tokens[s], config.gate);
    corpus::AnnotatedSentence sentence;
    sentence.tokens = tokens[s];
    sentence.tags_task2 = p.tags;
    predicted.push_back(std::move(sentence));
    if (!config.gate) continue;
    if (s > 0) table << '\n';
    for (std::size_t i = 0; i < tokens[s].size(); ++i) {
      table << tokens[s][i] << '\t' << (gold.empty() ? "_" : tags.name(gold[s].tags_task2[i]))
            << '\t' << tags.name(p.tags[i]);
      for (std::size_t a = 0; a < p.gate->cols(); ++a) {
        table << '\t' << model::format_double((*p.gate)(i, a));
      }
      table << '\n';
    }
  }
  const std::string conll = predictions_conll(predicted, m.scheme(), seed);
  if (config.out_dir.empty()) {
    out << conll;
    return kExitOk;
  }
  fs::create_directories(config.out_dir);
  write_file(config.out_dir / "predictions.conll", conll);
  if (config.gate) write_file(config.out_dir / "gate.tsv", table.str());
  write_file(config.out_dir / "config.txt", format_config(resolved, "predict"));
  out << "wrote " << predicted.size() << " sentences to " << (config.out_dir / "predictions.conll").string()
      << '\n';
  return kExitOk;
}

int cmd_score(const RunConfig& config, std::ostream& out) {
  require(config.gold_file, "--gold", "score");
  require(config.pred_file, "--pred", "score");
  const fs::path files[] = {config.gold_file, config.pred_file};
  const auto scheme = infer_scheme(config.categories, files);
  const auto gold = read_labeled(config.gold_file, scheme, true);
  const auto pred = read_labeled(config.pred_file, scheme, true);
  eval::F1Report report;
  try {
    report = eval::f1(gold, pred, scheme);
  } catch (const ContractError& e) {
    throw ValidationError(e.what());
  }
  out << eval::format_report(report);
  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    write_file(config.out_dir / "report.txt", eval::format_report(report));
    write_file(config.out_dir / "report.json", eval::report_json(report));
    write_file(config.out_dir / "config.txt", format_config(config, "score"));
  }
  return kExitOk;
}

}  // namespace zrner::cli
