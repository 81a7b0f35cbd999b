#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "cli.hpp"

namespace zrner::cli {

namespace {

struct Flags {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> sets;

  std::optional<std::string> train, dev, test, vectors, checkpoint, input, gold, pred;
  std::optional<std::string> ablation;
  std::optional<std::size_t> epochs, patience, seeds;
  bool oov_only = false, no_mtl = false, no_moee = false, freeze = false, unfreeze = false;
  bool gate = false;
};

void add_shared(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config_file, "key = value config file");
  cmd.add_option("--seed", f.seed, "random seed");
  cmd.add_option("--out", f.out, "output directory");
  cmd.add_option("--set", f.sets, "override one config key (key=value), repeatable");
}

RunConfig resolve(const Flags& f) {
  RunConfig c;
  if (!f.config_file.empty()) load_config_file(c, f.config_file);
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    set_key(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) c.train.seed = *f.seed;
  if (f.out) c.out_dir = *f.out;
  if (f.train) c.train_file = *f.train;
  if (f.dev) c.dev_file = *f.dev;
  if (f.test) c.test_file = *f.test;
  if (f.vectors) c.vectors_file = *f.vectors;
  if (f.checkpoint) c.checkpoint = *f.checkpoint;
  if (f.input) c.input_file = *f.input;
  if (f.gold) c.gold_file = *f.gold;
  if (f.pred) c.pred_file = *f.pred;
  if (f.epochs) c.train.epochs = *f.epochs;
  if (f.patience) c.train.patience = *f.patience;
  if (f.seeds) c.seeds = *f.seeds;
  if (f.oov_only) c.oov_only = true;
  if (f.gate) c.gate = true;
  if (f.ablation) {
    const std::string& a = *f.ablation;
    c.model.mtl = a == "none" || a == "no-moee";
    c.model.moee = a == "none" || a == "no-mtl";
  }
  if (f.no_mtl) c.model.mtl = false;
  if (f.no_moee) c.model.moee = false;
  if (f.freeze) c.model.freeze_embeddings = true;
  if (f.unfreeze) c.model.freeze_embeddings = false;
  return c;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-domain NER with multi-task CRFs and a mixture of entity experts", "zrner"};
  app.require_subcommand(1);
  Flags f;

  auto* train = app.add_subcommand("train", "train a model and write checkpoint, metrics, config");
  add_shared(*train, f);
  train->add_option("--train", f.train, "training CoNLL file");
  train->add_option("--dev", f.dev, "validation CoNLL file (model selection)");
  train->add_option("--test", f.test, "optional test CoNLL file scored after training");
  train->add_option("--vectors", f.vectors, "pretrained vectors (word2vec text format)");
  train->add_flag("--oov-only", f.oov_only, "no pretrained vectors; random word table");
  train->add_flag("--no-mtl", f.no_mtl, "drop the entity-detection CRF");
  train->add_flag("--no-moee", f.no_moee, "drop the expert module");
  train->add_option("--ablation", f.ablation, "none | no-mtl | no-moee | baseline")
      ->check(CLI::IsMember({"none", "no-mtl", "no-moee", "baseline"}));
  auto* freeze = train->add_flag("--freeze-embeddings", f.freeze, "keep the word table fixed");
  auto* unfreeze =
      train->add_flag("--unfreeze-embeddings", f.unfreeze, "train the word table");
  freeze->excludes(unfreeze);
  train->add_option("--epochs", f.epochs, "maximum epochs");
  train->add_option("--patience", f.patience, "epochs without dev improvement before stopping");
  train->add_option("--seeds", f.seeds, "independent replicas run concurrently")
      ->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "decode a test file and report entity F1");
  add_shared(*eval, f);
  eval->add_option("--checkpoint", f.checkpoint, "model checkpoint");
  eval->add_option("--test", f.test, "gold CoNLL file");

  auto* predict = app.add_subcommand("predict", "tag a token or CoNLL file");
  add_shared(*predict, f);
  predict->add_option("--checkpoint", f.checkpoint, "model checkpoint");
  predict->add_option("--input", f.input, "token-per-line input (extra columns ignored)");
  predict->add_flag("--gate", f.gate, "also write per-token expert confidences (gate.tsv)");

  auto* score = app.add_subcommand("score", "score a prediction file against gold");
  add_shared(*score, f);
  score->add_option("--gold", f.gold, "gold CoNLL file");
  score->add_option("--pred", f.pred, "predicted CoNLL file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const RunConfig config = resolve(f);
    if (train->parsed()) return cmd_train(config, out);
    if (eval->parsed()) return cmd_eval(config, out);
    if (predict->parsed()) return cmd_predict(config, out);
    return cmd_score(config, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace zrner::cli
