#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "json.hpp"
#include "support.hpp"
#include "zrner/corpus/conll.hpp"

namespace zrner::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int status = 0;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "zrner");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

fs::path scratch_root() {
  return fs::temp_directory_path() / ("zrner_cli_" + std::to_string(::getpid()));
}

// Removes this process's scratch tree after the last test.
class ScratchCleanup : public ::testing::Environment {
 public:
  void TearDown() override { fs::remove_all(scratch_root()); }
};
[[maybe_unused]] const auto* const kCleanup =
    ::testing::AddGlobalTestEnvironment(new ScratchCleanup);

fs::path scratch(const std::string& name) {
  const fs::path dir = scratch_root() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& content) { std::ofstream(p) << content; }

std::vector<nlohmann::json> epoch_records(const fs::path& log) {
  std::vector<nlohmann::json> out;
  std::istringstream in(slurp(log));
  std::string line;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    if (j.contains("epoch")) out.push_back(j);
  }
  return out;
}

const std::string kTrain = testing::data_path("synthetic_train.conll").string();
const std::string kVectors = testing::data_path("synthetic_vectors.txt").string();

std::vector<std::string> small_model_flags() {
  return {"--set", "hidden_size=16", "--set", "expert_dim=16", "--set", "num_layers=1",
          "--set", "learning_rate=0.01", "--set", "batch_size=8", "--set", "ngram.buckets=256"};
}

// Trained once; later tests only read it.
const fs::path& overfit_checkpoint() {
  static const fs::path dir = [] {
    const auto d = scratch("overfit");
    auto args = std::vector<std::string>{"train", "--train", kTrain, "--dev", kTrain, "--vectors",
                                         kVectors, "--out", d.string(), "--epochs", "60",
                                         "--patience", "8"};
    for (auto& f : small_model_flags()) args.push_back(f);
    const auto r = invoke(args);
    EXPECT_EQ(r.status, 0) << r.err;
    return d;
  }();
  return dir;
}

TEST(CliTrain, WritesCheckpointMetricsAndConfig) {
  const auto dir = scratch("train");
  auto args = std::vector<std::string>{"train", "--train", kTrain, "--vectors", kVectors, "--out",
                                       dir.string(), "--epochs", "3", "--seed", "7"};
  for (auto& f : small_model_flags()) args.push_back(f);
  const auto r = invoke(args);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(r.err.empty());
  EXPECT_TRUE(fs::exists(dir / "model.ckpt"));
  EXPECT_EQ(epoch_records(dir / "metrics.jsonl").size(), 3u);
  const auto log = slurp(dir / "metrics.jsonl");
  EXPECT_EQ(nlohmann::json::parse(log.substr(0, log.find('\n')))["seed"], 7);
  const std::string config = slurp(dir / "config.txt");
  EXPECT_EQ(config.rfind("# zrner train seed=7\n", 0), 0u);
  EXPECT_NE(config.find("embedding_dim = 16"), std::string::npos);

  RunConfig reloaded;
  std::istringstream in(config);
  load_config(reloaded, in);
  EXPECT_EQ(format_config(reloaded, "train"), config);
}

TEST(CliTrain, MissingVectorsFileNamesPath) {
  const auto dir = scratch("novec");
  const auto r = invoke({"train", "--train", kTrain, "--vectors", "/no/such/vectors.txt", "--out",
                         dir.string()});
  EXPECT_EQ(r.status, kExitData);
  EXPECT_NE(r.err.find("/no/such/vectors.txt"), std::string::npos) << r.err;
  const auto usage = invoke({"train", "--train", kTrain, "--out", dir.string()});
  EXPECT_EQ(usage.status, kExitUsage);
}

TEST(CliTrain, NoMoeeAblationLogsZeroGateLoss) {
  const auto dir = scratch("ablation");
  auto args = std::vector<std::string>{"train", "--train", kTrain, "--oov-only", "--out",
                                       dir.string(), "--epochs", "2", "--ablation", "no-moee",
                                       "--set", "embedding_dim=8"};
  for (auto& f : small_model_flags()) args.push_back(f);
  ASSERT_EQ(invoke(args).status, 0);
  const auto records = epoch_records(dir / "metrics.jsonl");
  ASSERT_EQ(records.size(), 2u);
  for (const auto& r : records) {
    EXPECT_EQ(r["l_gate"], 0.0);
    EXPECT_GT(r["l_task1"].get<double>(), 0.0);
    EXPECT_TRUE(r["val_f1"].is_null());
  }
  EXPECT_NE(slurp(dir / "config.txt").find("moee = false"), std::string::npos);
}

TEST(CliTrain, SeedsRunAsReplicasWithAggregate) {
  const auto dir = scratch("seeds");
  auto args = std::vector<std::string>{"train", "--train", kTrain, "--dev", kTrain, "--vectors",
                                       kVectors, "--out", dir.string(), "--epochs", "2",
                                       "--seeds", "2", "--seed", "5"};
  for (auto& f : small_model_flags()) args.push_back(f);
  const auto r = invoke(args);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "seed-5" / "model.ckpt"));
  EXPECT_TRUE(fs::exists(dir / "seed-6" / "model.ckpt"));
  const auto agg = nlohmann::json::parse(slurp(dir / "aggregate.json"));
  ASSERT_EQ(agg["replicas"].size(), 2u);
  EXPECT_EQ(agg["replicas"][1]["seed"], 6);
  EXPECT_TRUE(agg["median_val_f1"].is_number());
}

TEST(CliConfig, PrecedenceAndUnknownKeys) {
  const auto dir = scratch("config");
  spit(dir / "run.cfg", "# comment\nepochs = 9\nseed = 3\nhidden_size = 12 # trailing\n");
  auto out = dir / "out";
  const auto r = invoke({"train", "--config", (dir / "run.cfg").string(), "--set", "epochs=4",
                         "--epochs", "1", "--train", kTrain, "--oov-only", "--out", out.string(),
                         "--set", "embedding_dim=4", "--set", "expert_dim=4", "--set",
                         "num_layers=1"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto config = slurp(out / "config.txt");
  EXPECT_NE(config.find("epochs = 1\n"), std::string::npos);
  EXPECT_NE(config.find("seed = 3\n"), std::string::npos);
  EXPECT_NE(config.find("hidden_size = 12\n"), std::string::npos);

  spit(dir / "bad.cfg", "epochz = 3\n");
  const auto bad = invoke({"train", "--config", (dir / "bad.cfg").string(), "--train", kTrain,
                           "--oov-only", "--out", out.string()});
  EXPECT_EQ(bad.status, kExitUsage);
  EXPECT_NE(bad.err.find("epochz"), std::string::npos) << bad.err;
  EXPECT_EQ(invoke({"train", "--set", "dropout=lots", "--train", kTrain}).status, kExitUsage);
  EXPECT_EQ(invoke({"train", "--ablation", "sideways"}).status, kExitUsage);
}

TEST(CliEval, OverfitModelScoresItsTrainingFile) {
  const auto& ckpt = overfit_checkpoint();
  const auto dir = scratch("eval");
  const auto r = invoke({"eval", "--checkpoint", (ckpt / "model.ckpt").string(), "--test", kTrain,
                         "--out", dir.string()});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_GE(report["micro"]["f1"].get<double>(), 99.0);

  const auto scored = invoke({"score", "--gold", kTrain, "--pred",
                              (dir / "predictions.conll").string(), "--out",
                              (dir / "score").string()});
  ASSERT_EQ(scored.status, 0) << scored.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "score" / "report.json"))["micro"]["f1"],
            report["micro"]["f1"]);
}

TEST(CliEval, EmptyFileAndSchemeMismatch) {
  const auto& ckpt = overfit_checkpoint();
  const auto dir = scratch("eval_err");
  spit(dir / "empty.conll", "");
  const auto empty = invoke({"eval", "--checkpoint", (ckpt / "model.ckpt").string(), "--test",
                             (dir / "empty.conll").string()});
  EXPECT_EQ(empty.status, kExitData);
  EXPECT_NE(empty.err.find("no sentences"), std::string::npos) << empty.err;
  spit(dir / "other.conll", "Ada B-PERSON\nwrote O\n");
  const auto mismatch = invoke({"eval", "--checkpoint", (ckpt / "model.ckpt").string(), "--test",
                                (dir / "other.conll").string()});
  EXPECT_EQ(mismatch.status, kExitData);
  EXPECT_FALSE(mismatch.err.empty());
}

TEST(CliPredict, GateTableShapeAndDeterminism) {
  const auto& ckpt = overfit_checkpoint();
  const auto dir = scratch("predict");
  spit(dir / "one.txt", "Maria\nflew\nto\nOslo\n");
  auto run_once = [&](const std::string& sub) {
    const auto r = invoke({"predict", "--checkpoint", (ckpt / "model.ckpt").string(), "--input",
                           (dir / "one.txt").string(), "--gate", "--out", (dir / sub).string()});
    EXPECT_EQ(r.status, 0) << r.err;
    return std::make_pair(slurp(dir / sub / "predictions.conll"), slurp(dir / sub / "gate.tsv"));
  };
  const auto a = run_once("a"), b = run_once("b");
  EXPECT_EQ(a, b);

  std::istringstream rows(a.second);
  std::string line;
  std::size_t data_rows = 0;
  while (std::getline(rows, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("token\t", 0) == 0) continue;
    ++data_rows;
    std::vector<std::string> cols;
    std::istringstream fields(line);
    std::string c;
    while (std::getline(fields, c, '\t')) cols.push_back(c);
    ASSERT_EQ(cols.size(), 3u + 5u);
    EXPECT_EQ(cols[1], "_");
    double total = 0.0;
    for (std::size_t k = 3; k < cols.size(); ++k) total += std::stod(cols[k]);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
  EXPECT_EQ(data_rows, 4u);
  EXPECT_NE(a.second.find("seed="), std::string::npos);

  // Strict read succeeds only on valid IOB.
  std::istringstream pred(a.first);
  const auto sentences = corpus::parse_conll(pred, corpus::TagScheme::conll2003());
  ASSERT_EQ(sentences.size(), 1u);
  EXPECT_EQ(sentences[0].tokens, (std::vector<std::string>{"Maria", "flew", "to", "Oslo"}));
}

TEST(CliScore, IdentityFixtureAndMisalignment) {
  const auto self = invoke({"score", "--gold", kTrain, "--pred", kTrain});
  ASSERT_EQ(self.status, 0) << self.err;
  EXPECT_NE(self.out.find("FB1: 100.00"), std::string::npos) << self.out;

  const auto dir = scratch("score");
  const auto fixture =
      invoke({"score", "--gold", testing::data_path("scorer_gold.conll").string(), "--pred",
              testing::data_path("scorer_pred.conll").string(), "--out", dir.string()});
  ASSERT_EQ(fixture.status, 0) << fixture.err;
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_NEAR(report["micro"]["f1"].get<double>(), 54.23728813559321, 1e-9);

  spit(dir / "short.conll", "John B-PER\n\nParis B-LOC\nis O\n");
  spit(dir / "long.conll", "John B-PER\n\nParis B-LOC\n");
  const auto bad = invoke({"score", "--gold", (dir / "short.conll").string(), "--pred",
                           (dir / "long.conll").string()});
  EXPECT_EQ(bad.status, kExitData);
  EXPECT_NE(bad.err.find("sentence 1"), std::string::npos) << bad.err;
}

TEST(CliScheme, InferenceOrder) {
  const auto dir = scratch("scheme");
  spit(dir / "a.conll", "x B-ZOO\ny B-LOC\nz I-LOC\nw B-PER\nv B-ANIMAL\n");
  const fs::path files[] = {dir / "a.conll"};
  EXPECT_EQ(infer_scheme("", files).entity_categories(),
            (std::vector<std::string>{"PER", "LOC", "ANIMAL", "ZOO"}));
  EXPECT_EQ(infer_scheme("ORG, PER", files).entity_categories(),
            (std::vector<std::string>{"ORG", "PER"}));
}

}  // namespace
}  // namespace zrner::cli
