#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zrner/corpus/batch.hpp"
#include "zrner/corpus/ngram.hpp"
#include "zrner/corpus/vectors.hpp"
#include "zrner/corpus/vocabulary.hpp"
#include "zrner/crf.hpp"
#include "zrner/encoder.hpp"
#include "zrner/moee.hpp"

namespace zrner::model {

using numgrad::Matrix;
using numgrad::Rng;
using numgrad::Tape;
using numgrad::Tensor;

// Architecture settings. Hidden size is per LSTM direction.
struct ModelConfig {
  std::size_t embedding_dim = 300;
  std::size_t hidden_size = 200;
  std::size_t num_layers = 2;
  std::size_t expert_dim = 200;
  double dropout = 0.3;
  bool mtl = true;
  bool moee = true;
  // CRF2 reads [m | h] instead of m alone. Ignored without moee.
  bool crf2_concat_hidden = false;
  bool freeze_embeddings = true;
  corpus::NgramConfig ngram;
};

struct LossWeights {
  double task1 = 1.0;
  double task2 = 1.0;
  double gate = 1.0;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  std::size_t patience = 5;
  std::uint64_t seed = 1;
  LossWeights weights;
  // Supervise the gate on non-entity tokens as well as entity tokens.
  bool gate_include_outside = true;
  // Replace each CRF sequence NLL by the sum of per-token marginal NLLs.
  bool token_ce_on_marginals = false;
  // Probability of feeding a training-set singleton through the OOV path.
  double oov_train_rate = 0.0;
};

// Flat key=value views. Keys are dotted only for nested groups
// ("ngram.min_n", "weights.gate"). set_* return false for unknown keys and
// throw FormatError for malformed values.
std::vector<std::pair<std::string, std::string>> to_key_values(const ModelConfig& config);
std::vector<std::pair<std::string, std::string>> to_key_values(const TrainConfig& config);
bool set_key(ModelConfig& config, const std::string& key, const std::string& value);
bool set_key(TrainConfig& config, const std::string& key, const std::string& value);
void validate(const ModelConfig& config);
void validate(const TrainConfig& config);

// Value formatting shared by config writers: shortest round-trip for doubles.
std::string format_double(double v);

struct SentenceOutputs {
  Tensor hidden;            // [n x 2H]
  Tensor task1_emissions;   // [n x K1]; undefined without mtl
  Tensor task2_emissions;   // [n x K2]
  Tensor alpha;             // [n x E]; undefined without moee
  Tensor log_alpha;         // [n x E]; undefined without moee
};

struct ForwardResult {
  std::vector<SentenceOutputs> sentences;
  std::vector<std::vector<std::uint8_t>> mask;  // copied from the batch
};

struct LossBreakdown {
  double l_task1 = 0.0;
  double l_task2 = 0.0;
  double l_gate = 0.0;
  double total = 0.0;
};

struct LossResult {
  Tensor total;
  Tensor l_task1;  // undefined when the component is disabled
  Tensor l_task2;
  Tensor l_gate;
  LossBreakdown values;
};

struct LossOptions {
  LossWeights weights;
  bool gate_include_outside = true;
  bool token_ce_on_marginals = false;

  static LossOptions from(const TrainConfig& config) {
    return {config.weights, config.gate_include_outside, config.token_ce_on_marginals};
  }
};

struct Prediction {
  corpus::TagSequence tags;
  std::optional<Matrix> gate;  // [n x E] when requested and moee is enabled
};

// Embedding -> BiLSTM -> {CRF1, expert bank -> CRF2}.
class ZeroResourceNerModel {
 public:
  // Parameters are drawn from `rng` in the order embedding, encoder, CRF1,
  // expert bank, CRF2; disabled components draw nothing.
  static ZeroResourceNerModel create(const ModelConfig& config, const corpus::TagScheme& scheme,
                                     corpus::Vocabulary vocab,
                                     const corpus::PretrainedVectors* vectors, Rng& rng);

  const ModelConfig& config() const { return config_; }
  const corpus::TagScheme& scheme() const { return scheme_; }
  const corpus::Vocabulary& vocabulary() const { return vocab_; }

  // Word ids for `tokens`. With `oov_rate` > 0 and an rng, each training
  // singleton is replaced by Vocabulary::kUnk with that probability.
  std::vector<std::size_t> token_ids(std::span<const std::string> tokens, double oov_rate = 0.0,
                                     Rng* rng = nullptr) const;

  SentenceOutputs forward_tokens(Tape& tape, std::span<const std::string> tokens, bool training,
                                 Rng* rng, double oov_rate = 0.0) const;
  ForwardResult forward(Tape& tape, const corpus::Batch& batch, bool training, Rng* rng,
                        double oov_rate = 0.0) const;

  // Component losses are summed over sentences and divided by the batch token
  // count (the gate loss averages over supervised tokens).
  LossResult loss(Tape& tape, const corpus::Batch& batch, const LossOptions& options,
                  bool training, Rng* rng, double oov_rate = 0.0) const;

  // IOB-constrained Viterbi on CRF2; the result is always valid IOB.
  Prediction predict(std::span<const std::string> tokens, bool with_gate = false) const;
  std::vector<Prediction> predict(std::span<const std::vector<std::string>> sentences,
                                  bool with_gate = false) const;

  // Tensors updated by the optimizer (the word table only when unfrozen).
  std::vector<Tensor> trainable_parameters() const;
  // Every parameter tensor under a stable name, frozen ones included.
  std::vector<std::pair<std::string, Tensor>> named_parameters() const;
  void set_embeddings_frozen(bool frozen);

  encoder::EmbeddingLayer embedding;
  encoder::BiLstmEncoder encoder;
  std::optional<crf::CrfHead> crf_task1;
  std::optional<moee::ExpertBank> experts;
  crf::CrfHead crf_task2;

 private:
  ModelConfig config_;
  corpus::TagScheme scheme_;
  corpus::Vocabulary vocab_;
  crf::DecodeConstraints constraints_;
};

// Value copies of every named parameter; restore() writes them back.
std::vector<Matrix> snapshot(const ZeroResourceNerModel& model);
void restore(ZeroResourceNerModel& model, const std::vector<Matrix>& values);

// --- training -------------------------------------------------------------------

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  double l_task1 = 0.0;   // token-weighted means over the epoch's batches
  double l_task2 = 0.0;
  double l_gate = 0.0;
  double total = 0.0;
  std::optional<double> val_f1;
  double seconds = 0.0;
};

struct BatchRecord {
  std::size_t epoch = 0;
  std::size_t batch = 0;  // 0-based within the epoch
  LossBreakdown losses;
};

using BatchObserver = std::function<void(const BatchRecord&)>;

struct TrainResult {
  std::vector<EpochMetrics> log;
  std::size_t best_epoch = 0;  // 0 when no validation set was given
  std::optional<double> best_val_f1;
};

// Adam over shuffled mini-batches. Draws from `rng`, in order: per epoch one
// shuffle seed, then per sentence of each batch the dropout and OOV draws of
// the forward pass. After each epoch the dev set is decoded; the
// best-scoring parameters are restored at the end. Throws NumericError on a
// non-finite loss.
TrainResult fit(ZeroResourceNerModel& model, std::span<const corpus::AnnotatedSentence> train,
                std::span<const corpus::AnnotatedSentence> dev, const TrainConfig& config,
                Rng& rng, const BatchObserver& observer = {});

struct TrainedModel {
  ZeroResourceNerModel model;
  TrainResult result;
};

// Builds the vocabulary from `train`, initializes from config.seed and fits.
TrainedModel train(std::span<const corpus::AnnotatedSentence> train,
                   std::span<const corpus::AnnotatedSentence> dev,
                   const corpus::TagScheme& scheme, const ModelConfig& model_config,
                   const TrainConfig& config, const corpus::PretrainedVectors* vectors,
                   const BatchObserver& observer = {});

// Micro entity F1 of CRF2 predictions against the gold task-2 tags.
double evaluate_f1(const ZeroResourceNerModel& model,
                   std::span<const corpus::AnnotatedSentence> sentences);

// One JSON object per line. `with_timing` false writes seconds as 0 so logs
// of identical runs compare bytewise.
void write_metrics_log(std::ostream& out, std::span<const EpochMetrics> log,
                       bool with_timing = true);

// --- checkpoints --------------------------------------------------------------

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const ZeroResourceNerModel& model, const TrainConfig* train_config,
                     std::ostream& out);
void save_checkpoint(const ZeroResourceNerModel& model, const TrainConfig* train_config,
                     const std::filesystem::path& path);

struct LoadedCheckpoint {
  ZeroResourceNerModel model;
  std::optional<TrainConfig> train_config;
};

// Throws CheckpointError naming the failing section, and SchemeError when
// `expected_scheme` is given and differs from the stored one.
LoadedCheckpoint load_checkpoint(std::istream& in,
                                 const corpus::TagScheme* expected_scheme = nullptr);
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path,
                                 const corpus::TagScheme* expected_scheme = nullptr);

}  // namespace zrner::model
