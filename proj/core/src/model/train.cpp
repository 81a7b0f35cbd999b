#include <chrono>
#include <cmath>
#include <ostream>

#include "json.hpp"
#include "zrner/error.hpp"
#include "zrner/eval.hpp"
#include "zrner/model.hpp"
#include "zrner/numgrad/adam.hpp"

namespace zrner::model {

namespace {

void check_scheme(std::span<const corpus::AnnotatedSentence> sentences,
                  const corpus::TagScheme& scheme, const char* which) {
  const auto k2 = static_cast<int>(scheme.task2().size());
  const auto k1 = static_cast<int>(scheme.task1().size());
  const auto e = static_cast<int>(scheme.num_experts());
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto& sent = sentences[s];
    auto bad = [&](std::span<const int> tags, int k) {
      if (tags.size() != sent.size()) return true;
      for (int t : tags) {
        if (t < 0 || t >= k) return true;
      }
      return false;
    };
    if (sent.size() == 0 || bad(sent.tags_task2, k2) || bad(sent.tags_task1, k1) ||
        bad(sent.gate_labels, e)) {
      throw SchemeError(std::string(which) + " sentence " + std::to_string(s) +
                        " does not fit the model's tag scheme");
    }
  }
}

std::string describe(std::size_t epoch, std::size_t batch, const LossBreakdown& l) {
  return "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch) +
         ": l_task1=" + format_double(l.l_task1) + " l_task2=" + format_double(l.l_task2) +
         " l_gate=" + format_double(l.l_gate) + " total=" + format_double(l.total);
}

}  // namespace

double evaluate_f1(const ZeroResourceNerModel& model,
                   std::span<const corpus::AnnotatedSentence> sentences) {
  std::vector<corpus::TagSequence> gold, pred;
  gold.reserve(sentences.size());
  pred.reserve(sentences.size());
  for (const auto& s : sentences) {
    gold.push_back(s.tags_task2);
    pred.push_back(model.predict(s.tokens).tags);
  }
  return eval::f1(gold, pred, model.scheme().task2()).micro.f1;
}

TrainResult fit(ZeroResourceNerModel& model, std::span<const corpus::AnnotatedSentence> train,
                std::span<const corpus::AnnotatedSentence> dev, const TrainConfig& config,
                Rng& rng, const BatchObserver& observer) {
  validate(config);
  if (train.empty()) throw ContractError("train: empty training set");
  check_scheme(train, model.scheme(), "training");
  check_scheme(dev, model.scheme(), "validation");

  auto params = model.trainable_parameters();
  numgrad::AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  auto state = numgrad::AdamState::for_parameters(params, adam);
  const LossOptions options = LossOptions::from(config);

  TrainResult result;
  std::vector<Matrix> best;
  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    const auto batches = corpus::batch(train, config.batch_size, rng());
    EpochMetrics m;
    m.epoch = epoch;
    std::size_t seen = 0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      Tape tape;
      LossResult loss;
      try {
        loss = model.loss(tape, batches[b], options, true, &rng, config.oov_train_rate);
      } catch (const NumericError& e) {
        throw NumericError("non-finite value during " + describe(epoch, b, loss.values) + " (" +
                           e.what() + ")");
      }
      if (!std::isfinite(loss.values.total)) {
        throw NumericError("non-finite loss at " + describe(epoch, b, loss.values));
      }
      if (observer) observer({epoch, b, loss.values});
      tape.backward(loss.total);
      numgrad::adam_step(params, state);

      const auto n = static_cast<double>(batches[b].token_count());
      m.l_task1 += n * loss.values.l_task1;
      m.l_task2 += n * loss.values.l_task2;
      m.l_gate += n * loss.values.l_gate;
      m.total += n * loss.values.total;
      seen += batches[b].token_count();
    }
    const double inv = 1.0 / static_cast<double>(seen);
    m.l_task1 *= inv;
    m.l_task2 *= inv;
    m.l_gate *= inv;
    m.total *= inv;
    if (!dev.empty()) m.val_f1 = evaluate_f1(model, dev);
    m.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.log.push_back(m);

    if (!m.val_f1) continue;
    if (!result.best_val_f1 || *m.val_f1 > *result.best_val_f1) {
      result.best_val_f1 = m.val_f1;
      result.best_epoch = epoch;
      best = snapshot(model);
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  if (!best.empty()) restore(model, best);
  return result;
}

TrainedModel train(std::span<const corpus::AnnotatedSentence> train,
                   std::span<const corpus::AnnotatedSentence> dev,
                   const corpus::TagScheme& scheme, const ModelConfig& model_config,
                   const TrainConfig& config, const corpus::PretrainedVectors* vectors,
                   const BatchObserver& observer) {
  validate(config);
  Rng rng(config.seed);
  auto model = ZeroResourceNerModel::create(model_config, scheme, corpus::Vocabulary::build(train),
                                            vectors, rng);
  auto result = fit(model, train, dev, config, rng, observer);
  return {std::move(model), std::move(result)};
}

void write_metrics_log(std::ostream& out, std::span<const EpochMetrics> log, bool with_timing) {
  for (const auto& m : log) {
    nlohmann::ordered_json j;
    j["epoch"] = m.epoch;
    j["l_task1"] = m.l_task1;
    j["l_task2"] = m.l_task2;
    j["l_gate"] = m.l_gate;
    j["total"] = m.total;
    j["val_f1"] = m.val_f1 ? nlohmann::ordered_json(*m.val_f1) : nlohmann::ordered_json(nullptr);
    j["seconds"] = with_timing ? m.seconds : 0.0;
    out << j.dump() << '\n';
  }
}

}  // namespace zrner::model
