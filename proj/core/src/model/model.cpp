#include <string>

#include "zrner/error.hpp"
#include "zrner/model.hpp"

namespace zrner::model {

ZeroResourceNerModel ZeroResourceNerModel::create(const ModelConfig& config,
                                                  const corpus::TagScheme& scheme,
                                                  corpus::Vocabulary vocab,
                                                  const corpus::PretrainedVectors* vectors,
                                                  Rng& rng) {
  validate(config);
  if (scheme.task2().size() == 0) throw ContractError("model: tag scheme has no tags");
  ZeroResourceNerModel m;
  m.config_ = config;
  m.scheme_ = scheme;
  m.vocab_ = std::move(vocab);
  m.embedding = encoder::EmbeddingLayer::create(m.vocab_, config.embedding_dim, vectors,
                                                config.ngram, config.freeze_embeddings, rng);
  m.encoder = encoder::BiLstmEncoder::create(config.embedding_dim, config.hidden_size,
                                             config.num_layers, rng);
  const std::size_t h_dim = m.encoder.output_dim();
  if (config.mtl) m.crf_task1 = crf::CrfHead::create(h_dim, scheme.task1().size(), rng);
  std::size_t crf2_in = h_dim;
  if (config.moee) {
    m.experts = moee::ExpertBank::create(h_dim, config.expert_dim, scheme.num_experts(), rng);
    crf2_in = config.crf2_concat_hidden ? config.expert_dim + h_dim : config.expert_dim;
  }
  m.crf_task2 = crf::CrfHead::create(crf2_in, scheme.task2().size(), rng);
  m.constraints_ = crf::iob_constraints(scheme.task2());
  return m;
}

std::vector<std::size_t> ZeroResourceNerModel::token_ids(std::span<const std::string> tokens,
                                                         double oov_rate, Rng* rng) const {
  std::vector<std::size_t> ids;
  ids.reserve(tokens.size());
  for (const auto& tok : tokens) {
    std::size_t id = vocab_.lookup(tok);
    if (oov_rate > 0.0 && rng && id > corpus::Vocabulary::kUnk && vocab_.count(id) == 1 &&
        numgrad::uniform01(*rng) < oov_rate) {
      id = corpus::Vocabulary::kUnk;
    }
    ids.push_back(id);
  }
  return ids;
}

SentenceOutputs ZeroResourceNerModel::forward_tokens(Tape& tape, std::span<const std::string> tokens,
                                                     bool training, Rng* rng,
                                                     double oov_rate) const {
  const auto ids = token_ids(tokens, training ? oov_rate : 0.0, training ? rng : nullptr);
  const double rate = config_.dropout;
  const Tensor x = embedding.embed(tape, ids, tokens, training, rate, rng);
  SentenceOutputs out;
  out.hidden = encoder.encode(tape, x, training, rate, rng);
  const Tensor& h = out.hidden;
  if (crf_task1) out.task1_emissions = crf_task1->emissions(tape, h);
  Tensor features = h;
  if (experts) {
    auto moe = moee::run(tape, h, *experts);
    out.alpha = moe.alpha;
    out.log_alpha = moe.log_alpha;
    if (config_.crf2_concat_hidden) {
      const Tensor parts[] = {moe.meta, h};
      features = tape.concat_cols(parts);
    } else {
      features = moe.meta;
    }
  }
  if (features.cols() != crf_task2.input_dim()) {
    throw ContractError("model: CRF2 expects width " + std::to_string(crf_task2.input_dim()) +
                        ", got " + std::to_string(features.cols()));
  }
  out.task2_emissions = crf_task2.emissions(tape, features);
  return out;
}

ForwardResult ZeroResourceNerModel::forward(Tape& tape, const corpus::Batch& batch, bool training,
                                            Rng* rng, double oov_rate) const {
  ForwardResult result;
  result.mask = batch.mask;
  for (const auto* s : batch.sentences) {
    result.sentences.push_back(forward_tokens(tape, s->tokens, training, rng, oov_rate));
  }
  return result;
}

LossResult ZeroResourceNerModel::loss(Tape& tape, const corpus::Batch& batch,
                                      const LossOptions& options, bool training, Rng* rng,
                                      double oov_rate) const {
  const std::size_t tokens = batch.token_count();
  if (tokens == 0) throw ContractError("loss: empty batch");
  const double inv_tokens = 1.0 / static_cast<double>(tokens);

  std::vector<Tensor> terms1, terms2, log_alphas;
  std::vector<int> gate_labels;
  std::vector<std::uint8_t> gate_mask;
  auto sequence_loss = [&](const Tensor& em, std::span<const int> gold, const crf::CrfHead& head) {
    return options.token_ce_on_marginals ? crf::marginal_nll(tape, em, gold, head)
                                         : crf::nll(tape, em, gold, head);
  };
  for (const auto* s : batch.sentences) {
    if (s->tags_task2.size() != s->size() || s->tags_task1.size() != s->size() ||
        s->gate_labels.size() != s->size()) {
      throw ContractError("loss: sentence without gold labels for every task");
    }
    const SentenceOutputs out = forward_tokens(tape, s->tokens, training, rng, oov_rate);
    terms2.push_back(sequence_loss(out.task2_emissions, s->tags_task2, crf_task2));
    if (crf_task1) terms1.push_back(sequence_loss(out.task1_emissions, s->tags_task1, *crf_task1));
    if (experts) {
      log_alphas.push_back(out.log_alpha);
      for (int g : s->gate_labels) {
        gate_labels.push_back(g);
        gate_mask.push_back(options.gate_include_outside || g != 0 ? 1 : 0);
      }
    }
  }

  LossResult r;
  r.l_task2 = tape.scale(tape.sum(tape.concat_rows(terms2)), inv_tokens);
  r.total = tape.scale(r.l_task2, options.weights.task2);
  r.values.l_task2 = r.l_task2.item();
  if (crf_task1) {
    r.l_task1 = tape.scale(tape.sum(tape.concat_rows(terms1)), inv_tokens);
    r.total = tape.add(r.total, tape.scale(r.l_task1, options.weights.task1));
    r.values.l_task1 = r.l_task1.item();
  }
  if (experts) {
    r.l_gate = moee::gate_loss_from_log_probs(tape, tape.concat_rows(log_alphas), gate_labels,
                                              gate_mask);
    r.total = tape.add(r.total, tape.scale(r.l_gate, options.weights.gate));
    r.values.l_gate = r.l_gate.item();
  }
  r.values.total = r.total.item();
  return r;
}

Prediction ZeroResourceNerModel::predict(std::span<const std::string> tokens,
                                         bool with_gate) const {
  Prediction p;
  if (tokens.empty()) return p;
  Tape tape;
  const SentenceOutputs out = forward_tokens(tape, tokens, false, nullptr);
  const auto best = crf::viterbi(out.task2_emissions.value(), crf_task2, &constraints_);
  p.tags = corpus::repair_iob(best.tags);
  if (with_gate && out.alpha.defined()) p.gate = out.alpha.value();
  return p;
}

std::vector<Prediction> ZeroResourceNerModel::predict(
    std::span<const std::vector<std::string>> sentences, bool with_gate) const {
  std::vector<Prediction> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(predict(s, with_gate));
  return out;
}

std::vector<Tensor> ZeroResourceNerModel::trainable_parameters() const {
  std::vector<Tensor> params;
  for (const auto& [name, t] : named_parameters()) {
    if (t.requires_grad()) params.push_back(t);
  }
  return params;
}

std::vector<std::pair<std::string, Tensor>> ZeroResourceNerModel::named_parameters() const {
  std::vector<std::pair<std::string, Tensor>> out;
  out.emplace_back("embedding.table", embedding.table);
  out.emplace_back("embedding.ngrams", embedding.ngrams);
  for (std::size_t l = 0; l < encoder.num_layers(); ++l) {
    const std::string prefix = "encoder.layer" + std::to_string(l);
    for (const auto& [dir, cell] : {std::pair<const char*, const encoder::LstmCell*>{
                                        ".forward", &encoder.forward[l]},
                                    {".backward", &encoder.backward[l]}}) {
      out.emplace_back(prefix + dir + ".w_input", cell->w_input);
      out.emplace_back(prefix + dir + ".w_hidden", cell->w_hidden);
      out.emplace_back(prefix + dir + ".bias", cell->bias);
    }
  }
  auto add_crf = [&](const std::string& prefix, const crf::CrfHead& head) {
    out.emplace_back(prefix + ".projection.weight", head.projection.weight);
    out.emplace_back(prefix + ".projection.bias", head.projection.bias);
    out.emplace_back(prefix + ".transitions", head.transitions);
    out.emplace_back(prefix + ".start", head.start);
    out.emplace_back(prefix + ".stop", head.stop);
  };
  if (crf_task1) add_crf("crf_task1", *crf_task1);
  if (experts) {
    for (std::size_t a = 0; a < experts->num_experts(); ++a) {
      const std::string prefix = "experts.expert" + std::to_string(a);
      out.emplace_back(prefix + ".weight", experts->experts[a].weight);
      out.emplace_back(prefix + ".bias", experts->experts[a].bias);
    }
    out.emplace_back("experts.gate.weight", experts->gate.weight);
    out.emplace_back("experts.gate.bias", experts->gate.bias);
  }
  add_crf("crf_task2", crf_task2);
  return out;
}

void ZeroResourceNerModel::set_embeddings_frozen(bool frozen) {
  embedding.set_frozen(frozen);
  config_.freeze_embeddings = frozen;
}

std::vector<Matrix> snapshot(const ZeroResourceNerModel& model) {
  std::vector<Matrix> values;
  for (const auto& [name, t] : model.named_parameters()) values.push_back(t.value());
  return values;
}

void restore(ZeroResourceNerModel& model, const std::vector<Matrix>& values) {
  auto params = model.named_parameters();
  if (params.size() != values.size()) {
    throw ContractError("restore: " + std::to_string(values.size()) + " values for " +
                        std::to_string(params.size()) + " parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].second.shape() != values[i].shape()) {
      throw ContractError("restore: shape mismatch for " + params[i].first);
    }
    params[i].second.mutable_value() = values[i];
  }
}

}  // namespace zrner::model
