#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "reference_wiring.hpp"
#include "support.hpp"
#include "zrner/error.hpp"
#include "zrner/numgrad/adam.hpp"
#include "zrner/numgrad/gradcheck.hpp"

namespace zrner::model {
namespace {

using corpus::AnnotatedSentence;
using corpus::TagScheme;
using testing::random_matrix;
using testing::tiny_config;
using testing::uniform_int;

const TagScheme& conll() {
  static const TagScheme s = TagScheme::conll2003();
  return s;
}

AnnotatedSentence sentence(std::vector<std::string> tokens, std::vector<std::string> tags,
                           const TagScheme& scheme = conll()) {
  corpus::TagSequence ids;
  for (const auto& t : tags) ids.push_back(scheme.task2().id(t));
  return corpus::annotate(std::move(tokens), std::move(ids), scheme);
}

std::vector<AnnotatedSentence> small_corpus() {
  return {sentence({"Anna", "visited", "Rome"}, {"B-PER", "O", "B-LOC"}),
          sentence({"the", "Red", "Cross", "helped"}, {"O", "B-ORG", "I-ORG", "O"}),
          sentence({"Rome", "won"}, {"B-LOC", "O"}),
          sentence({"Nobel", "Prize", "for", "Anna"}, {"B-MISC", "I-MISC", "O", "B-PER"})};
}

ZeroResourceNerModel make_model(const ModelConfig& config, std::span<const AnnotatedSentence> data,
                                std::uint64_t seed, const TagScheme& scheme = conll()) {
  Rng rng(seed);
  return ZeroResourceNerModel::create(config, scheme, corpus::Vocabulary::build(data), nullptr,
                                      rng);
}

// Randomizes CRF chain scores, which start at zero.
void randomize_chains(ZeroResourceNerModel& m, Rng& rng) {
  for (auto* head : {&m.crf_task2, m.crf_task1 ? &*m.crf_task1 : nullptr}) {
    if (!head) continue;
    const std::size_t k = head->num_tags();
    head->transitions.mutable_value() = random_matrix(k, k, rng);
    head->start.mutable_value() = random_matrix(1, k, rng);
    head->stop.mutable_value() = random_matrix(1, k, rng);
  }
}

TEST(Model, DimensionChain) {
  const auto data = small_corpus();
  const auto m = make_model(tiny_config(6, 4, 5), data, 1);
  EXPECT_EQ(m.crf_task1->input_dim(), 8u);
  EXPECT_EQ(m.crf_task1->num_tags(), 3u);
  EXPECT_EQ(m.experts->num_experts(), 5u);
  EXPECT_EQ(m.experts->expert_dim(), 5u);
  EXPECT_EQ(m.crf_task2.input_dim(), 5u);
  EXPECT_EQ(m.crf_task2.num_tags(), 9u);
  Tape tape;
  const auto out = m.forward_tokens(tape, data[1].tokens, false, nullptr);
  EXPECT_EQ(out.hidden.shape(), (numgrad::Shape{4, 8}));
  EXPECT_EQ(out.task1_emissions.shape(), (numgrad::Shape{4, 3}));
  EXPECT_EQ(out.task2_emissions.shape(), (numgrad::Shape{4, 9}));
  EXPECT_EQ(out.alpha.shape(), (numgrad::Shape{4, 5}));

  auto concat = tiny_config(6, 4, 5);
  concat.crf2_concat_hidden = true;
  EXPECT_EQ(make_model(concat, data, 1).crf_task2.input_dim(), 13u);
}

TEST(Model, SingleTokenSentence) {
  const auto data = small_corpus();
  const auto m = make_model(tiny_config(), data, 2);
  Tape tape;
  const std::vector<std::string> one = {"Rome"};
  const auto out = m.forward_tokens(tape, one, false, nullptr);
  EXPECT_EQ(out.hidden.rows(), 1u);
  EXPECT_EQ(out.task1_emissions.rows(), 1u);
  EXPECT_EQ(out.task2_emissions.rows(), 1u);
  EXPECT_EQ(out.alpha.rows(), 1u);
  EXPECT_EQ(m.predict(one).tags.size(), 1u);
}

TEST(Model, AblationWiring) {
  const auto data = small_corpus();
  auto config = tiny_config();
  config.mtl = false;
  config.moee = false;
  const auto m = make_model(config, data, 3);
  EXPECT_FALSE(m.crf_task1.has_value());
  EXPECT_FALSE(m.experts.has_value());
  Tape tape;
  const auto out = m.forward_tokens(tape, data[0].tokens, false, nullptr);
  EXPECT_FALSE(out.task1_emissions.defined());
  EXPECT_FALSE(out.alpha.defined());
  EXPECT_EQ(out.task2_emissions.value(), m.crf_task2.emissions(tape, out.hidden).value());
  EXPECT_FALSE(m.predict(data[0].tokens, true).gate.has_value());

  const auto batch = corpus::batch_in_order(data, 4).front();
  const auto loss = m.loss(tape, batch, {}, false, nullptr);
  EXPECT_EQ(loss.values.l_task1, 0.0);
  EXPECT_EQ(loss.values.l_gate, 0.0);
  EXPECT_EQ(loss.values.total, loss.values.l_task2);
  EXPECT_GT(loss.values.l_task2, 0.0);
}

TEST(Model, ZeroWeightsGiveBiasEmissions) {
  const auto data = small_corpus();
  auto m = make_model(tiny_config(), data, 4);
  Rng rng(40);
  for (auto& [name, t] : m.named_parameters()) {
    if (name.rfind("embedding.", 0) == 0) continue;
    const bool is_bias = name.find("bias") != std::string::npos;
    t.mutable_value() =
        is_bias ? random_matrix(t.rows(), t.cols(), rng) : Matrix(t.rows(), t.cols());
  }
  Tape tape;
  const auto out = m.forward_tokens(tape, data[3].tokens, false, nullptr);
  for (std::size_t i = 0; i < data[3].size(); ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_EQ(out.task1_emissions.value()(i, k), m.crf_task1->projection.bias.value()[k]);
    }
    for (std::size_t k = 0; k < 9; ++k) {
      EXPECT_EQ(out.task2_emissions.value()(i, k), m.crf_task2.projection.bias.value()[k]);
    }
  }
}

TEST(Loss, DegenerateSchemeIsZero) {
  const TagScheme empty(std::vector<std::string>{});
  ASSERT_EQ(empty.task2().size(), 1u);
  ASSERT_EQ(empty.task1().size(), 1u);
  ASSERT_EQ(empty.num_experts(), 1u);
  const std::vector<AnnotatedSentence> data = {sentence({"a", "b", "c"}, {"O", "O", "O"}, empty),
                                               sentence({"d"}, {"O"}, empty)};
  const auto m = make_model(tiny_config(), data, 5, empty);
  Tape tape;
  const auto loss = m.loss(tape, corpus::batch_in_order(data, 2).front(), {}, false, nullptr);
  EXPECT_EQ(loss.values.l_task1, 0.0);
  EXPECT_EQ(loss.values.l_task2, 0.0);
  EXPECT_EQ(loss.values.l_gate, 0.0);
  EXPECT_EQ(loss.values.total, 0.0);
}

TEST(Loss, TotalMatchesIndependentComponents) {
  const auto data = small_corpus();
  Rng rng(60);
  for (int trial = 0; trial < 10; ++trial) {
    auto m = make_model(tiny_config(), data, 100 + trial);
    randomize_chains(m, rng);
    LossOptions options;
    options.weights = {testing::uniform(rng, 0, 2), testing::uniform(rng, 0, 2),
                       testing::uniform(rng, 0, 2)};
    options.gate_include_outside = trial % 2 == 0;
    const auto batch = corpus::batch_in_order(data, 4).front();

    double nll1 = 0.0, nll2 = 0.0, gate = 0.0;
    std::size_t tokens = 0, supervised = 0;
    for (const auto* s : batch.sentences) {
      Tape t;
      const auto out = m.forward_tokens(t, s->tokens, false, nullptr);
      nll1 += crf::log_partition(out.task1_emissions.value(), *m.crf_task1) -
              crf::sequence_score(out.task1_emissions.value(), s->tags_task1, *m.crf_task1);
      nll2 += crf::log_partition(out.task2_emissions.value(), m.crf_task2) -
              crf::sequence_score(out.task2_emissions.value(), s->tags_task2, m.crf_task2);
      for (std::size_t i = 0; i < s->size(); ++i) {
        if (!options.gate_include_outside && s->gate_labels[i] == 0) continue;
        gate -= std::log(out.alpha.value()(i, s->gate_labels[i]));
        ++supervised;
      }
      tokens += s->size();
    }
    nll1 /= static_cast<double>(tokens);
    nll2 /= static_cast<double>(tokens);
    gate /= static_cast<double>(supervised);

    Tape tape;
    const auto loss = m.loss(tape, batch, options, false, nullptr);
    EXPECT_NEAR(loss.values.l_task1, nll1, 1e-12);
    EXPECT_NEAR(loss.values.l_task2, nll2, 1e-12);
    EXPECT_NEAR(loss.values.l_gate, gate, 1e-12);
    EXPECT_NEAR(loss.values.total,
                options.weights.task1 * nll1 + options.weights.task2 * nll2 +
                    options.weights.gate * gate,
                1e-12);
    EXPECT_GE(loss.values.l_task1, 0.0);
    EXPECT_GE(loss.values.l_task2, 0.0);
    EXPECT_GE(loss.values.l_gate, 0.0);
  }
}

TEST(Loss, BaselineMatchesReferenceWiring) {
  const auto data = testing::synthetic_corpus();
  auto config = tiny_config();
  config.dropout = 0.3;
  config.num_layers = 2;
  config.mtl = false;
  config.moee = false;
  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 8;
  tc.seed = 77;
  tc.weights = {0.0, 1.0, 0.0};
  std::vector<double> observed;
  train(data, {}, conll(), config, tc, nullptr,
        [&](const BatchRecord& r) { observed.push_back(r.losses.total); });
  const auto expected =
      testing::ReferenceBiLstmCrf::train_losses(data, conll(), config, tc, nullptr);
  ASSERT_EQ(observed.size(), expected.size());
  for (std::size_t i = 0; i < observed.size(); ++i) EXPECT_EQ(observed[i], expected[i]) << i;
}

TEST(Loss, SmallAdamStepDecreasesBatchLoss) {
  const auto data = small_corpus();
  Rng rng(70);
  for (int trial = 0; trial < 5; ++trial) {
    auto m = make_model(tiny_config(), data, 200 + trial);
    randomize_chains(m, rng);
    const auto batch = corpus::batch_in_order(data, 4).front();
    auto params = m.trainable_parameters();
    numgrad::AdamConfig adam;
    adam.learning_rate = 1e-5;
    auto state = numgrad::AdamState::for_parameters(params, adam);
    Tape tape;
    const auto before = m.loss(tape, batch, {}, false, nullptr);
    tape.backward(before.total);
    numgrad::adam_step(params, state);
    Tape after_tape;
    EXPECT_LT(m.loss(after_tape, batch, {}, false, nullptr).values.total, before.values.total);
  }
}

TEST(GradCheck, EndToEndTotalLoss) {
  const std::vector<AnnotatedSentence> data = {
      sentence({"Anna", "met", "Bob"}, {"B-PER", "O", "B-PER"})};
  auto config = tiny_config(6, 4, 5);
  config.ngram.buckets = 16;
  auto m = make_model(config, data, 6);
  Rng rng(61);
  randomize_chains(m, rng);
  const auto batch = corpus::batch_in_order(data, 1).front();
  const auto params = m.trainable_parameters();
  for (const auto& p : params) EXPECT_FALSE(p.same_node(m.embedding.table));
  const auto report = numgrad::finite_difference_check(
      [&](Tape& t) { return m.loss(t, batch, {}, true, nullptr).total; }, params);
  EXPECT_TRUE(report.passed()) << report.max_relative_error();

  TrainConfig tc;
  tc.token_ce_on_marginals = true;
  const auto marginal = numgrad::finite_difference_check(
      [&](Tape& t) { return m.loss(t, batch, LossOptions::from(tc), true, nullptr).total; },
      params);
  EXPECT_TRUE(marginal.passed()) << marginal.max_relative_error();
}

TEST(Predict, AlwaysValidIob) {
  const auto data = small_corpus();
  Rng rng(80);
  auto m = make_model(tiny_config(), data, 8);
  const std::size_t k = m.crf_task2.num_tags();
  m.crf_task2.transitions.mutable_value() = random_matrix(k, k, rng, -5, 5);
  m.crf_task2.start.mutable_value() = random_matrix(1, k, rng, -5, 5);
  m.crf_task2.projection.bias.mutable_value() = random_matrix(1, k, rng, -5, 5);
  const std::vector<std::string> words = {"Anna", "Rome", "zebra", "the", "Qx", "helped"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> tokens(uniform_int(rng, 1, 9));
    for (auto& t : tokens) t = words[rng() % words.size()];
    const auto p = m.predict(tokens, true);
    EXPECT_EQ(p.tags.size(), tokens.size());
    EXPECT_TRUE(corpus::is_valid_iob(p.tags));
    ASSERT_TRUE(p.gate.has_value());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      double total = 0.0;
      for (std::size_t a = 0; a < p.gate->cols(); ++a) total += (*p.gate)(i, a);
      EXPECT_NEAR(total, 1.0, 1e-9);
    }
  }
  EXPECT_TRUE(m.predict(std::vector<std::string>{}).tags.empty());
}

TEST(Predict, PlantedPath) {
  // Word w<k> drives tag k through a saturated forward LSTM and a scaled
  // identity projection.
  const std::size_t k = conll().task2().size();
  std::vector<std::string> words = {"<pad>", "<unk>"};
  for (std::size_t t = 0; t < k; ++t) words.push_back("w" + std::to_string(t));
  ModelConfig config = tiny_config(k, k, 4);
  config.mtl = false;
  config.moee = false;
  Rng rng(9);
  auto m = ZeroResourceNerModel::create(config, conll(), corpus::Vocabulary::from_words(words),
                                        nullptr, rng);
  Matrix table(words.size(), k);
  for (std::size_t t = 0; t < k; ++t) table(t + 2, t) = 1.0;
  m.embedding.table.mutable_value() = table;
  for (auto* cell : {&m.encoder.forward[0], &m.encoder.backward[0]}) {
    for (auto p : cell->parameters()) p.mutable_value() = Matrix(p.rows(), p.cols());
  }
  auto& fwd = m.encoder.forward[0];
  for (std::size_t j = 0; j < k; ++j) {
    fwd.w_input.mutable_value()(j, 2 * k + j) = 10.0;
    fwd.bias.mutable_value()[j] = 20.0;           // input gate open
    fwd.bias.mutable_value()[k + j] = -20.0;      // forget gate closed
    fwd.bias.mutable_value()[3 * k + j] = 20.0;   // output gate open
  }
  Matrix proj(2 * k, k);
  for (std::size_t j = 0; j < k; ++j) proj(j, j) = 100.0;
  m.crf_task2.projection.weight.mutable_value() = proj;
  m.crf_task2.projection.bias.mutable_value() = Matrix(1, k);

  const corpus::TagSequence planted = {1, 2, 0, 3, 4, 4, 0, 7, 8, 5, 6};
  ASSERT_TRUE(corpus::is_valid_iob(planted));
  std::vector<std::string> tokens;
  for (int t : planted) tokens.push_back("w" + std::to_string(t));
  EXPECT_EQ(m.predict(tokens).tags, planted);
}

TEST(Training, PatienceZeroStopsAtFirstNonImprovingEpoch) {
  const auto data = testing::synthetic_corpus();
  const std::span<const AnnotatedSentence> train_set(data.data(), 40), dev(data.data() + 40, 10);
  TrainConfig tc;
  tc.epochs = 1;
  tc.patience = 0;
  tc.batch_size = 16;
  EXPECT_EQ(train(train_set, dev, conll(), tiny_config(), tc, nullptr).result.log.size(), 1u);

  tc.epochs = 8;
  const auto r = train(train_set, dev, conll(), tiny_config(), tc, nullptr).result;
  ASSERT_GE(r.best_epoch, 1u);
  EXPECT_TRUE(r.log.size() == tc.epochs || r.log.size() == r.best_epoch + 1) << r.log.size();
  for (const auto& e : r.log) EXPECT_LE(*e.val_f1, *r.best_val_f1);
}

TEST(Training, FrozenTableUnchangedOthersMove) {
  const auto data = small_corpus();
  auto m = make_model(tiny_config(), data, 11);
  const auto before = snapshot(m);
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 2;
  Rng rng(12);
  fit(m, data, {}, tc, rng);
  const auto after = snapshot(m);
  const auto names = m.named_parameters();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].first == "embedding.table") {
      EXPECT_EQ(after[i], before[i]);
    } else if (names[i].first != "embedding.ngrams") {
      EXPECT_NE(after[i], before[i]) << names[i].first;
    }
  }
}

TEST(Training, RestoresBestEpochAndLogsEachEpoch) {
  const auto data = testing::synthetic_corpus();
  const std::span<const AnnotatedSentence> train_set(data.data(), 40), dev(data.data() + 40, 10);
  TrainConfig tc;
  tc.epochs = 4;
  tc.patience = 10;
  tc.batch_size = 10;
  tc.learning_rate = 0.01;
  const auto trained = train(train_set, dev, conll(), tiny_config(), tc, nullptr);
  ASSERT_EQ(trained.result.log.size(), 4u);
  EXPECT_EQ(evaluate_f1(trained.model, dev), *trained.result.best_val_f1);
  std::ostringstream log;
  write_metrics_log(log, trained.result.log, false);
  std::istringstream lines(log.str());
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    ++count;
    EXPECT_NE(line.find("\"epoch\":" + std::to_string(count)), std::string::npos) << line;
    EXPECT_NE(line.find("\"seconds\":0.0"), std::string::npos) << line;
  }
  EXPECT_EQ(count, 4u);
}

TEST(Training, RejectsLabelsOutsideScheme) {
  const TagScheme two({"PER", "LOC"});
  const auto data = small_corpus();  // uses ORG and MISC ids
  auto m = make_model(tiny_config(), data, 13, two);
  Rng rng(1);
  EXPECT_THROW(fit(m, data, {}, TrainConfig{}, rng), SchemeError);
  EXPECT_THROW(fit(m, {}, {}, TrainConfig{}, rng), ContractError);
}

TEST(Training, SameSeedIsBitwiseReproducible) {
  const auto data = testing::synthetic_corpus();
  const std::span<const AnnotatedSentence> train_set(data.data(), 30), dev(data.data() + 30, 10);
  auto config = tiny_config();
  config.dropout = 0.2;
  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 8;
  tc.oov_train_rate = 0.3;
  auto run = [&] {
    const auto t = train(train_set, dev, conll(), config, tc, nullptr);
    std::ostringstream log, ckpt;
    write_metrics_log(log, t.result.log, false);
    save_checkpoint(t.model, &tc, ckpt);
    return std::make_pair(log.str(), ckpt.str());
  };
  const auto a = run(), b = run();
  EXPECT_EQ(a.first, b.first);
  EXPECT_TRUE(a.second == b.second);
  tc.seed = 2;
  EXPECT_FALSE(run().second == a.second);
}

TEST(Checkpoint, RoundTripIsBitwise) {
  const auto data = small_corpus();
  auto config = tiny_config();
  config.crf2_concat_hidden = true;
  auto m = make_model(config, data, 14);
  Rng rng(15);
  randomize_chains(m, rng);
  TrainConfig tc;
  tc.learning_rate = 0.0123;
  tc.weights.gate = 0.5;
  std::stringstream buf;
  save_checkpoint(m, &tc, buf);
  const auto loaded = load_checkpoint(buf, &conll());
  ASSERT_TRUE(loaded.train_config.has_value());
  EXPECT_EQ(to_key_values(*loaded.train_config), to_key_values(tc));
  EXPECT_EQ(to_key_values(loaded.model.config()), to_key_values(config));
  EXPECT_EQ(loaded.model.vocabulary().words(), m.vocabulary().words());
  EXPECT_TRUE(loaded.model.scheme() == m.scheme());
  EXPECT_EQ(snapshot(loaded.model), snapshot(m));
  for (const auto& s : data) {
    const auto a = m.predict(s.tokens, true), b = loaded.model.predict(s.tokens, true);
    EXPECT_EQ(a.tags, b.tags);
    EXPECT_EQ(*a.gate, *b.gate);
  }
  std::stringstream without;
  save_checkpoint(m, nullptr, without);
  EXPECT_FALSE(load_checkpoint(without).train_config.has_value());
}

TEST(Checkpoint, CorruptionNamesSection) {
  const auto data = small_corpus();
  const auto m = make_model(tiny_config(), data, 16);
  std::stringstream buf;
  save_checkpoint(m, nullptr, buf);
  const std::string bytes = buf.str();
  auto section_of = [](const std::string& content) {
    std::istringstream in(content);
    try {
      load_checkpoint(in);
    } catch (const CheckpointError& e) {
      return e.section();
    }
    return std::string("<loaded>");
  };
  EXPECT_EQ(section_of(bytes.substr(0, bytes.size() - 7)), "checksum");
  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x20;
  EXPECT_EQ(section_of(flipped), "checksum");
  std::string magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(section_of(magic), "header");
  std::string version = bytes;
  version[8] = 2;
  EXPECT_EQ(section_of(version), "header");
  EXPECT_EQ(section_of(""), "header");
}

TEST(Checkpoint, SchemeMismatchIsSchemeError) {
  const auto data = small_corpus();
  const auto m = make_model(tiny_config(), data, 17);
  std::stringstream buf;
  save_checkpoint(m, nullptr, buf);
  const TagScheme other({"PER", "LOC"});
  EXPECT_THROW(load_checkpoint(buf, &other), SchemeError);
}

TEST(Config, KeyValueRoundTrip) {
  ModelConfig mc;
  mc.hidden_size = 17;
  mc.dropout = 0.125;
  mc.moee = false;
  mc.ngram.min_n = 2;
  TrainConfig tc;
  tc.learning_rate = 3.3e-4;
  tc.seed = 123456789012345ULL;
  tc.weights.task1 = 0.1;
  tc.gate_include_outside = false;
  ModelConfig mc2;
  TrainConfig tc2;
  for (const auto& [k, v] : to_key_values(mc)) EXPECT_TRUE(set_key(mc2, k, v)) << k;
  for (const auto& [k, v] : to_key_values(tc)) EXPECT_TRUE(set_key(tc2, k, v)) << k;
  EXPECT_EQ(to_key_values(mc2), to_key_values(mc));
  EXPECT_EQ(to_key_values(tc2), to_key_values(tc));
  EXPECT_EQ(tc2.learning_rate, 3.3e-4);
  EXPECT_EQ(mc2.dropout, 0.125);
}

TEST(Config, UnknownKeysAndBadValues) {
  ModelConfig mc;
  TrainConfig tc;
  EXPECT_FALSE(set_key(mc, "hiden_size", "3"));
  EXPECT_FALSE(set_key(tc, "learning_rate_", "3"));
  EXPECT_THROW(set_key(mc, "hidden_size", "three"), FormatError);
  EXPECT_THROW(set_key(mc, "mtl", "maybe"), FormatError);
  EXPECT_THROW(set_key(tc, "learning_rate", "1e-3x"), FormatError);
  EXPECT_TRUE(set_key(mc, "mtl", "no"));
  EXPECT_FALSE(mc.mtl);
  mc.dropout = 1.0;
  EXPECT_THROW(validate(mc), FormatError);
  tc.batch_size = 0;
  EXPECT_THROW(validate(tc), FormatError);
}

TEST(Config, DefaultsFollowTrainingSetup) {
  const ModelConfig mc;
  const TrainConfig tc;
  EXPECT_EQ(tc.learning_rate, 1e-3);
  EXPECT_EQ(tc.batch_size, 32u);
  EXPECT_EQ(mc.dropout, 0.3);
  EXPECT_EQ(mc.hidden_size, 200u);
  EXPECT_EQ(mc.num_layers, 2u);
  EXPECT_EQ(mc.expert_dim, 200u);
  EXPECT_EQ(tc.epochs, 30u);
  EXPECT_EQ(tc.patience, 5u);
  EXPECT_EQ(tc.weights.task1, 1.0);
  EXPECT_EQ(tc.weights.task2, 1.0);
  EXPECT_EQ(tc.weights.gate, 1.0);
}

}  // namespace
}  // namespace zrner::model
