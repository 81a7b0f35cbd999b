#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "zrner/crf.hpp"
#include "zrner/encoder.hpp"
#include "zrner/model.hpp"
#include "zrner/numgrad/adam.hpp"

namespace {

using namespace zrner;
using numgrad::Matrix;
using numgrad::Rng;

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = u(rng);
  return m;
}

crf::CrfHead random_head(std::size_t k, Rng& rng) {
  return crf::CrfHead::from_scores(random_matrix(k, k, rng), random_matrix(1, k, rng),
                                   random_matrix(1, k, rng));
}

// Args: sentence length, tag count.
void BM_Viterbi(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto head = random_head(k, rng);
  const auto e = random_matrix(n, k, rng);
  for (auto _ : state) benchmark::DoNotOptimize(crf::viterbi(e, head));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Viterbi)->Args({20, 9})->Args({50, 9})->Args({50, 17});

void BM_LogPartition(benchmark::State& state) {
  Rng rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto head = random_head(k, rng);
  const auto e = random_matrix(n, k, rng);
  for (auto _ : state) benchmark::DoNotOptimize(crf::log_partition(e, head));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_LogPartition)->Args({20, 9})->Args({50, 9})->Args({50, 17});

// Args: sentence length, hidden size per direction.
void BM_EncoderForward(benchmark::State& state) {
  Rng rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto h = static_cast<std::size_t>(state.range(1));
  const auto enc = encoder::BiLstmEncoder::create(100, h, 1, rng);
  const auto x = numgrad::Tensor::constant(random_matrix(n, 100, rng));
  for (auto _ : state) {
    numgrad::Tape tape;
    benchmark::DoNotOptimize(enc.encode(tape, x, false, 0.0, nullptr));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EncoderForward)->Args({20, 64})->Args({20, 128});

std::vector<corpus::AnnotatedSentence> random_corpus(const corpus::TagScheme& scheme,
                                                     std::size_t sentences, std::size_t length,
                                                     Rng& rng) {
  std::uniform_int_distribution<int> word(0, 499), tag(0, 3);
  std::vector<corpus::AnnotatedSentence> out;
  for (std::size_t s = 0; s < sentences; ++s) {
    std::vector<std::string> tokens;
    corpus::TagSequence tags;
    for (std::size_t i = 0; i < length; ++i) {
      tokens.push_back("w" + std::to_string(word(rng)));
      const int t = tag(rng);
      tags.push_back(t == 0 ? 0 : scheme.task2().id("B-" + scheme.entity_categories()[t - 1]));
    }
    out.push_back(corpus::annotate(std::move(tokens), std::move(tags), scheme));
  }
  return out;
}

// One optimizer step on a batch of 8 sentences of 20 tokens. Arg: 1 for the
// full model, 0 for the plain BiLSTM-CRF.
void BM_TrainStep(benchmark::State& state) {
  Rng rng(4);
  const auto scheme = corpus::TagScheme::conll2003();
  const auto data = random_corpus(scheme, 8, 20, rng);
  model::ModelConfig mc;
  mc.embedding_dim = 50;
  mc.hidden_size = 64;
  mc.expert_dim = 64;
  mc.mtl = mc.moee = state.range(0) != 0;
  mc.freeze_embeddings = false;
  auto m = model::ZeroResourceNerModel::create(mc, scheme, corpus::Vocabulary::build(data),
                                               nullptr, rng);
  const auto batch = corpus::batch_in_order(data, 8).front();
  auto params = m.trainable_parameters();
  auto adam = numgrad::AdamState::for_parameters(params);
  for (auto _ : state) {
    numgrad::Tape tape;
    auto loss = m.loss(tape, batch, {}, true, &rng);
    tape.backward(loss.total);
    numgrad::adam_step(params, adam);
  }
  state.SetItemsProcessed(state.iterations() * 160);
}
BENCHMARK(BM_TrainStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
