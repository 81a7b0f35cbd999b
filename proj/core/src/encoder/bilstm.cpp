#include "zrner/encoder.hpp"
#include "zrner/error.hpp"
#include "zrner/numgrad/init.hpp"

namespace zrner::encoder {

using numgrad::Matrix;

LstmCell LstmCell::create(std::size_t input_dim, std::size_t hidden, Rng& rng) {
  LstmCell cell;
  cell.w_input = Tensor::parameter(numgrad::uniform_fan_in(input_dim, 4 * hidden, input_dim, rng));
  cell.w_hidden = Tensor::parameter(numgrad::uniform_fan_in(hidden, 4 * hidden, hidden, rng));
  Matrix bias(1, 4 * hidden);
  for (std::size_t j = hidden; j < 2 * hidden; ++j) bias[j] = 1.0;
  cell.bias = Tensor::parameter(std::move(bias));
  return cell;
}

LstmState zero_state(std::size_t hidden) {
  return {Tensor::constant(Matrix(1, hidden)), Tensor::constant(Matrix(1, hidden))};
}

namespace {

// `preactivation` holds x W_input + bias for this step.
LstmState step_from_preactivation(Tape& tape, const LstmCell& cell, const Tensor& preactivation,
                                  const LstmState& prev) {
  const std::size_t H = cell.hidden_size();
  Tensor gates = tape.add(preactivation, tape.matmul(prev.h, cell.w_hidden));
  Tensor input_gate = tape.sigmoid(tape.slice_cols(gates, 0, H));
  Tensor forget_gate = tape.sigmoid(tape.slice_cols(gates, H, 2 * H));
  Tensor candidate = tape.tanh(tape.slice_cols(gates, 2 * H, 3 * H));
  Tensor output_gate = tape.sigmoid(tape.slice_cols(gates, 3 * H, 4 * H));
  Tensor c = tape.add(tape.mul(forget_gate, prev.c), tape.mul(input_gate, candidate));
  Tensor h = tape.mul(output_gate, tape.tanh(c));
  return {h, c};
}

}  // namespace

LstmState lstm_step(Tape& tape, const LstmCell& cell, const Tensor& x, const LstmState& prev) {
  if (x.rows() != 1 || x.cols() != cell.input_dim()) {
    throw ContractError("lstm_step: input " + numgrad::to_string(x.shape()) +
                        " does not match cell input width " + std::to_string(cell.input_dim()));
  }
  return step_from_preactivation(tape, cell, tape.add_bias(tape.matmul(x, cell.w_input), cell.bias),
                                 prev);
}

Tensor run_lstm(Tape& tape, const LstmCell& cell, const Tensor& inputs, bool reverse) {
  if (inputs.cols() != cell.input_dim()) {
    throw ContractError("run_lstm: input " + numgrad::to_string(inputs.shape()) +
                        " does not match cell input width " + std::to_string(cell.input_dim()));
  }
  const std::size_t n = inputs.rows();
  Tensor pre = tape.add_bias(tape.matmul(inputs, cell.w_input), cell.bias);
  std::vector<Tensor> outputs(n);
  LstmState state = zero_state(cell.hidden_size());
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = reverse ? n - 1 - step : step;
    state = step_from_preactivation(tape, cell, tape.slice_rows(pre, t, t + 1), state);
    outputs[t] = state.h;
  }
  return tape.concat_rows(outputs);
}

BiLstmEncoder BiLstmEncoder::create(std::size_t input_dim, std::size_t hidden, std::size_t layers,
                                    Rng& rng) {
  if (layers == 0 || hidden == 0 || input_dim == 0) {
    throw ContractError("BiLstmEncoder: dimensions and layer count must be positive");
  }
  BiLstmEncoder enc;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = l == 0 ? input_dim : 2 * hidden;
    enc.forward.push_back(LstmCell::create(in, hidden, rng));
    enc.backward.push_back(LstmCell::create(in, hidden, rng));
  }
  return enc;
}

std::vector<Tensor> BiLstmEncoder::parameters() const {
  std::vector<Tensor> params;
  for (std::size_t l = 0; l < forward.size(); ++l) {
    for (const auto& p : forward[l].parameters()) params.push_back(p);
    for (const auto& p : backward[l].parameters()) params.push_back(p);
  }
  return params;
}

Tensor BiLstmEncoder::encode(Tape& tape, const Tensor& embeddings, bool training, double dropout,
                             Rng* rng) const {
  if (embeddings.cols() != input_dim()) {
    throw ContractError("encode: embeddings " + numgrad::to_string(embeddings.shape()) +
                        " do not match encoder input width " + std::to_string(input_dim()));
  }
  Tensor x = embeddings;
  for (std::size_t l = 0; l < forward.size(); ++l) {
    if (l > 0 && training && dropout > 0.0) {
      if (!rng) throw ContractError("encode: dropout in training mode needs a generator");
      x = tape.dropout(x, dropout, *rng, true);
    }
    const Tensor parts[] = {run_lstm(tape, forward[l], x, false), run_lstm(tape, backward[l], x, true)};
    x = tape.concat_cols(parts);
  }
  return x;
}

}  // namespace zrner::encoder
