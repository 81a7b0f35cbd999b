#include "zrner/numgrad/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zrner/error.hpp"

namespace zrner::numgrad {

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor(Matrix value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::parameter(Matrix value) {
  Tensor t(std::move(value), true);
  t.grad_buffer();
  return t;
}

void Tensor::set_requires_grad(bool on) {
  node_->requires_grad = on;
  if (!on) node_->grad = Matrix();
}

double Tensor::item() const {
  if (node_->value.size() != 1) {
    throw ContractError("Tensor::item on non-scalar " + to_string(shape()));
  }
  return node_->value[0];
}

Matrix& Tensor::grad_buffer() const {
  if (node_->grad.empty() && !node_->value.empty()) {
    node_->grad = Matrix(node_->value.rows(), node_->value.cols());
  }
  return node_->grad;
}

void Tensor::zero_grad() {
  if (!node_->grad.empty()) node_->grad.fill(0.0);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------
// Tape plumbing

namespace {

[[noreturn]] void shape_error(std::string_view op, const Shape& a, const Shape& b) {
  throw ContractError(std::string(op) + ": incompatible shapes " + to_string(a) + " and " +
                      to_string(b));
}

bool any_requires_grad(std::span<const Tensor> inputs) {
  return std::any_of(inputs.begin(), inputs.end(),
                     [](const Tensor& t) { return t.requires_grad(); });
}

}  // namespace

Tensor Tape::finish(std::string_view op, Matrix value, bool needs_grad) {
  if (checked_ && !value.all_finite()) {
    throw NumericError(std::string(op) + ": non-finite value in output " +
                       to_string(value.shape()));
  }
  return Tensor(std::move(value), needs_grad);
}

Tensor Tape::record(std::string_view op, Matrix value, std::initializer_list<Tensor> inputs,
                    BackwardFn backward) {
  return record(op, std::move(value), std::span<const Tensor>(inputs.begin(), inputs.size()),
                std::move(backward));
}

Tensor Tape::record(std::string_view op, Matrix value, std::span<const Tensor> inputs,
                    BackwardFn backward) {
  const bool needs_grad = any_requires_grad(inputs);
  Tensor out = finish(op, std::move(value), needs_grad);
  if (needs_grad) entries_.push_back({out, std::move(backward)});
  return out;
}

void Tape::backward(const Tensor& loss) {
  if (loss.value().size() != 1) {
    throw ContractError("backward: loss must be scalar, got " + to_string(loss.shape()));
  }
  if (!loss.requires_grad()) return;
  for (auto& entry : entries_) entry.output.drop_grad();
  loss.grad_buffer()[0] += 1.0;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->output.has_grad()) it->backward(it->output.grad());
  }
}

// ---------------------------------------------------------------------------
// Elementwise and linear algebra

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  if (A.cols() != B.rows()) shape_error("matmul", A.shape(), B.shape());
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  Matrix out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = &out(i, 0);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = A(i, p);
      if (av == 0.0) continue;
      const double* brow = &B(p, 0);
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
  return record("matmul", std::move(out), {a, b}, [a, b, m, k, n](const Matrix& g) {
    const Matrix& A = a.value();
    const Matrix& B = b.value();
    if (a.requires_grad()) {
      Matrix& ga = a.grad_buffer();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double* grow = &g(i, 0);
          const double* brow = &B(p, 0);
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
          ga(i, p) += acc;
        }
    }
    if (b.requires_grad()) {
      Matrix& gb = b.grad_buffer();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double av = A(i, p);
          if (av == 0.0) continue;
          const double* grow = &g(i, 0);
          double* gbrow = &gb(p, 0);
          for (std::size_t j = 0; j < n; ++j) gbrow[j] += av * grow[j];
        }
    }
  });
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_error("add", a.shape(), b.shape());
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return record("add", std::move(out), {a, b}, [a, b](const Matrix& g) {
    for (const Tensor* t : {&a, &b}) {
      if (!t->requires_grad()) continue;
      Matrix& gt = t->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) gt[i] += g[i];
    }
  });
}

Tensor Tape::sub(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_error("sub", a.shape(), b.shape());
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return record("sub", std::move(out), {a, b}, [a, b](const Matrix& g) {
    if (a.requires_grad()) {
      Matrix& ga = a.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (b.requires_grad()) {
      Matrix& gb = b.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

Tensor Tape::mul(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_error("mul", a.shape(), b.shape());
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return record("mul", std::move(out), {a, b}, [a, b](const Matrix& g) {
    if (a.requires_grad()) {
      Matrix& ga = a.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b.value()[i];
    }
    if (b.requires_grad()) {
      Matrix& gb = b.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a.value()[i];
    }
  });
}

Tensor Tape::scale(const Tensor& x, double factor) {
  Matrix out = x.value();
  for (double& v : out.values()) v *= factor;
  return record("scale", std::move(out), {x}, [x, factor](const Matrix& g) {
    Matrix& gx = x.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * factor;
  });
}

Tensor Tape::add_bias(const Tensor& x, const Tensor& bias) {
  if (bias.rows() != 1 || bias.cols() != x.cols()) shape_error("add_bias", x.shape(), bias.shape());
  Matrix out = x.value();
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += bias.value()[c];
  return record("add_bias", std::move(out), {x, bias}, [x, bias](const Matrix& g) {
    if (x.requires_grad()) {
      Matrix& gx = x.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    }
    if (bias.requires_grad()) {
      Matrix& gb = bias.grad_buffer();
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) gb[c] += g(r, c);
    }
  });
}

Tensor Tape::scale_rows(const Tensor& x, const Tensor& s) {
  if (s.cols() != 1 || s.rows() != x.rows()) shape_error("scale_rows", x.shape(), s.shape());
  Matrix out = x.value();
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (double& v : out.row(r)) v *= s.value()[r];
  return record("scale_rows", std::move(out), {x, s}, [x, s](const Matrix& g) {
    if (x.requires_grad()) {
      Matrix& gx = x.grad_buffer();
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) gx(r, c) += g(r, c) * s.value()[r];
    }
    if (s.requires_grad()) {
      Matrix& gs = s.grad_buffer();
      for (std::size_t r = 0; r < g.rows(); ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < g.cols(); ++c) acc += g(r, c) * x.value()(r, c);
        gs[r] += acc;
      }
    }
  });
}

Tensor Tape::tanh(const Tensor& x) {
  Matrix out = x.value();
  for (double& v : out.values()) v = std::tanh(v);
  Tensor y = record("tanh", std::move(out), {x}, nullptr);
  if (y.requires_grad()) {
    entries_.back().backward = [x, y = y.value()](const Matrix& g) {
      Matrix& gx = x.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (1.0 - y[i] * y[i]);
    };
  }
  return y;
}

Tensor Tape::sigmoid(const Tensor& x) {
  Matrix out = x.value();
  for (double& v : out.values()) v = 1.0 / (1.0 + std::exp(-v));
  Tensor y = record("sigmoid", std::move(out), {x}, nullptr);
  if (y.requires_grad()) {
    entries_.back().backward = [x, y = y.value()](const Matrix& g) {
      Matrix& gx = x.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
    };
  }
  return y;
}

Tensor Tape::log(const Tensor& x) {
  Matrix out = x.value();
  for (double& v : out.values()) v = std::log(v);
  return record("log", std::move(out), {x}, [x](const Matrix& g) {
    Matrix& gx = x.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] / x.value()[i];
  });
}

// ---------------------------------------------------------------------------
// Structural ops

Tensor Tape::concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) shape_error("concat_cols", parts.front().shape(), p.shape());
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < rows; ++r)
      std::copy(p.value().row(r).begin(), p.value().row(r).end(), &out(r, offset));
    offset += p.cols();
  }
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return record("concat_cols", std::move(out), parts, [inputs](const Matrix& g) {
    std::size_t offset = 0;
    for (const auto& p : inputs) {
      if (p.requires_grad()) {
        Matrix& gp = p.grad_buffer();
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < p.cols(); ++c) gp(r, c) += g(r, offset + c);
      }
      offset += p.cols();
    }
  });
}

Tensor Tape::concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw ContractError("concat_rows: no inputs");
  const std::size_t cols = parts.front().cols();
  std::size_t rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) shape_error("concat_rows", parts.front().shape(), p.shape());
    rows += p.rows();
  }
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const auto& p : parts) data.insert(data.end(), p.value().storage().begin(), p.value().storage().end());
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return record("concat_rows", Matrix(rows, cols, std::move(data)), parts,
                [inputs](const Matrix& g) {
                  std::size_t offset = 0;
                  for (const auto& p : inputs) {
                    if (p.requires_grad()) {
                      Matrix& gp = p.grad_buffer();
                      for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += g[offset + i];
                    }
                    offset += p.value().size();
                  }
                });
}

Tensor Tape::slice_cols(const Tensor& x, std::size_t begin, std::size_t end) {
  if (begin >= end || end > x.cols()) {
    throw ContractError("slice_cols: range [" + std::to_string(begin) + ", " +
                        std::to_string(end) + ") out of " + to_string(x.shape()));
  }
  Matrix out(x.rows(), end - begin);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = begin; c < end; ++c) out(r, c - begin) = x.value()(r, c);
  return record("slice_cols", std::move(out), {x}, [x, begin](const Matrix& g) {
    Matrix& gx = x.grad_buffer();
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < g.cols(); ++c) gx(r, begin + c) += g(r, c);
  });
}

Tensor Tape::slice_rows(const Tensor& x, std::size_t begin, std::size_t end) {
  if (begin >= end || end > x.rows()) {
    throw ContractError("slice_rows: range [" + std::to_string(begin) + ", " +
                        std::to_string(end) + ") out of " + to_string(x.shape()));
  }
  const std::size_t cols = x.cols();
  std::vector<double> data(x.value().storage().begin() + begin * cols,
                           x.value().storage().begin() + end * cols);
  return record("slice_rows", Matrix(end - begin, cols, std::move(data)), {x},
                [x, begin, cols](const Matrix& g) {
                  Matrix& gx = x.grad_buffer();
                  for (std::size_t i = 0; i < g.size(); ++i) gx[begin * cols + i] += g[i];
                });
}

// ---------------------------------------------------------------------------
// Normalizations

Tensor Tape::softmax(const Tensor& x) {
  Matrix out = x.value();
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double lse = numgrad::logsumexp(row);
    for (double& v : row) v = std::exp(v - lse);
  }
  Tensor y = record("softmax", std::move(out), {x}, nullptr);
  if (y.requires_grad()) {
    entries_.back().backward = [x, y = y.value()](const Matrix& g) {
      Matrix& gx = x.grad_buffer();
      for (std::size_t r = 0; r < g.rows(); ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < g.cols(); ++c) dot += g(r, c) * y(r, c);
        for (std::size_t c = 0; c < g.cols(); ++c) gx(r, c) += y(r, c) * (g(r, c) - dot);
      }
    };
  }
  return y;
}

Tensor Tape::log_softmax(const Tensor& x) {
  Matrix out = x.value();
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double lse = numgrad::logsumexp(row);
    for (double& v : row) v -= lse;
  }
  Tensor y = record("log_softmax", std::move(out), {x}, nullptr);
  if (y.requires_grad()) {
    entries_.back().backward = [x, y = y.value()](const Matrix& g) {
      Matrix& gx = x.grad_buffer();
      for (std::size_t r = 0; r < g.rows(); ++r) {
        double total = 0.0;
        for (std::size_t c = 0; c < g.cols(); ++c) total += g(r, c);
        for (std::size_t c = 0; c < g.cols(); ++c) gx(r, c) += g(r, c) - std::exp(y(r, c)) * total;
      }
    };
  }
  return y;
}

Tensor Tape::logsumexp(const Tensor& x) {
  Matrix out(x.rows(), 1);
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = numgrad::logsumexp(x.value().row(r));
  Tensor y = record("logsumexp", std::move(out), {x}, nullptr);
  if (y.requires_grad()) {
    entries_.back().backward = [x, y = y.value()](const Matrix& g) {
      Matrix& gx = x.grad_buffer();
      for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c)
          gx(r, c) += g[r] * std::exp(x.value()(r, c) - y[r]);
    };
  }
  return y;
}

// ---------------------------------------------------------------------------
// Reductions and indexing

Tensor Tape::sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.value().values()) total += v;
  return record("sum", Matrix::scalar(total), {x}, [x](const Matrix& g) {
    Matrix& gx = x.grad_buffer();
    for (double& v : gx.values()) v += g[0];
  });
}

Tensor Tape::mean_rows(const Tensor& x) {
  if (x.rows() == 0) throw ContractError("mean_rows: empty input");
  const double inv = 1.0 / static_cast<double>(x.rows());
  Matrix out(1, x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out[c] += x.value()(r, c);
  for (double& v : out.values()) v *= inv;
  return record("mean_rows", std::move(out), {x}, [x, inv](const Matrix& g) {
    Matrix& gx = x.grad_buffer();
    for (std::size_t r = 0; r < x.rows(); ++r)
      for (std::size_t c = 0; c < x.cols(); ++c) gx(r, c) += g[c] * inv;
  });
}

Tensor Tape::pick(const Tensor& x, std::span<const int> cols) {
  if (cols.size() != x.rows()) {
    throw ContractError("pick: " + std::to_string(cols.size()) + " indices for " +
                        to_string(x.shape()));
  }
  Matrix out(x.rows(), 1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (cols[r] < 0 || static_cast<std::size_t>(cols[r]) >= x.cols()) {
      throw ContractError("pick: column " + std::to_string(cols[r]) + " out of " +
                          to_string(x.shape()));
    }
    out[r] = x.value()(r, cols[r]);
  }
  std::vector<int> idx(cols.begin(), cols.end());
  return record("pick", std::move(out), {x}, [x, idx = std::move(idx)](const Matrix& g) {
    Matrix& gx = x.grad_buffer();
    for (std::size_t r = 0; r < idx.size(); ++r) gx(r, idx[r]) += g[r];
  });
}

Tensor Tape::dropout(const Tensor& x, double rate, Rng& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ContractError("dropout: rate " + std::to_string(rate) + " outside [0, 1)");
  }
  if (!training || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  Matrix mask(x.rows(), x.cols());
  for (double& m : mask.values()) m = uniform01(rng) < rate ? 0.0 : keep_scale;
  Matrix out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return record("dropout", std::move(out), {x}, [x, mask = std::move(mask)](const Matrix& g) {
    Matrix& gx = x.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * mask[i];
  });
}

Tensor Tape::embedding_lookup(const Tensor& table, std::size_t index) {
  const std::size_t idx[] = {index};
  return gather_rows(table, idx);
}

Tensor Tape::gather_rows(const Tensor& table, std::span<const std::size_t> indices) {
  if (indices.empty()) throw ContractError("gather_rows: no indices");
  const std::size_t cols = table.cols();
  Matrix out(indices.size(), cols);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= table.rows()) {
      throw ContractError("gather_rows: index " + std::to_string(indices[i]) + " out of " +
                          to_string(table.shape()));
    }
    const auto src = table.value().row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return record("gather_rows", std::move(out), {table},
                [table, idx = std::move(idx)](const Matrix& g) {
                  Matrix& gt = table.grad_buffer();
                  for (std::size_t i = 0; i < idx.size(); ++i)
                    for (std::size_t c = 0; c < g.cols(); ++c) gt(idx[i], c) += g(i, c);
                });
}

}  // namespace zrner::numgrad
