#include "zrner/crf.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "zrner/error.hpp"

namespace zrner::crf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_emissions(const Matrix& emissions, const CrfHead& head, const char* op) {
  if (emissions.rows() == 0) throw ContractError(std::string(op) + ": empty sequence");
  if (emissions.cols() != head.num_tags()) {
    throw ContractError(std::string(op) + ": emissions " + numgrad::to_string(emissions.shape()) +
                        " do not match " + std::to_string(head.num_tags()) + " tags");
  }
}

void check_tags(std::span<const int> tags, const Matrix& emissions, const char* op) {
  if (tags.size() != emissions.rows()) {
    throw ContractError(std::string(op) + ": " + std::to_string(tags.size()) + " tags for " +
                        std::to_string(emissions.rows()) + " positions");
  }
  for (int t : tags) {
    if (t < 0 || static_cast<std::size_t>(t) >= emissions.cols()) {
      throw ContractError(std::string(op) + ": tag " + std::to_string(t) + " out of range");
    }
  }
}

// Forward (alpha) and backward (beta) log-space tables. alpha(i, k) includes
// the emission at i; beta(i, k) covers positions after i plus the stop score.
// When clamp_position >= 0, every tag except clamp_tag is excluded there.
struct Lattice {
  Matrix alpha;
  Matrix beta;
  double log_z = 0.0;
};

double effective_emission(const Matrix& e, std::size_t i, std::size_t k, long clamp_position,
                          int clamp_tag) {
  if (static_cast<long>(i) == clamp_position && static_cast<int>(k) != clamp_tag) return kNegInf;
  return e(i, k);
}

Lattice run_lattice(const Matrix& e, const Matrix& T, const Matrix& start, const Matrix& stop,
                    long clamp_position, int clamp_tag, bool with_beta) {
  const std::size_t n = e.rows();
  const std::size_t K = e.cols();
  Lattice lat;
  lat.alpha = Matrix(n, K);
  std::vector<double> terms(K);
  for (std::size_t k = 0; k < K; ++k) {
    lat.alpha(0, k) = start[k] + effective_emission(e, 0, k, clamp_position, clamp_tag);
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t b = 0; b < K; ++b) {
      for (std::size_t a = 0; a < K; ++a) terms[a] = lat.alpha(i - 1, a) + T(a, b);
      lat.alpha(i, b) =
          numgrad::logsumexp(terms) + effective_emission(e, i, b, clamp_position, clamp_tag);
    }
  }
  for (std::size_t k = 0; k < K; ++k) terms[k] = lat.alpha(n - 1, k) + stop[k];
  lat.log_z = numgrad::logsumexp(terms);

  if (with_beta) {
    lat.beta = Matrix(n, K);
    for (std::size_t k = 0; k < K; ++k) lat.beta(n - 1, k) = stop[k];
    for (std::size_t i = n - 1; i-- > 0;) {
      for (std::size_t a = 0; a < K; ++a) {
        for (std::size_t b = 0; b < K; ++b) {
          terms[b] = T(a, b) + effective_emission(e, i + 1, b, clamp_position, clamp_tag) +
                     lat.beta(i + 1, b);
        }
        lat.beta(i, a) = numgrad::logsumexp(terms);
      }
    }
  }
  return lat;
}

Tensor lattice_op(Tape& tape, const Tensor& emissions, const CrfHead& head, long clamp_position,
                  int clamp_tag) {
  check_emissions(emissions.value(), head, "log_partition");
  Lattice value = run_lattice(emissions.value(), head.transitions.value(), head.start.value(),
                              head.stop.value(), clamp_position, clamp_tag, false);
  Tensor e = emissions, T = head.transitions, start = head.start, stop = head.stop;
  return tape.record(
      "crf_log_partition", Matrix::scalar(value.log_z), {e, T, start, stop},
      [e, T, start, stop, clamp_position, clamp_tag](const Matrix& g) {
        const Matrix& E = e.value();
        const std::size_t n = E.rows(), K = E.cols();
        const Lattice lat = run_lattice(E, T.value(), start.value(), stop.value(), clamp_position,
                                        clamp_tag, true);
        const double scale = g[0];
        auto unary = [&](std::size_t i, std::size_t k) {
          return std::exp(lat.alpha(i, k) + lat.beta(i, k) - lat.log_z);
        };
        if (e.requires_grad()) {
          Matrix& ge = e.grad_buffer();
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < K; ++k) ge(i, k) += scale * unary(i, k);
        }
        if (start.requires_grad()) {
          Matrix& gs = start.grad_buffer();
          for (std::size_t k = 0; k < K; ++k) gs[k] += scale * unary(0, k);
        }
        if (stop.requires_grad()) {
          Matrix& gs = stop.grad_buffer();
          for (std::size_t k = 0; k < K; ++k) gs[k] += scale * unary(n - 1, k);
        }
        if (T.requires_grad()) {
          Matrix& gt = T.grad_buffer();
          const Matrix& trans = T.value();
          for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t a = 0; a < K; ++a) {
              if (lat.alpha(i, a) == kNegInf) continue;
              for (std::size_t b = 0; b < K; ++b) {
                const double eb = effective_emission(E, i + 1, b, clamp_position, clamp_tag);
                gt(a, b) += scale * std::exp(lat.alpha(i, a) + trans(a, b) + eb +
                                             lat.beta(i + 1, b) - lat.log_z);
              }
            }
        }
      });
}

}  // namespace

// ---------------------------------------------------------------------------
// CrfHead

CrfHead CrfHead::create(std::size_t input_dim, std::size_t num_tags, Rng& rng) {
  if (num_tags == 0) throw ContractError("CrfHead: need at least one tag");
  CrfHead head;
  head.projection = numgrad::Affine::create(input_dim, num_tags, rng);
  head.transitions = Tensor::parameter(Matrix(num_tags, num_tags));
  head.start = Tensor::parameter(Matrix(1, num_tags));
  head.stop = Tensor::parameter(Matrix(1, num_tags));
  return head;
}

CrfHead CrfHead::from_scores(Matrix transitions, Matrix start, Matrix stop) {
  const std::size_t K = transitions.rows();
  if (K == 0 || transitions.cols() != K || start.shape() != numgrad::Shape{1, K} ||
      stop.shape() != numgrad::Shape{1, K}) {
    throw ContractError("CrfHead::from_scores: inconsistent score shapes");
  }
  CrfHead head;
  head.projection = {Tensor::parameter(Matrix(1, K)), Tensor::parameter(Matrix(1, K))};
  head.transitions = Tensor::parameter(std::move(transitions));
  head.start = Tensor::parameter(std::move(start));
  head.stop = Tensor::parameter(std::move(stop));
  return head;
}

std::vector<Tensor> CrfHead::parameters() const {
  return {projection.weight, projection.bias, transitions, start, stop};
}

Tensor CrfHead::emissions(Tape& tape, const Tensor& features) const {
  if (features.cols() != input_dim()) {
    throw ContractError("CrfHead::emissions: features " + numgrad::to_string(features.shape()) +
                        " do not match input width " + std::to_string(input_dim()));
  }
  return projection.apply(tape, features);
}

DecodeConstraints iob_constraints(const corpus::TagSet& tags, double penalty) {
  const std::size_t K = tags.size();
  DecodeConstraints c{Matrix(K, K), Matrix(1, K)};
  for (std::size_t b = 0; b < K; ++b) {
    if (!corpus::TagSet::allowed_at_start(static_cast<int>(b))) c.start[b] = penalty;
    for (std::size_t a = 0; a < K; ++a) {
      if (!corpus::TagSet::allowed_after(static_cast<int>(a), static_cast<int>(b))) {
        c.transitions(a, b) = penalty;
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Value-level algorithms

double sequence_score(const Matrix& emissions, std::span<const int> tags, const CrfHead& head) {
  check_emissions(emissions, head, "sequence_score");
  check_tags(tags, emissions, "sequence_score");
  const Matrix& T = head.transitions.value();
  // Same association order as the forward recursion, so K = 1 gives an
  // exactly zero NLL.
  double score = head.start.value()[tags.front()] + emissions(0, tags.front());
  for (std::size_t i = 1; i < tags.size(); ++i) {
    score = (score + T(tags[i - 1], tags[i])) + emissions(i, tags[i]);
  }
  return score + head.stop.value()[tags.back()];
}

double log_partition(const Matrix& emissions, const CrfHead& head) {
  check_emissions(emissions, head, "log_partition");
  return run_lattice(emissions, head.transitions.value(), head.start.value(), head.stop.value(), -1,
                     0, false)
      .log_z;
}

ViterbiResult viterbi(const Matrix& emissions, const CrfHead& head,
                      const DecodeConstraints* constraints) {
  check_emissions(emissions, head, "viterbi");
  const std::size_t n = emissions.rows();
  const std::size_t K = emissions.cols();
  Matrix T = head.transitions.value();
  Matrix start = head.start.value();
  if (constraints) {
    if (constraints->transitions.shape() != T.shape() || constraints->start.shape() != start.shape()) {
      throw ContractError("viterbi: constraint shapes do not match the head");
    }
    for (std::size_t i = 0; i < T.size(); ++i) T[i] += constraints->transitions[i];
    for (std::size_t i = 0; i < start.size(); ++i) start[i] += constraints->start[i];
  }
  const Matrix& stop = head.stop.value();

  Matrix delta(n, K);
  std::vector<std::vector<int>> backpointer(n, std::vector<int>(K, 0));
  for (std::size_t k = 0; k < K; ++k) delta(0, k) = start[k] + emissions(0, k);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t b = 0; b < K; ++b) {
      double best = delta(i - 1, 0) + T(0, b);
      int arg = 0;
      for (std::size_t a = 1; a < K; ++a) {
        const double s = delta(i - 1, a) + T(a, b);
        if (s > best) {
          best = s;
          arg = static_cast<int>(a);
        }
      }
      delta(i, b) = best + emissions(i, b);
      backpointer[i][b] = arg;
    }
  }
  double best = delta(n - 1, 0) + stop[0];
  int last = 0;
  for (std::size_t k = 1; k < K; ++k) {
    const double s = delta(n - 1, k) + stop[k];
    if (s > best) {
      best = s;
      last = static_cast<int>(k);
    }
  }
  ViterbiResult result;
  result.score = best;
  result.tags.assign(n, 0);
  result.tags[n - 1] = last;
  for (std::size_t i = n - 1; i > 0; --i) result.tags[i - 1] = backpointer[i][result.tags[i]];
  return result;
}

namespace {

// Calls visit(tags) for every sequence in lexicographic order.
template <typename Visit>
void enumerate_sequences(std::size_t n, std::size_t K, double limit, Visit&& visit) {
  if (std::pow(static_cast<double>(K), static_cast<double>(n)) > limit) {
    throw GuardError("brute force: " + std::to_string(K) + "^" + std::to_string(n) +
                     " sequences exceed the enumeration limit");
  }
  std::vector<int> tags(n, 0);
  while (true) {
    visit(std::span<const int>(tags));
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (static_cast<std::size_t>(++tags[pos]) < K) break;
      tags[pos] = 0;
      if (pos == 0) return;
    }
  }
}

}  // namespace

double brute_force_log_partition(const Matrix& emissions, const CrfHead& head, double limit) {
  check_emissions(emissions, head, "brute_force_log_partition");
  std::vector<double> scores;
  enumerate_sequences(emissions.rows(), emissions.cols(), limit, [&](std::span<const int> tags) {
    scores.push_back(sequence_score(emissions, tags, head));
  });
  return numgrad::logsumexp(scores);
}

ViterbiResult brute_force_best(const Matrix& emissions, const CrfHead& head, double limit) {
  check_emissions(emissions, head, "brute_force_best");
  ViterbiResult best;
  best.score = kNegInf;
  enumerate_sequences(emissions.rows(), emissions.cols(), limit, [&](std::span<const int> tags) {
    const double s = sequence_score(emissions, tags, head);
    if (s > best.score) {
      best.score = s;
      best.tags.assign(tags.begin(), tags.end());
    }
  });
  return best;
}

// ---------------------------------------------------------------------------
// Differentiable ops

Tensor sequence_score(Tape& tape, const Tensor& emissions, std::span<const int> tags,
                      const CrfHead& head) {
  const double value = sequence_score(emissions.value(), tags, head);
  std::vector<int> path(tags.begin(), tags.end());
  Tensor e = emissions, T = head.transitions, start = head.start, stop = head.stop;
  return tape.record("crf_sequence_score", Matrix::scalar(value), {e, T, start, stop},
                     [e, T, start, stop, path = std::move(path)](const Matrix& g) {
                       const double s = g[0];
                       if (e.requires_grad()) {
                         Matrix& ge = e.grad_buffer();
                         for (std::size_t i = 0; i < path.size(); ++i) ge(i, path[i]) += s;
                       }
                       if (T.requires_grad()) {
                         Matrix& gt = T.grad_buffer();
                         for (std::size_t i = 0; i + 1 < path.size(); ++i)
                           gt(path[i], path[i + 1]) += s;
                       }
                       if (start.requires_grad()) start.grad_buffer()[path.front()] += s;
                       if (stop.requires_grad()) stop.grad_buffer()[path.back()] += s;
                     });
}

Tensor log_partition(Tape& tape, const Tensor& emissions, const CrfHead& head) {
  return lattice_op(tape, emissions, head, -1, 0);
}

Tensor constrained_log_partition(Tape& tape, const Tensor& emissions, const CrfHead& head,
                                 std::size_t position, int tag) {
  if (position >= emissions.rows() || tag < 0 ||
      static_cast<std::size_t>(tag) >= head.num_tags()) {
    throw ContractError("constrained_log_partition: position/tag out of range");
  }
  return lattice_op(tape, emissions, head, static_cast<long>(position), tag);
}

Tensor nll(Tape& tape, const Tensor& emissions, std::span<const int> gold, const CrfHead& head) {
  check_tags(gold, emissions.value(), "nll");
  return tape.sub(log_partition(tape, emissions, head), sequence_score(tape, emissions, gold, head));
}

Tensor marginal_nll(Tape& tape, const Tensor& emissions, std::span<const int> gold,
                    const CrfHead& head) {
  check_tags(gold, emissions.value(), "marginal_nll");
  const Tensor log_z = log_partition(tape, emissions, head);
  std::vector<Tensor> terms;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    terms.push_back(tape.sub(log_z, constrained_log_partition(tape, emissions, head, i, gold[i])));
  }
  return tape.sum(tape.concat_rows(terms));
}

}  // namespace zrner::crf
