#ifndef ARGLABEL_NET_HPP
#define ARGLABEL_NET_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "arglabel/corpus.hpp"
#include "arglabel/embedding.hpp"
#include "arglabel/errors.hpp"
#include "arglabel/types.hpp"

namespace arglabel {

enum class Variant { M1, M2 };
enum class Activation { Identity, Softmax };

const char* variant_name(Variant v) noexcept;
Variant parse_variant(const std::string& name);

struct ModelConfig {
  Variant variant = Variant::M1;
  Index embed_dim = 300;
  Index hidden = 100;  // per direction
  Index n_labels = kNumLabels;
  double dropout_rate = 0.5;  // m2 only
  Index mid_dense_size = 200;  // m2 only
  std::size_t max_len = 1170;
  // Restricts the loss to positions < real_len. Off: padding is scored too.
  bool mask_padding = false;

  void validate() const;
  Index bilstm_width() const { return 2 * hidden; }
};

// Gate blocks are packed in the order input, forget, cell candidate, output:
// rows [0,h) i, [h,2h) f, [2h,3h) g, [3h,4h) o.
template <typename Scalar>
struct LstmCellParams {
  Matrix<Scalar> W;  // 4h × d
  Matrix<Scalar> U;  // 4h × h
  Vector<Scalar> b;  // 4h

  Index hidden() const { return U.cols(); }
  Index input() const { return W.cols(); }
};

template <typename Scalar>
struct BiLstmLayer {
  LstmCellParams<Scalar> fwd;
  LstmCellParams<Scalar> bwd;
};

template <typename Scalar>
struct DenseLayer {
  Matrix<Scalar> W;  // out × in
  Vector<Scalar> b;
  Activation activation = Activation::Identity;
};

template <typename Scalar>
struct ModelParams {
  EmbeddingMatrix<Scalar> embeddings;
  BiLstmLayer<Scalar> bilstm;
  std::optional<DenseLayer<Scalar>> mid;  // m2 only
  DenseLayer<Scalar> out;
};

// Visits every dense tensor of the encoder/decoder stack (not the embedding
// matrix) in a fixed order, in parallel across structurally identical
// ModelParams. `f(name, tensor...)`.
template <typename F, typename First, typename... Rest>
void for_each_layer_tensor(F&& f, First& first, Rest&... rest) {
  f("bilstm.fwd.W", first.bilstm.fwd.W, rest.bilstm.fwd.W...);
  f("bilstm.fwd.U", first.bilstm.fwd.U, rest.bilstm.fwd.U...);
  f("bilstm.fwd.b", first.bilstm.fwd.b, rest.bilstm.fwd.b...);
  f("bilstm.bwd.W", first.bilstm.bwd.W, rest.bilstm.bwd.W...);
  f("bilstm.bwd.U", first.bilstm.bwd.U, rest.bilstm.bwd.U...);
  f("bilstm.bwd.b", first.bilstm.bwd.b, rest.bilstm.bwd.b...);
  if (first.mid) {
    f("mid.W", first.mid->W, rest.mid->W...);
    f("mid.b", first.mid->b, rest.mid->b...);
  }
  f("out.W", first.out.W, rest.out.W...);
  f("out.b", first.out.b, rest.out.b...);
}

// Same, with the embedding matrix first.
template <typename F, typename First, typename... Rest>
void for_each_tensor(F&& f, First& first, Rest&... rest) {
  f("embeddings", first.embeddings, rest.embeddings...);
  for_each_layer_tensor(f, first, rest...);
}

// ---------------------------------------------------------------------------
// Initialization

inline double glorot_bound(Index fan_in, Index fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

// fan_out × fan_in matrix, entries uniform in [-b, b].
template <typename Scalar>
Matrix<Scalar> glorot_uniform(Index fan_in, Index fan_out, std::uint64_t seed) {
  if (fan_in < 1 || fan_out < 1)
    throw ConfigError("glorot_uniform needs fan_in, fan_out >= 1");
  const auto b = static_cast<Scalar>(glorot_bound(fan_in, fan_out));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Scalar> dist(-b, b);
  Matrix<Scalar> m(fan_out, fan_in);
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r) m(r, c) = dist(rng);
  return m;
}

namespace detail {

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace detail

// Glorot per gate block: W blocks use (d, h), U blocks use (h, h). Bias zero.
template <typename Scalar>
LstmCellParams<Scalar> init_lstm_cell(Index input, Index hidden,
                                      std::uint64_t seed) {
  LstmCellParams<Scalar> p;
  p.W.resize(4 * hidden, input);
  p.U.resize(4 * hidden, hidden);
  for (Index k = 0; k < 4; ++k) {
    p.W.middleRows(k * hidden, hidden) = glorot_uniform<Scalar>(
        input, hidden, detail::derive_seed(seed, static_cast<std::uint64_t>(k)));
    p.U.middleRows(k * hidden, hidden) = glorot_uniform<Scalar>(
        hidden, hidden,
        detail::derive_seed(seed, static_cast<std::uint64_t>(4 + k)));
  }
  p.b = Vector<Scalar>::Zero(4 * hidden);
  return p;
}

template <typename Scalar>
DenseLayer<Scalar> init_dense(Index in, Index out, Activation act,
                              std::uint64_t seed) {
  return {glorot_uniform<Scalar>(in, out, seed), Vector<Scalar>::Zero(out), act};
}

template <typename Scalar>
ModelParams<Scalar> init_model(const ModelConfig& cfg,
                               EmbeddingMatrix<Scalar> embeddings,
                               std::uint64_t seed) {
  cfg.validate();
  if (embeddings.cols() != cfg.embed_dim)
    throw ConfigError("embedding matrix has dim " +
                      std::to_string(embeddings.cols()) + ", config says " +
                      std::to_string(cfg.embed_dim));
  ModelParams<Scalar> p;
  p.embeddings = std::move(embeddings);
  p.bilstm.fwd = init_lstm_cell<Scalar>(cfg.embed_dim, cfg.hidden,
                                        detail::derive_seed(seed, 101));
  p.bilstm.bwd = init_lstm_cell<Scalar>(cfg.embed_dim, cfg.hidden,
                                        detail::derive_seed(seed, 102));
  Index out_in = cfg.bilstm_width();
  if (cfg.variant == Variant::M2) {
    p.mid = init_dense<Scalar>(cfg.bilstm_width(), cfg.mid_dense_size,
                               Activation::Identity,
                               detail::derive_seed(seed, 103));
    out_in = cfg.mid_dense_size;
  }
  p.out = init_dense<Scalar>(out_in, cfg.n_labels, Activation::Softmax,
                             detail::derive_seed(seed, 104));
  return p;
}

// Throws ValidationError naming the first tensor whose shape disagrees with
// the configuration.
template <typename Scalar>
void check_shapes(const ModelParams<Scalar>& p, const ModelConfig& cfg) {
  auto expect = [](const char* name, Index rows, Index cols, Index want_rows,
                   Index want_cols) {
    if (rows != want_rows || cols != want_cols)
      throw ValidationError(std::string("tensor ") + name + " is " +
                            std::to_string(rows) + "x" + std::to_string(cols) +
                            ", model config expects " +
                            std::to_string(want_rows) + "x" +
                            std::to_string(want_cols));
  };
  const Index h = cfg.hidden, d = cfg.embed_dim;
  expect("embeddings", p.embeddings.rows(), p.embeddings.cols(),
         p.embeddings.rows(), d);
  for (const auto* cell : {&p.bilstm.fwd, &p.bilstm.bwd}) {
    expect("bilstm.W", cell->W.rows(), cell->W.cols(), 4 * h, d);
    expect("bilstm.U", cell->U.rows(), cell->U.cols(), 4 * h, h);
    expect("bilstm.b", cell->b.rows(), 1, 4 * h, 1);
  }
  Index out_in = cfg.bilstm_width();
  if (cfg.variant == Variant::M2) {
    if (!p.mid) throw ValidationError("m2 model lacks the intermediate dense layer");
    expect("mid.W", p.mid->W.rows(), p.mid->W.cols(), cfg.mid_dense_size,
           cfg.bilstm_width());
    expect("mid.b", p.mid->b.rows(), 1, cfg.mid_dense_size, 1);
    out_in = cfg.mid_dense_size;
  } else if (p.mid) {
    throw ValidationError("m1 model carries an intermediate dense layer");
  }
  expect("out.W", p.out.W.rows(), p.out.W.cols(), cfg.n_labels, out_in);
  expect("out.b", p.out.b.rows(), 1, cfg.n_labels, 1);
}

// ---------------------------------------------------------------------------
// Cell and layers

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return Scalar(1) / (Scalar(1) + std::exp(-x));
}

template <typename Scalar>
struct LstmState {
  Vector<Scalar> h;
  Vector<Scalar> c;
};

namespace detail {

// `pre` holds the 4h gate pre-activations; on return it holds the activated
// gates (i, f, g, o). Writes the new cell state and hidden output.
template <typename Scalar, typename Pre, typename CPrev, typename COut,
          typename HOut>
void activate_gates(Index h, Pre&& pre, const CPrev& c_prev, COut&& c_out,
                    HOut&& h_out) {
  for (Index k = 0; k < h; ++k) {
    pre(k) = sigmoid(pre(k));
    pre(h + k) = sigmoid(pre(h + k));
    pre(2 * h + k) = std::tanh(pre(2 * h + k));
    pre(3 * h + k) = sigmoid(pre(3 * h + k));
  }
  c_out = pre.segment(h, h).cwiseProduct(c_prev) +
          pre.segment(0, h).cwiseProduct(pre.segment(2 * h, h));
  h_out = pre.segment(3 * h, h).cwiseProduct(c_out.array().tanh().matrix());
}

}  // namespace detail

template <typename Scalar>
LstmState<Scalar> lstm_cell_step(const LstmCellParams<Scalar>& p,
                                 const std::type_identity_t<Vector<Scalar>>& x,
                                 const std::type_identity_t<Vector<Scalar>>& h_prev,
                                 const std::type_identity_t<Vector<Scalar>>& c_prev) {
  const Index h = p.hidden();
  if (x.size() != p.input() || h_prev.size() != h || c_prev.size() != h)
    throw ValidationError("lstm_cell_step: input shapes do not match params");
  if (!x.allFinite() || !h_prev.allFinite() || !c_prev.allFinite())
    throw NumericError("lstm_cell_step: non-finite input");
  Vector<Scalar> pre = p.W * x + p.U * h_prev + p.b;
  LstmState<Scalar> s{Vector<Scalar>(h), Vector<Scalar>(h)};
  detail::activate_gates<Scalar>(h, pre, c_prev, s.c, s.h);
  return s;
}

// Activations of one direction, stored in time order (column t = position t).
template <typename Scalar>
struct LstmTrace {
  Matrix<Scalar> gates;  // 4h × T, activated i, f, g, o
  Matrix<Scalar> cells;  // h × T
  Matrix<Scalar> hidden;  // h × T
};

// Runs one direction over the columns of `xs` (d × T) from a zero state.
// `reverse` processes t = T-1 .. 0.
template <typename Scalar>
LstmTrace<Scalar> lstm_sequence(const LstmCellParams<Scalar>& p,
                                const Matrix<Scalar>& xs, bool reverse) {
  const Index h = p.hidden();
  const Index T = xs.cols();
  LstmTrace<Scalar> tr;
  tr.gates = p.W * xs;
  tr.gates.colwise() += p.b;
  tr.cells.resize(h, T);
  tr.hidden.resize(h, T);
  const Vector<Scalar> zero = Vector<Scalar>::Zero(h);
  for (Index s = 0; s < T; ++s) {
    const Index t = reverse ? T - 1 - s : s;
    const Index prev = reverse ? t + 1 : t - 1;
    const bool first = s == 0;
    if (!first) tr.gates.col(t).noalias() += p.U * tr.hidden.col(prev);
    if (first)
      detail::activate_gates<Scalar>(h, tr.gates.col(t), zero, tr.cells.col(t),
                                     tr.hidden.col(t));
    else
      detail::activate_gates<Scalar>(h, tr.gates.col(t), tr.cells.col(prev),
                                     tr.cells.col(t), tr.hidden.col(t));
  }
  return tr;
}

// Column t of the result is [h_fwd(t); h_bwd(t)].
template <typename Scalar>
Matrix<Scalar> bilstm_forward(const BiLstmLayer<Scalar>& layer,
                              const std::type_identity_t<Matrix<Scalar>>& xs) {
  if (xs.cols() < 1) throw ValidationError("bilstm_forward: empty sequence");
  const Index h = layer.fwd.hidden();
  Matrix<Scalar> out(2 * h, xs.cols());
  out.topRows(h) = lstm_sequence(layer.fwd, xs, false).hidden;
  out.bottomRows(h) = lstm_sequence(layer.bwd, xs, true).hidden;
  return out;
}

// Column-wise, max-subtracted.
template <typename Derived>
auto softmax_columns(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> p =
      (logits.rowwise() - logits.colwise().maxCoeff()).array().exp().matrix();
  p.array().rowwise() /= p.colwise().sum().array();
  return p;
}

template <typename Scalar>
Vector<Scalar> dense_forward(const DenseLayer<Scalar>& layer,
                             const std::type_identity_t<Vector<Scalar>>& v) {
  if (v.size() != layer.W.cols())
    throw ValidationError("dense_forward: input size mismatch");
  Vector<Scalar> z = layer.W * v + layer.b;
  if (layer.activation == Activation::Softmax) return softmax_columns(z);
  return z;
}

// Inverted dropout mask: each entry 0 with probability `rate`, else 1/(1-rate).
template <typename Scalar, typename Rng>
Matrix<Scalar> dropout_mask(Index rows, Index cols, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw ConfigError("dropout rate must be in [0, 1)");
  std::bernoulli_distribution keep(1.0 - rate);
  const auto scale = static_cast<Scalar>(1.0 / (1.0 - rate));
  Matrix<Scalar> m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = keep(rng) ? scale : Scalar(0);
  return m;
}

template <typename Scalar, typename Rng>
Vector<Scalar> dropout_apply(const Vector<Scalar>& v, double rate,
                             bool training, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw ConfigError("dropout rate must be in [0, 1)");
  if (!training || rate == 0.0) return v;
  return v.cwiseProduct(dropout_mask<Scalar>(v.size(), 1, rate, rng));
}

// ---------------------------------------------------------------------------
// Whole model

template <typename Scalar>
struct ForwardTrace {
  Matrix<Scalar> inputs;  // d × T embedded words
  LstmTrace<Scalar> fwd;
  LstmTrace<Scalar> bwd;
  Matrix<Scalar> encoded;  // 2h × T
  Matrix<Scalar> mid;  // m2: mid × T, before dropout
  Matrix<Scalar> mask;  // m2 training: dropout mask, else empty
  Matrix<Scalar> probs;  // n_labels × T
};

template <typename Scalar>
Matrix<Scalar> embed_words(const EmbeddingMatrix<Scalar>& embeddings,
                           std::span<const int> word_ids) {
  Matrix<Scalar> x(embeddings.cols(), static_cast<Index>(word_ids.size()));
  for (Index t = 0; t < x.cols(); ++t) {
    const int id = word_ids[static_cast<std::size_t>(t)];
    if (id < 0 || id >= embeddings.rows())
      throw ValidationError("word id " + std::to_string(id) +
                            " outside vocabulary of size " +
                            std::to_string(embeddings.rows()));
    x.col(t) = embeddings.row(id).transpose();
  }
  return x;
}

// `mask` is used only for m2; pass nullptr for inference.
template <typename Scalar>
ForwardTrace<Scalar> forward_trace(const ModelParams<Scalar>& params,
                                   const ModelConfig& cfg,
                                   std::span<const int> word_ids,
                                   const std::type_identity_t<Matrix<Scalar>>* mask) {
  if (word_ids.empty()) throw ValidationError("empty instance");
  ForwardTrace<Scalar> tr;
  tr.inputs = embed_words(params.embeddings, word_ids);
  tr.fwd = lstm_sequence(params.bilstm.fwd, tr.inputs, false);
  tr.bwd = lstm_sequence(params.bilstm.bwd, tr.inputs, true);
  const Index h = cfg.hidden;
  tr.encoded.resize(2 * h, tr.inputs.cols());
  tr.encoded.topRows(h) = tr.fwd.hidden;
  tr.encoded.bottomRows(h) = tr.bwd.hidden;

  Matrix<Scalar> logits;
  if (cfg.variant == Variant::M2) {
    tr.mid = params.mid->W * tr.encoded;
    tr.mid.colwise() += params.mid->b;
    if (mask) {
      tr.mask = *mask;
      logits = params.out.W * tr.mid.cwiseProduct(tr.mask);
    } else {
      logits = params.out.W * tr.mid;
    }
  } else {
    logits = params.out.W * tr.encoded;
  }
  logits.colwise() += params.out.b;
  tr.probs = softmax_columns(logits);
  if (!tr.probs.allFinite())
    throw NumericError("non-finite activations in forward pass");
  return tr;
}

// Draws the m2 dropout mask for one instance (empty when not applicable).
template <typename Scalar, typename Rng>
Matrix<Scalar> sample_instance_mask(const ModelConfig& cfg, Index T,
                                    bool training, Rng& rng) {
  if (cfg.variant != Variant::M2 || !training || cfg.dropout_rate == 0.0)
    return {};
  return dropout_mask<Scalar>(cfg.mid_dense_size, T, cfg.dropout_rate, rng);
}

// T × n_labels; row t is the label distribution at position t.
template <typename Scalar, typename Rng>
Matrix<Scalar> model_forward(const ModelParams<Scalar>& params,
                             const ModelConfig& cfg, const Instance& inst,
                             bool training, Rng& rng) {
  const auto T = static_cast<Index>(inst.word_ids.size());
  const Matrix<Scalar> mask = sample_instance_mask<Scalar>(cfg, T, training, rng);
  return forward_trace(params, cfg, inst.word_ids,
                       mask.size() ? &mask : nullptr)
      .probs.transpose();
}

// Inference-mode forward; no randomness involved.
template <typename Scalar>
Matrix<Scalar> model_forward(const ModelParams<Scalar>& params,
                             const ModelConfig& cfg, const Instance& inst) {
  return forward_trace(params, cfg, inst.word_ids, nullptr).probs.transpose();
}

// Row-wise argmax; ties go to the lowest label code.
template <typename Derived>
std::vector<Label> predict_labels(const Eigen::MatrixBase<Derived>& probs) {
  std::vector<Label> labels(static_cast<std::size_t>(probs.rows()));
  for (Index t = 0; t < probs.rows(); ++t) {
    Index best = 0;
    for (Index k = 1; k < probs.cols(); ++k)
      if (probs(t, k) > probs(t, best)) best = k;
    labels[static_cast<std::size_t>(t)] = static_cast<Label>(best);
  }
  return labels;
}

struct DecodedSpans {
  Span arg1;
  Span arg2;
  Span conn;
};

DecodedSpans decode_spans(std::span<const Label> labels, const Instance& inst);

}  // namespace arglabel

#endif  // ARGLABEL_NET_HPP
