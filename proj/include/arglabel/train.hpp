#ifndef ARGLABEL_TRAIN_HPP
#define ARGLABEL_TRAIN_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "arglabel/errors.hpp"
#include "arglabel/net.hpp"
#include "arglabel/numeric.hpp"

namespace arglabel {

inline constexpr double kProbabilityFloor = 1e-12;

// Positions entering the loss: all of them, or only [0, real_len) when the
// configuration masks padding.
inline std::size_t loss_positions(const ModelConfig& cfg, const Instance& inst) {
  return cfg.mask_padding ? inst.real_len : inst.word_ids.size();
}

// probs is T × n_labels. Only the first `positions` rows are scored.
template <typename Derived>
double cross_entropy(const Eigen::MatrixBase<Derived>& probs,
                     std::span<const Label> gold, std::size_t positions) {
  if (positions == 0 || positions > gold.size() ||
      static_cast<Index>(positions) > probs.rows())
    throw ValidationError("cross_entropy: bad position count");
  double total = 0.0;
  for (std::size_t t = 0; t < positions; ++t) {
    const double p = static_cast<double>(
        probs(static_cast<Index>(t), static_cast<Index>(gold[t])));
    total -= std::log(std::max(p, kProbabilityFloor));
  }
  return total / static_cast<double>(positions);
}

template <typename Derived>
double cross_entropy(const Eigen::MatrixBase<Derived>& probs,
                     std::span<const Label> gold) {
  return cross_entropy(probs, gold, gold.size());
}

// Dense gradients for every layer tensor plus sparse embedding rows.
template <typename Scalar>
struct Gradients {
  ModelParams<Scalar> layers;  // layers.embeddings stays empty
  std::map<Index, Vector<Scalar>> embedding_rows;
};

template <typename Scalar>
Gradients<Scalar> zero_gradients(const ModelParams<Scalar>& params) {
  Gradients<Scalar> g;
  g.layers.bilstm = params.bilstm;
  g.layers.mid = params.mid;
  g.layers.out = params.out;
  g.layers.embeddings.resize(0, params.embeddings.cols());
  for_each_layer_tensor([](const char*, auto& t) { t.setZero(); }, g.layers);
  return g;
}

template <typename Scalar>
void accumulate(Gradients<Scalar>& into, const Gradients<Scalar>& g) {
  for_each_layer_tensor([](const char*, auto& a, const auto& b) { a += b; },
                        into.layers, g.layers);
  for (const auto& [row, v] : g.embedding_rows) {
    auto [it, inserted] = into.embedding_rows.try_emplace(row, v);
    if (!inserted) it->second += v;
  }
}

template <typename Scalar>
void scale(Gradients<Scalar>& g, Scalar s) {
  for_each_layer_tensor([s](const char*, auto& t) { t *= s; }, g.layers);
  for (auto& [row, v] : g.embedding_rows) v *= s;
}

template <typename Scalar>
double global_norm(const Gradients<Scalar>& g) {
  double sq = 0.0;
  for_each_layer_tensor(
      [&sq](const char*, const auto& t) {
        sq += static_cast<double>(t.squaredNorm());
      },
      g.layers);
  for (const auto& [row, v] : g.embedding_rows)
    sq += static_cast<double>(v.squaredNorm());
  return std::sqrt(sq);
}

// Rescales g so its global norm is at most max_norm. Returns the prior norm.
template <typename Scalar>
double clip_global_norm(Gradients<Scalar>& g, double max_norm) {
  const double n = global_norm(g);
  if (max_norm > 0.0 && n > max_norm)
    scale(g, static_cast<Scalar>(max_norm / n));
  return n;
}

namespace detail {

// BPTT for one direction. `dH` is ∂L/∂h for each position (h × T). Adds the
// parameter gradients to `grad` and returns the gate pre-activation
// gradients (4h × T) so the caller can form ∂L/∂x.
template <typename Scalar>
Matrix<Scalar> lstm_backward(const LstmCellParams<Scalar>& p,
                             const LstmTrace<Scalar>& tr,
                             const Matrix<Scalar>& xs,
                             const Matrix<Scalar>& dH, bool reverse,
                             LstmCellParams<Scalar>& grad) {
  const Index h = p.hidden();
  const Index T = xs.cols();
  Matrix<Scalar> dA(4 * h, T);
  Matrix<Scalar> h_prev = Matrix<Scalar>::Zero(h, T);
  Vector<Scalar> dh_next = Vector<Scalar>::Zero(h);
  Vector<Scalar> dc_next = Vector<Scalar>::Zero(h);
  const Vector<Scalar> zero = Vector<Scalar>::Zero(h);

  // Walk against the direction of the recurrence.
  for (Index s = 0; s < T; ++s) {
    const Index t = reverse ? s : T - 1 - s;
    const bool has_prev = reverse ? t + 1 < T : t > 0;
    const Index prev = reverse ? t + 1 : t - 1;

    using Arr = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
    const auto gates = tr.gates.col(t);
    const Arr i = gates.segment(0, h).array();
    const Arr f = gates.segment(h, h).array();
    const Arr g = gates.segment(2 * h, h).array();
    const Arr o = gates.segment(3 * h, h).array();
    const Arr tanh_c = tr.cells.col(t).array().tanh();
    const Vector<Scalar> c_prev = has_prev ? Vector<Scalar>(tr.cells.col(prev)) : zero;

    const Arr dh = (dH.col(t) + dh_next).array();
    const Arr dc = dh * o * (Scalar(1) - tanh_c.square()) + dc_next.array();
    auto da = dA.col(t);
    da.segment(0, h) = (dc * g * i * (Scalar(1) - i)).matrix();
    da.segment(h, h) = (dc * c_prev.array() * f * (Scalar(1) - f)).matrix();
    da.segment(2 * h, h) = (dc * i * (Scalar(1) - g.square())).matrix();
    da.segment(3 * h, h) = (dh * tanh_c * o * (Scalar(1) - o)).matrix();

    dc_next = (dc * f).matrix();
    dh_next.noalias() = p.U.transpose() * da;
    if (has_prev) h_prev.col(t) = tr.hidden.col(prev);
  }
  grad.W.noalias() += dA * xs.transpose();
  grad.U.noalias() += dA * h_prev.transpose();
  grad.b += dA.rowwise().sum();
  return dA;
}

}  // namespace detail

template <typename Scalar>
struct InstanceGradient {
  double loss = 0.0;
  Gradients<Scalar> grads;
};

template <typename Scalar>
double instance_loss(const ModelParams<Scalar>& params, const ModelConfig& cfg,
                     const Instance& inst, const std::type_identity_t<Matrix<Scalar>>* mask) {
  const auto tr = forward_trace(params, cfg, inst.word_ids, mask);
  return cross_entropy(tr.probs.transpose(), inst.labels,
                       loss_positions(cfg, inst));
}

// Loss and exact gradient of a single instance. `mask` is the m2 dropout mask
// (nullptr means dropout off).
template <typename Scalar>
InstanceGradient<Scalar> backward_instance(const ModelParams<Scalar>& params,
                                           const ModelConfig& cfg,
                                           const Instance& inst,
                                           const std::type_identity_t<Matrix<Scalar>>* mask) {
  const auto tr = forward_trace(params, cfg, inst.word_ids, mask);
  const Index T = tr.probs.cols();
  const std::size_t positions = loss_positions(cfg, inst);

  InstanceGradient<Scalar> out;
  out.loss = cross_entropy(tr.probs.transpose(), inst.labels, positions);
  if (!std::isfinite(out.loss)) throw NumericError("non-finite loss");
  out.grads = zero_gradients(params);
  auto& g = out.grads.layers;

  Matrix<Scalar> dlogits = Matrix<Scalar>::Zero(tr.probs.rows(), T);
  const auto inv_n = Scalar(1) / static_cast<Scalar>(positions);
  for (std::size_t t = 0; t < positions; ++t) {
    const auto col = static_cast<Index>(t);
    dlogits.col(col) = tr.probs.col(col) * inv_n;
    dlogits(static_cast<Index>(inst.labels[t]), col) -= inv_n;
  }

  Matrix<Scalar> d_encoded;
  if (cfg.variant == Variant::M2) {
    const bool dropped = tr.mask.size() != 0;
    const Matrix<Scalar> mid_out = dropped ? tr.mid.cwiseProduct(tr.mask) : tr.mid;
    g.out.W.noalias() += dlogits * mid_out.transpose();
    g.out.b += dlogits.rowwise().sum();
    Matrix<Scalar> d_mid = params.out.W.transpose() * dlogits;
    if (dropped) d_mid = d_mid.cwiseProduct(tr.mask);
    g.mid->W.noalias() += d_mid * tr.encoded.transpose();
    g.mid->b += d_mid.rowwise().sum();
    d_encoded = params.mid->W.transpose() * d_mid;
  } else {
    g.out.W.noalias() += dlogits * tr.encoded.transpose();
    g.out.b += dlogits.rowwise().sum();
    d_encoded = params.out.W.transpose() * dlogits;
  }

  const Index h = cfg.hidden;
  const Matrix<Scalar> dA_fwd =
      detail::lstm_backward(params.bilstm.fwd, tr.fwd, tr.inputs,
                            Matrix<Scalar>(d_encoded.topRows(h)), false,
                            g.bilstm.fwd);
  const Matrix<Scalar> dA_bwd =
      detail::lstm_backward(params.bilstm.bwd, tr.bwd, tr.inputs,
                            Matrix<Scalar>(d_encoded.bottomRows(h)), true,
                            g.bilstm.bwd);
  Matrix<Scalar> dX = params.bilstm.fwd.W.transpose() * dA_fwd;
  dX.noalias() += params.bilstm.bwd.W.transpose() * dA_bwd;

  for (Index t = 0; t < T; ++t) {
    const Index row = inst.word_ids[static_cast<std::size_t>(t)];
    auto [it, inserted] = out.grads.embedding_rows.try_emplace(row, dX.col(t));
    if (!inserted) it->second += dX.col(t);
  }
  return out;
}

namespace detail {

// Coordinate-wise mean over instances, each coordinate summed with exact_sum,
// so the result is independent of instance order and exact under duplication.
template <typename Scalar>
Gradients<Scalar> mean_gradients(const std::vector<InstanceGradient<Scalar>>& parts) {
  const std::size_t n = parts.size();
  const auto denom = static_cast<double>(n);
  std::vector<double> values(n), scratch;

  std::vector<std::vector<const Scalar*>> src(n);
  for (std::size_t k = 0; k < n; ++k)
    for_each_layer_tensor([&](const char*, const auto& t) { src[k].push_back(t.data()); },
                          parts[k].grads.layers);
  Gradients<Scalar> out;
  out.layers = parts[0].grads.layers;
  std::size_t tensor = 0;
  for_each_layer_tensor(
      [&](const char*, auto& t) {
        Scalar* dst = t.data();
        for (Index e = 0; e < t.size(); ++e) {
          for (std::size_t k = 0; k < n; ++k)
            values[k] = static_cast<double>(src[k][tensor][e]);
          dst[e] = static_cast<Scalar>(exact_sum(values, scratch) / denom);
        }
        ++tensor;
      },
      out.layers);

  std::map<Index, std::vector<const Vector<Scalar>*>> rows;
  for (const auto& p : parts)
    for (const auto& [r, v] : p.grads.embedding_rows) rows[r].push_back(&v);
  for (const auto& [r, vs] : rows) {
    Vector<Scalar> mean(vs.front()->size());
    values.resize(vs.size());
    for (Index e = 0; e < mean.size(); ++e) {
      for (std::size_t k = 0; k < vs.size(); ++k)
        values[k] = static_cast<double>((*vs[k])(e));
      mean(e) = static_cast<Scalar>(exact_sum(values, scratch) / denom);
    }
    out.embedding_rows.emplace(r, std::move(mean));
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
struct BatchGradient {
  double loss = 0.0;  // batch mean
  std::vector<double> instance_losses;
  Gradients<Scalar> grads;  // ∂(batch mean loss)/∂θ
};

// Mean loss and gradient over `batch`. Every instance receives its own RNG
// seed drawn from `rng` in batch order, so the result is independent of the
// worker count. Loss and gradients are reduced with exact_sum: without
// dropout they are bit-invariant under batch permutation and duplication.
template <typename Scalar, typename Rng>
BatchGradient<Scalar> backward(const ModelParams<Scalar>& params,
                               const ModelConfig& cfg,
                               std::span<const Instance* const> batch,
                               Rng& rng, bool training = true,
                               unsigned workers = 1) {
  if (batch.empty()) throw ValidationError("backward: empty batch");
  const std::size_t n = batch.size();
  std::vector<std::uint64_t> seeds(n);
  for (auto& s : seeds) s = rng();

  std::vector<InstanceGradient<Scalar>> parts(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t k = begin; k < n; k += stride) {
      try {
        const Instance& inst = *batch[k];
        std::mt19937_64 local(seeds[k]);
        const Matrix<Scalar> mask = sample_instance_mask<Scalar>(
            cfg, static_cast<Index>(inst.word_ids.size()), training, local);
        parts[k] = backward_instance(params, cfg, inst,
                                     mask.size() ? &mask : nullptr);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  BatchGradient<Scalar> out;
  out.grads = detail::mean_gradients(parts);
  out.instance_losses.reserve(n);
  for (const auto& p : parts) out.instance_losses.push_back(p.loss);
  out.loss = exact_sum(out.instance_losses) / static_cast<double>(n);
  if (!std::isfinite(out.loss)) throw NumericError("non-finite batch loss");
  return out;
}

// ---------------------------------------------------------------------------
// Adam

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Off: only embedding rows present in the gradient are updated, with the
  // skipped moment decay caught up when the row is next touched. On: every
  // row takes a full Adam step each iteration (zero gradient if absent).
  bool dense_embedding_updates = false;

  void validate() const;
};

template <typename Scalar>
struct AdamState {
  ModelParams<Scalar> m;
  ModelParams<Scalar> v;
  std::vector<std::int64_t> row_step;  // last step that updated each embedding row
  std::int64_t step = 0;
};

template <typename Scalar>
AdamState<Scalar> init_adam(const ModelParams<Scalar>& params) {
  AdamState<Scalar> s{params, params, {}, 0};
  for_each_tensor([](const char*, auto& a, auto& b) {
    a.setZero();
    b.setZero();
  }, s.m, s.v);
  s.row_step.assign(static_cast<std::size_t>(params.embeddings.rows()), 0);
  return s;
}

namespace detail {

template <typename P, typename G, typename M>
void adam_update(P&& theta, const G& grad, M&& m, M&& v, const AdamConfig& c,
                 double bc1, double bc2) {
  using Scalar = typename std::decay_t<P>::Scalar;
  const auto b1 = static_cast<Scalar>(c.beta1);
  const auto b2 = static_cast<Scalar>(c.beta2);
  m = b1 * m + (Scalar(1) - b1) * grad;
  v = b2 * v + (Scalar(1) - b2) * grad.cwiseProduct(grad);
  const auto m_hat = (m.array() / static_cast<Scalar>(bc1));
  const auto v_hat = (v.array() / static_cast<Scalar>(bc2));
  theta.array() -= static_cast<Scalar>(c.learning_rate) * m_hat /
                   (v_hat.sqrt() + static_cast<Scalar>(c.epsilon));
}

}  // namespace detail

template <typename Scalar>
void adam_step(AdamState<Scalar>& state, ModelParams<Scalar>& params,
               const Gradients<Scalar>& grads, const AdamConfig& cfg) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);

  for_each_layer_tensor(
      [&](const char*, auto& theta, const auto& g, auto& m, auto& v) {
        detail::adam_update(theta, g, m, v, cfg, bc1, bc2);
      },
      params, grads.layers, state.m, state.v);

  auto& E = params.embeddings;
  auto& M = state.m.embeddings;
  auto& V = state.v.embeddings;
  if (cfg.dense_embedding_updates) {
    const RowVector<Scalar> zero = RowVector<Scalar>::Zero(E.cols());
    for (Index r = 0; r < E.rows(); ++r) {
      auto it = grads.embedding_rows.find(r);
      const RowVector<Scalar> g =
          it == grads.embedding_rows.end() ? zero : RowVector<Scalar>(it->second.transpose());
      detail::adam_update(E.row(r), g, M.row(r), V.row(r), cfg, bc1, bc2);
      state.row_step[static_cast<std::size_t>(r)] = state.step;
    }
    return;
  }
  for (const auto& [r, g] : grads.embedding_rows) {
    auto& last = state.row_step[static_cast<std::size_t>(r)];
    const std::int64_t missed = state.step - last - 1;
    if (missed > 0) {
      M.row(r) *= static_cast<Scalar>(std::pow(cfg.beta1, static_cast<double>(missed)));
      V.row(r) *= static_cast<Scalar>(std::pow(cfg.beta2, static_cast<double>(missed)));
    }
    const RowVector<Scalar> grow = g.transpose();
    detail::adam_update(E.row(r), grow, M.row(r), V.row(r), cfg, bc1, bc2);
    last = state.step;
  }
}

// ---------------------------------------------------------------------------
// Training loop

struct TrainConfig {
  int epochs = 50;
  int batch_size = 32;
  AdamConfig adam;
  std::uint64_t seed = 1;
  bool shuffle = true;
  bool eval_each_epoch = true;
  double clip_norm = 0.0;  // 0 disables global-norm clipping
  unsigned workers = 1;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double f1_arg1 = 0.0;
  double f1_arg2 = 0.0;
  double f1_both = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct F1Triple {
  double arg1 = 0.0;
  double arg2 = 0.0;
  double both = 0.0;
};

// Everything needed to continue a run bit-identically.
template <typename Scalar>
struct TrainState {
  ModelParams<Scalar> params;
  AdamState<Scalar> adam;
  std::mt19937_64 rng;
  int epochs_done = 0;
  std::vector<EpochRecord> records;
};

template <typename Scalar>
TrainState<Scalar> start_training(ModelParams<Scalar> params,
                                  const TrainConfig& cfg) {
  TrainState<Scalar> s;
  s.adam = init_adam(params);
  s.params = std::move(params);
  s.rng.seed(detail::derive_seed(cfg.seed, 201));
  return s;
}

template <typename Scalar>
using EvalHook = std::function<F1Triple(const ModelParams<Scalar>&)>;
template <typename Scalar>
using EpochHook = std::function<void(const TrainState<Scalar>&)>;

// Runs epochs epochs_done+1 .. cfg.epochs. `on_epoch` fires after each epoch
// (its record already appended), e.g. to checkpoint.
template <typename Scalar>
void train(TrainState<Scalar>& state, std::span<const Instance> train_set,
           const ModelConfig& model_cfg, const TrainConfig& cfg,
           const std::type_identity_t<EvalHook<Scalar>>& evaluate = {},
           const std::type_identity_t<EpochHook<Scalar>>& on_epoch = {}) {
  cfg.validate();
  if (train_set.empty()) throw ValidationError("train: empty training set");
  std::vector<std::size_t> order(train_set.size());
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);
  std::vector<const Instance*> batch;
  std::vector<double> losses;

  while (state.epochs_done < cfg.epochs) {
    const int epoch = state.epochs_done + 1;
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), state.rng);
    losses.clear();
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t stop = std::min(order.size(), start + batch_size);
      batch.clear();
      for (std::size_t k = start; k < stop; ++k)
        batch.push_back(&train_set[order[k]]);
      try {
        auto bg = backward(state.params, model_cfg,
                           std::span<const Instance* const>(batch), state.rng,
                           true, cfg.workers);
        if (cfg.clip_norm > 0.0) clip_global_norm(bg.grads, cfg.clip_norm);
        adam_step(state.adam, state.params, bg.grads, cfg.adam);
        losses.insert(losses.end(), bg.instance_losses.begin(),
                      bg.instance_losses.end());
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(start / batch_size + 1) + ": " +
                           e.what());
      }
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = exact_sum(losses) / static_cast<double>(losses.size());
    if (cfg.eval_each_epoch && evaluate) {
      const F1Triple f1 = evaluate(state.params);
      rec.f1_arg1 = f1.arg1;
      rec.f1_arg2 = f1.arg2;
      rec.f1_both = f1.both;
    }
    state.records.push_back(rec);
    state.epochs_done = epoch;
    if (on_epoch) on_epoch(state);
  }
}

// ---------------------------------------------------------------------------
// Finite-difference gradient check

struct GradCheckFamily {
  std::string name;
  std::size_t coordinates = 0;  // number checked
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckFamily> families;
  double max_rel_error = 0.0;
};

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), 1e-8});
}

// Compares the analytic gradient with central differences on up to
// `per_family` coordinates of each tensor family (every coordinate when the
// family is smaller). Families: W, U, b (both directions), dense.W, dense.b,
// embeddings. `mask` fixes the m2 dropout mask; nullptr checks dropout off.
template <typename Scalar>
GradCheckReport grad_check(const ModelParams<Scalar>& params,
                           const ModelConfig& cfg, const Instance& inst,
                           double epsilon, std::size_t per_family,
                           std::uint64_t seed,
                           const std::type_identity_t<Matrix<Scalar>>* mask = nullptr) {
  const auto analytic = backward_instance(params, cfg, inst, mask).grads;
  ModelParams<Scalar> probe = params;

  struct Coord {
    Scalar* value;
    double grad;
  };
  std::map<std::string, std::vector<Coord>> families;
  auto add_tensor = [&](const std::string& family, auto& tensor, const auto& g) {
    auto& list = families[family];
    for (Index k = 0; k < tensor.size(); ++k)
      list.push_back({tensor.data() + k, static_cast<double>(g.data()[k])});
  };
  for_each_layer_tensor(
      [&](const char* name, auto& tensor, const auto& g) {
        std::string n(name);
        std::string fam;
        if (n.ends_with(".W")) fam = n.starts_with("bilstm") ? "W" : "dense.W";
        else if (n.ends_with(".U")) fam = "U";
        else fam = n.starts_with("bilstm") ? "b" : "dense.b";
        add_tensor(fam, tensor, g);
      },
      probe, analytic.layers);
  {
    auto& list = families["embeddings"];
    auto& E = probe.embeddings;
    for (Index c = 0; c < E.cols(); ++c)
      for (Index r = 0; r < E.rows(); ++r) {
        auto it = analytic.embedding_rows.find(r);
        const double g =
            it == analytic.embedding_rows.end() ? 0.0 : static_cast<double>(it->second(c));
        list.push_back({&E(r, c), g});
      }
  }

  std::mt19937_64 rng(seed);
  GradCheckReport report;
  for (auto& [name, coords] : families) {
    std::vector<Coord> chosen;
    if (coords.size() <= per_family) {
      chosen = coords;
    } else {
      std::sample(coords.begin(), coords.end(), std::back_inserter(chosen),
                  per_family, rng);
    }
    GradCheckFamily fam{name, chosen.size(), 0.0};
    for (const Coord& c : chosen) {
      const Scalar saved = *c.value;
      *c.value = saved + static_cast<Scalar>(epsilon);
      const double up = instance_loss(probe, cfg, inst, mask);
      *c.value = saved - static_cast<Scalar>(epsilon);
      const double down = instance_loss(probe, cfg, inst, mask);
      *c.value = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      fam.max_rel_error = std::max(fam.max_rel_error, relative_error(c.grad, numeric));
    }
    report.max_rel_error = std::max(report.max_rel_error, fam.max_rel_error);
    report.families.push_back(std::move(fam));
  }
  return report;
}

}  // namespace arglabel

#endif  // ARGLABEL_TRAIN_HPP
