#ifndef ARGLABEL_PIPELINE_HPP
#define ARGLABEL_PIPELINE_HPP

#include <algorithm>
#include <iosfwd>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "arglabel/corpus.hpp"
#include "arglabel/net.hpp"
#include "arglabel/score.hpp"
#include "arglabel/train.hpp"
#include "arglabel/vocabulary.hpp"

namespace arglabel {

// Instances for a list of explicit relations. Relations whose window does not
// fit max_len get no instance and are counted in `skipped`.
struct EncodedSet {
  std::vector<const Relation*> relations;
  std::vector<std::optional<std::size_t>> instance_of;  // parallel to relations
  std::vector<Instance> instances;
  std::vector<std::int64_t> distances;  // -1 where undefined
  std::size_t skipped = 0;
};

// `relations` must outlive the result. Non-explicit relations are ignored.
EncodedSet encode_relations(std::span<const Relation> relations,
                            const DocumentMap& documents,
                            const Vocabulary& vocab, std::size_t max_len,
                            std::ostream* warnings = nullptr);

// Inference-mode predictions, one per relation; skipped relations predict
// three empty spans.
template <typename Scalar>
std::vector<SpanPrediction> predict(const ModelParams<Scalar>& params,
                                    const ModelConfig& cfg,
                                    const EncodedSet& set,
                                    unsigned workers = 1) {
  std::vector<SpanPrediction> out(set.relations.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t k = begin; k < out.size(); k += stride) {
      out[k].relation_id = set.relations[k]->id;
      if (!set.instance_of[k]) continue;
      const Instance& inst = set.instances[*set.instance_of[k]];
      const auto labels = predict_labels(model_forward(params, cfg, inst));
      auto spans = decode_spans(labels, inst);
      out[k].arg1 = std::move(spans.arg1);
      out[k].arg2 = std::move(spans.arg2);
      out[k].conn = std::move(spans.conn);
    }
  };
  workers = std::max(1u, workers);
  if (workers == 1 || out.size() < 2) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  return out;
}

std::vector<PredictionRecord> to_records(std::span<const SpanPrediction> preds,
                                         const EncodedSet& set);

template <typename Scalar>
ScoreReport evaluate(const ModelParams<Scalar>& params, const ModelConfig& cfg,
                     const EncodedSet& set, const ScoreOptions& options = {},
                     unsigned workers = 1) {
  const auto preds = predict(params, cfg, set, workers);
  return score(to_records(preds, set), options);
}

inline F1Triple f1_triple(const ScoreReport& r) {
  return {r.arg1.f1, r.arg2.f1, r.both.f1};
}

}  // namespace arglabel

#endif  // ARGLABEL_PIPELINE_HPP
