#include "arglabel/pipeline.hpp"

#include <ostream>

namespace arglabel {

EncodedSet encode_relations(std::span<const Relation> relations,
                            const DocumentMap& documents,
                            const Vocabulary& vocab, std::size_t max_len,
                            std::ostream* warnings) {
  EncodedSet set;
  for (const Relation& r : relations) {
    if (r.type != RelationType::Explicit) continue;
    set.relations.push_back(&r);
    try {
      set.distances.push_back(distance(r));
    } catch (const ValidationError&) {
      set.distances.push_back(-1);
    }
    try {
      set.instances.push_back(build_instance(r, documents.at(r.doc_id), vocab, max_len));
      set.instance_of.push_back(set.instances.size() - 1);
    } catch (const OversizeError& e) {
      ++set.skipped;
      set.instance_of.push_back(std::nullopt);
      if (warnings)
        *warnings << "warning: skipping relation " << r.id << ": " << e.what() << '\n';
    }
  }
  return set;
}

std::vector<PredictionRecord> to_records(std::span<const SpanPrediction> preds,
                                         const EncodedSet& set) {
  std::vector<PredictionRecord> out;
  out.reserve(set.relations.size());
  for (std::size_t k = 0; k < set.relations.size(); ++k) {
    const Relation& r = *set.relations[k];
    PredictionRecord rec;
    rec.relation_id = r.id;
    rec.pred_arg1 = preds[k].arg1;
    rec.pred_arg2 = preds[k].arg2;
    rec.pred_conn = preds[k].conn;
    rec.gold_arg1 = r.arg1;
    rec.gold_arg2 = r.arg2;
    rec.gold_conn = r.connective;
    rec.distance = set.distances[k];
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace arglabel
