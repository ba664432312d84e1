#ifndef ARGLABEL_SCORE_HPP
#define ARGLABEL_SCORE_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arglabel/corpus.hpp"

namespace arglabel {

struct PredictionRecord {
  std::int64_t relation_id = 0;
  Span pred_arg1, pred_arg2, pred_conn;
  Span gold_arg1, gold_arg2, gold_conn;
  std::int64_t distance = -1;  // -1 when the gold distance is undefined
};

struct Metric {
  std::size_t matched = 0;
  std::size_t total = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Exactly one prediction exists per gold relation, so precision and recall
// coincide (both equal matched / total).
struct ScoreReport {
  Metric arg1;
  Metric arg2;
  Metric both;
};

struct DistanceReport {
  std::map<std::int64_t, ScoreReport> by_distance;
  std::map<DistanceBin, ScoreReport> by_bin;  // all four bins, possibly empty
  std::optional<ScoreReport> undefined;  // records with distance < 0
};

struct ScoreOptions {
  // Compare Arg2 ∪ connective instead of Arg2 alone.
  bool fold_connective_into_arg2 = false;
};

bool exact_match(const Span& pred, const Span& gold);

ScoreReport score(std::span<const PredictionRecord> records,
                  const ScoreOptions& options = {});

DistanceReport score_by_distance(std::span<const PredictionRecord> records,
                                 const ScoreOptions& options = {});

// Prediction file: one JSON object per line,
// {"ID": id, "Arg1": [...], "Arg2": [...], "Connective": [...]}
// with document token offsets.
struct SpanPrediction {
  std::int64_t relation_id = 0;
  Span arg1, arg2, conn;
};

void write_predictions(std::ostream& out, std::span<const SpanPrediction> preds);
std::vector<SpanPrediction> read_predictions(const std::filesystem::path& path);

// Pairs predictions with explicit gold relations by ID. Gold relations without
// a prediction get empty predicted spans, so they count as misses.
std::vector<PredictionRecord> join_predictions(
    std::span<const SpanPrediction> preds, std::span<const Relation> gold);

void print_score_table(std::ostream& out, const ScoreReport& report,
                       const DistanceReport* by_distance = nullptr);
// distance,count,f1_arg1,f1_arg2,f1_both
void write_distance_csv(std::ostream& out, const DistanceReport& report);
std::string score_json(const ScoreReport& report, const DistanceReport& by_distance,
                       const ScoreOptions& options);

}  // namespace arglabel

#endif  // ARGLABEL_SCORE_HPP
