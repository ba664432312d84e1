#include "arglabel/score.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "arglabel/errors.hpp"
#include "arglabel/numeric.hpp"

namespace arglabel {

using nlohmann::json;

bool exact_match(const Span& pred, const Span& gold) { return pred == gold; }

namespace {

void finish(Metric& m) {
  if (m.total == 0) return;
  m.precision = static_cast<double>(m.matched) / static_cast<double>(m.total);
  m.recall = m.precision;
  const double pr = m.precision + m.recall;
  // 2pr/(p+r) is exactly p when p == r; skip the rounding noise
  if (m.precision == m.recall) m.f1 = m.precision;
  else m.f1 = pr > 0.0 ? 2.0 * m.precision * m.recall / pr : 0.0;
}

struct Tally {
  ScoreReport report;

  void add(const PredictionRecord& r, const ScoreOptions& opt) {
    const bool a1 = exact_match(r.pred_arg1, r.gold_arg1);
    const bool a2 = opt.fold_connective_into_arg2
                        ? exact_match(span_union(r.pred_arg2, r.pred_conn),
                                      span_union(r.gold_arg2, r.gold_conn))
                        : exact_match(r.pred_arg2, r.gold_arg2);
    for (Metric* m : {&report.arg1, &report.arg2, &report.both}) ++m->total;
    report.arg1.matched += a1;
    report.arg2.matched += a2;
    report.both.matched += a1 && a2;
  }

  ScoreReport done() {
    finish(report.arg1);
    finish(report.arg2);
    finish(report.both);
    return report;
  }
};

json metric_json(const Metric& m) {
  return {{"matched", m.matched}, {"total", m.total}, {"precision", m.precision},
          {"recall", m.recall}, {"f1", m.f1}};
}

json report_json(const ScoreReport& r) {
  return {{"Arg1", metric_json(r.arg1)},
          {"Arg2", metric_json(r.arg2)},
          {"Arg1+Arg2", metric_json(r.both)}};
}

Span span_from_json(const json& v, const std::string& source, std::size_t line,
                    const char* which) {
  if (!v.is_array()) throw ParseError(source, line, std::string(which) + " must be an array");
  std::vector<std::int64_t> idx;
  for (const auto& e : v) {
    if (!e.is_number_integer() || e.get<std::int64_t>() < 0)
      throw ParseError(source, line, std::string(which) + " holds a non-index value");
    idx.push_back(e.get<std::int64_t>());
  }
  return Span(std::move(idx));
}

json span_json(const Span& s) { return json(s.indices()); }

}  // namespace

ScoreReport score(std::span<const PredictionRecord> records,
                  const ScoreOptions& options) {
  Tally t;
  for (const auto& r : records) t.add(r, options);
  return t.done();
}

DistanceReport score_by_distance(std::span<const PredictionRecord> records,
                                 const ScoreOptions& options) {
  std::map<std::int64_t, Tally> exact;
  std::map<DistanceBin, Tally> bins;
  for (DistanceBin b : kAllBins) bins[b];
  Tally undefined;
  bool any_undefined = false;
  for (const auto& r : records) {
    if (r.distance < 0) {
      undefined.add(r, options);
      any_undefined = true;
      continue;
    }
    exact[r.distance].add(r, options);
    bins[distance_bin(r.distance)].add(r, options);
  }
  DistanceReport out;
  for (auto& [d, t] : exact) out.by_distance.emplace(d, t.done());
  for (auto& [b, t] : bins) out.by_bin.emplace(b, t.done());
  if (any_undefined) out.undefined = undefined.done();
  return out;
}

void write_predictions(std::ostream& out, std::span<const SpanPrediction> preds) {
  for (const auto& p : preds) {
    json rec = {{"ID", p.relation_id},
                {"Arg1", span_json(p.arg1)},
                {"Arg2", span_json(p.arg2)},
                {"Connective", span_json(p.conn)}};
    out << rec.dump() << '\n';
  }
}

std::vector<SpanPrediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open predictions: " + path.string());
  const std::string source = path.string();
  std::vector<SpanPrediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!rec.is_object() || !rec.contains("ID") || !rec["ID"].is_number_integer())
      throw ParseError(source, line_no, "record needs an integer ID");
    SpanPrediction p;
    p.relation_id = rec["ID"].get<std::int64_t>();
    p.arg1 = span_from_json(rec.value("Arg1", json::array()), source, line_no, "Arg1");
    p.arg2 = span_from_json(rec.value("Arg2", json::array()), source, line_no, "Arg2");
    p.conn = span_from_json(rec.value("Connective", json::array()), source, line_no,
                            "Connective");
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PredictionRecord> join_predictions(std::span<const SpanPrediction> preds,
                                               std::span<const Relation> gold) {
  std::unordered_map<std::int64_t, const SpanPrediction*> by_id;
  for (const auto& p : preds) by_id[p.relation_id] = &p;
  std::vector<PredictionRecord> out;
  for (const Relation& r : gold) {
    if (r.type != RelationType::Explicit) continue;
    PredictionRecord rec;
    rec.relation_id = r.id;
    rec.gold_arg1 = r.arg1;
    rec.gold_arg2 = r.arg2;
    rec.gold_conn = r.connective;
    if (auto it = by_id.find(r.id); it != by_id.end()) {
      rec.pred_arg1 = it->second->arg1;
      rec.pred_arg2 = it->second->arg2;
      rec.pred_conn = it->second->conn;
    }
    try {
      rec.distance = distance(r);
    } catch (const ValidationError&) {
      rec.distance = -1;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void print_score_table(std::ostream& out, const ScoreReport& r,
                       const DistanceReport* by_distance) {
  char buf[160];
  auto row = [&](const char* name, const ScoreReport& s, std::size_t count) {
    std::snprintf(buf, sizeof buf, "%-12s %8zu %9.2f%% %9.2f%% %9.2f%%\n", name,
                  count, 100.0 * s.both.f1, 100.0 * s.arg1.f1, 100.0 * s.arg2.f1);
    out << buf;
  };
  out << "Exact match (one prediction per gold relation: precision = recall)\n";
  std::snprintf(buf, sizeof buf, "%-12s %8s %10s %10s %10s\n", "", "count",
                "Arg1+Arg2", "Arg1", "Arg2");
  out << buf;
  row("overall", r, r.both.total);
  if (!by_distance) return;
  out << "\nBy distance bin\n";
  for (const auto& [bin, s] : by_distance->by_bin) row(bin_name(bin), s, s.both.total);
  if (by_distance->undefined)
    row("undefined", *by_distance->undefined, by_distance->undefined->both.total);
}

void write_distance_csv(std::ostream& out, const DistanceReport& report) {
  out << "distance,count,f1_arg1,f1_arg2,f1_both\n";
  for (const auto& [d, s] : report.by_distance)
    out << d << ',' << s.both.total << ',' << format_real(s.arg1.f1) << ','
        << format_real(s.arg2.f1) << ',' << format_real(s.both.f1) << '\n';
}

std::string score_json(const ScoreReport& report, const DistanceReport& by_distance,
                       const ScoreOptions& options) {
  json bins = json::object();
  for (const auto& [bin, s] : by_distance.by_bin) bins[bin_name(bin)] = report_json(s);
  json exact = json::object();
  for (const auto& [d, s] : by_distance.by_distance)
    exact[std::to_string(d)] = report_json(s);
  json root = {{"overall", report_json(report)},
               {"by_bin", bins},
               {"by_distance", exact},
               {"fold_connective_into_arg2", options.fold_connective_into_arg2},
               {"note", "one prediction per gold relation, so precision equals recall"}};
  if (by_distance.undefined) root["undefined_distance"] = report_json(*by_distance.undefined);
  return root.dump(2);
}

}  // namespace arglabel
