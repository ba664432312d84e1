#include <doctest.h>

#include <cmath>
#include <set>

#include "arglabel/corpus.hpp"
#include "arglabel/errors.hpp"
#include "arglabel/score.hpp"
#include "arglabel/synth.hpp"
#include "support.hpp"

using namespace arglabel;

namespace {

DocumentMap index_documents(const SynthCorpus& c) {
  DocumentMap docs;
  for (const auto& d : c.documents) docs[d.doc_id] = d;
  return docs;
}

std::set<std::string> reserved(const SynthConfig& cfg) {
  std::set<std::string> r(cfg.connective_lexicon.begin(), cfg.connective_lexicon.end());
  r.insert({cfg.arg1_begin, cfg.arg1_end, cfg.arg2_end});
  return r;
}

}  // namespace

TEST_CASE("empty corpus") {
  SynthConfig cfg;
  cfg.n_instances = 0;
  const auto c = generate(cfg);
  CHECK(c.documents.empty());
  CHECK(c.relations.empty());
  CHECK(c.truth.empty());
}

TEST_CASE("same config gives byte-identical files") {
  SynthConfig cfg;
  cfg.n_instances = 150;
  cfg.n_nonexplicit = 10;
  testing::TempDir a, b;
  write_synth_corpus(generate(cfg), a.path());
  write_synth_corpus(generate(cfg), b.path());
  for (const char* f : {"relations.json", "ground_truth.csv", "docs/synth_00000", "docs/synth_00037"})
    CHECK(testing::read_file(a / f) == testing::read_file(b / f));
  cfg.seed += 1;
  testing::TempDir c;
  write_synth_corpus(generate(cfg), c.path());
  CHECK(testing::read_file(a / "relations.json") != testing::read_file(c / "relations.json"));
}

TEST_CASE("planted distance histogram is within 2% of the weights") {
  SynthConfig cfg;  // 2000 instances over {0: .25, 1: .5, 5: .15, 12: .10}
  const auto c = generate(cfg);
  REQUIRE(c.truth.size() == 2000);
  std::map<std::int64_t, double> freq;
  for (const auto& g : c.truth) freq[g.distance] += 1.0 / 2000.0;
  REQUIRE(freq.size() == 4);
  for (const auto& [d, w] : cfg.distance_distribution) CHECK(std::abs(freq[d] - w) <= 0.02);
}

TEST_CASE("odd weights are apportioned to the instance count") {
  SynthConfig cfg;
  cfg.n_instances = 7;
  cfg.distance_distribution = {{0, 1.0}, {2, 1.0}, {3, 1.0}};
  const auto c = generate(cfg);
  std::map<std::int64_t, int> n;
  for (const auto& g : c.truth) ++n[g.distance];
  CHECK(n[0] + n[2] + n[3] == 7);
  for (auto [d, k] : n) CHECK((k == 2 || k == 3));
}

TEST_CASE("generated relations validate, distances agree, reserved tokens stay out of content") {
  SynthConfig cfg;
  cfg.n_instances = 600;
  cfg.n_nonexplicit = 40;
  cfg.seed = 11;
  const auto c = generate(cfg);
  const auto docs = index_documents(c);
  const auto res = reserved(cfg);
  REQUIRE(c.relations.size() == 640);
  for (std::size_t k = 0; k < c.relations.size(); ++k) {
    const Relation& r = c.relations[k];
    const Document& doc = docs.at(r.doc_id);
    CHECK_NOTHROW(validate_relation(r, doc));
    if (r.type != RelationType::Explicit) {
      for (const auto& t : doc.tokens) CHECK(res.count(t.surface) == 0);
      continue;
    }
    CHECK(distance(r) == c.truth[k].distance);
    CHECK(relation_window(r).length() <= cfg.max_window);
    // content = Arg1 without its markers, Arg2 without </a2>
    for (std::size_t i = 1; i + 1 < r.arg1.size(); ++i)
      CHECK(res.count(doc.tokens[static_cast<std::size_t>(r.arg1.indices()[i])].surface) == 0);
    for (std::size_t i = 0; i + 1 < r.arg2.size(); ++i)
      CHECK(res.count(doc.tokens[static_cast<std::size_t>(r.arg2.indices()[i])].surface) == 0);
    CHECK(doc.tokens[static_cast<std::size_t>(r.arg1.front())].surface == cfg.arg1_begin);
    CHECK(doc.tokens[static_cast<std::size_t>(r.arg1.back())].surface == cfg.arg1_end);
    CHECK(doc.tokens[static_cast<std::size_t>(r.arg2.back())].surface == cfg.arg2_end);
  }
}

TEST_CASE("oracle re-derives the ground truth from tokens alone") {
  for (double ambiguity : {0.0, 0.3}) {
    SynthConfig cfg;
    cfg.n_instances = 500;
    cfg.delimiter_ambiguity = ambiguity;
    cfg.seed = 8;
    const auto c = generate(cfg);
    std::vector<GroundTruth> derived;
    for (const auto& d : c.documents) {
      auto g = oracle_label(d, cfg);
      derived.insert(derived.end(), g.begin(), g.end());
    }
    REQUIRE(derived.size() == c.truth.size());
    for (std::size_t k = 0; k < derived.size(); ++k) {
      CHECK(derived[k].doc_id == c.truth[k].doc_id);
      CHECK(derived[k].arg1 == c.truth[k].arg1);
      CHECK(derived[k].arg2 == c.truth[k].arg2);
      CHECK(derived[k].conn == c.truth[k].conn);
      CHECK(derived[k].distance == c.truth[k].distance);
    }
  }
}

TEST_CASE("oracle rejects malformed templates") {
  SynthConfig cfg;
  CHECK_THROWS_AS(oracle_label(testing::make_document("d", "<a1> w1 </a1> w2 w3 </a2>"), cfg),
                  ValidationError);
  CHECK_THROWS_AS(oracle_label(testing::make_document("d", "<a1> w1 w2 because w3"), cfg),
                  ValidationError);
  CHECK_THROWS_AS(oracle_label(testing::make_document("d", "w1 </a1>"), cfg), ValidationError);
  CHECK(oracle_label(testing::make_document("d", "w1 w2 w3"), cfg).empty());
}

TEST_CASE("scoring oracle predictions") {
  SynthConfig cfg;
  cfg.n_instances = 200;
  const auto c = generate(cfg);
  std::vector<SpanPrediction> preds;
  for (const auto& d : c.documents)
    for (const auto& g : oracle_label(d, cfg)) preds.push_back({0, g.arg1, g.arg2, g.conn});
  REQUIRE(preds.size() == c.truth.size());
  for (std::size_t k = 0; k < preds.size(); ++k) preds[k].relation_id = c.truth[k].relation_id;

  auto perfect = score(join_predictions(preds, c.relations));
  CHECK(perfect.arg1.f1 == 1.0);
  CHECK(perfect.arg2.f1 == 1.0);
  CHECK(perfect.both.f1 == 1.0);

  for (auto& p : preds) {
    auto idx = p.arg2.indices();
    idx.pop_back();
    p.arg2 = Span(idx);
  }
  const auto truncated = score(join_predictions(preds, c.relations));
  CHECK(truncated.arg2.f1 == 0.0);
  CHECK(truncated.arg1.f1 == 1.0);
}

TEST_CASE("stratified scores on the planted distances match the generator") {
  SynthConfig cfg;
  cfg.n_instances = 400;
  const auto c = generate(cfg);
  std::vector<SpanPrediction> preds;
  std::map<std::int64_t, std::size_t> want;
  for (const auto& g : c.truth) {
    preds.push_back({g.relation_id, g.arg1, g.arg2, g.conn});
    ++want[g.distance];
  }
  const auto d = score_by_distance(join_predictions(preds, c.relations));
  REQUIRE(d.by_distance.size() == 4);
  for (const auto& [dist, n] : want) CHECK(d.by_distance.at(dist).both.total == n);
}

TEST_CASE("ground truth CSV round trip") {
  SynthConfig cfg;
  cfg.n_instances = 30;
  const auto c = generate(cfg);
  testing::TempDir tmp;
  write_synth_corpus(c, tmp.path());
  const auto back = read_ground_truth(tmp / "ground_truth.csv");
  REQUIRE(back.size() == 30);
  for (std::size_t k = 0; k < 30; ++k) {
    CHECK(back[k].relation_id == c.truth[k].relation_id);
    CHECK(back[k].arg2 == c.truth[k].arg2);
    CHECK(back[k].distance == c.truth[k].distance);
  }
}

TEST_CASE("config validation") {
  SynthConfig cfg;
  cfg.distance_distribution = {{12, 1.0}};
  CHECK(cfg.min_template_length(12) == 18);
  cfg.max_window = 18;
  CHECK_NOTHROW(cfg.validate());
  cfg.max_window = 17;
  CHECK_THROWS_AS(generate(cfg), ConfigError);

  SynthConfig bad;
  bad.connective_lexicon.push_back("w3");
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.distance_distribution = {{0, 0.0}};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.connective_lexicon.push_back("<a1>");
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  CHECK(parse_distance_distribution("0:0.25,1:0.5,5:0.15,12:0.1") ==
        std::vector<std::pair<std::int64_t, double>>{{0, 0.25}, {1, 0.5}, {5, 0.15}, {12, 0.1}});
  CHECK_THROWS_AS(parse_distance_distribution("0-1"), ConfigError);
}
