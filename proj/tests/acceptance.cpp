// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
//
//   acceptance [--only N]
//
// ARGLABEL_PDTB_DIR, when set, must hold train/ and test/ dataset directories
// converted from the licensed corpus; criterion 6 then also checks the real
// counts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "arglabel/commands.hpp"
#include "arglabel/corpus.hpp"
#include "arglabel/score.hpp"
#include "arglabel/synth.hpp"
#include "arglabel/train.hpp"
#include "arglabel/vocabulary.hpp"
#include "support.hpp"

using namespace arglabel;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename A, typename B>
bool same_bits(const A& a, const B& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

bool same_gradients(const Gradients<double>& a, const Gradients<double>& b) {
  bool ok = true;
  for_each_layer_tensor([&](const char*, const auto& x, const auto& y) { ok = ok && same_bits(x, y); },
                        a.layers, b.layers);
  if (a.embedding_rows.size() != b.embedding_rows.size()) return false;
  for (const auto& [r, v] : a.embedding_rows) {
    auto it = b.embedding_rows.find(r);
    ok = ok && it != b.embedding_rows.end() && same_bits(v, it->second);
  }
  return ok;
}

DocumentMap index_documents(const SynthCorpus& c) {
  DocumentMap docs;
  for (const auto& d : c.documents) docs[d.doc_id] = d;
  return docs;
}

// ---------------------------------------------------------------------------

void gradient_correctness(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::size_t kPerFamily = 200;
  for (Variant v : {Variant::M1, Variant::M2}) {
    const auto fx = make_gradcheck_fixture(v, 1);
    // families with fewer than 200 entries are checked exhaustively
    std::map<std::string, std::size_t> sizes;
    for_each_layer_tensor(
        [&](const char* name, const auto& t) {
          const std::string n(name);
          std::string fam;
          if (n.ends_with(".W")) fam = n.starts_with("bilstm") ? "W" : "dense.W";
          else if (n.ends_with(".U")) fam = "U";
          else fam = n.starts_with("bilstm") ? "b" : "dense.b";
          sizes[fam] += static_cast<std::size_t>(t.size());
        },
        fx.params);
    sizes["embeddings"] = static_cast<std::size_t>(fx.params.embeddings.size());

    const auto rep = grad_check(fx.params, fx.config, fx.instance, 1e-5, kPerFamily, 2);
    o.detail << variant_name(v) << " max rel err " << rep.max_rel_error << " (";
    bool first = true;
    for (const auto& f : rep.families) {
      o.detail << (first ? "" : ", ") << f.name << ' ' << f.coordinates;
      first = false;
      o.require(f.coordinates == std::min(kPerFamily, sizes[f.name]),
                f.name + " coordinate count");
      o.require(f.max_rel_error < 1e-4, std::string(variant_name(v)) + " " + f.name);
    }
    o.detail << "); ";
    o.require(rep.families.size() == sizes.size(), "family list");
  }
  const double s = seconds_since(t0);
  o.detail << "runtime " << s << " s";
  o.require(s < 30.0, "runtime < 30 s");
}

void numerical_invariants(Outcome& o) {
  // softmax rows, including saturated logits from large weights
  double worst = 0.0;
  std::size_t rows = 0;
  for (Variant v : {Variant::M1, Variant::M2}) {
    for (double scale : {1.0, 50.0}) {
      auto fx = make_gradcheck_fixture(v, 3);
      for_each_tensor([&](const char*, auto& t) { t *= scale; }, fx.params);
      std::mt19937_64 rng(4);
      for (int k = 0; k < 50; ++k) {
        Instance inst = fx.instance;
        for (std::size_t t = 0; t < inst.real_len; ++t) inst.word_ids[t] = 1 + static_cast<int>(rng() % 19);
        const auto probs = model_forward(fx.params, fx.config, inst, true, rng);
        for (Index r = 0; r < probs.rows(); ++r, ++rows) {
          worst = std::max(worst, std::abs(probs.row(r).sum() - 1.0));
          o.require((probs.row(r).array() >= 0.0).all(), "non-negative probabilities");
        }
      }
    }
  }
  o.detail << rows << " softmax rows, max |sum-1| " << worst;
  o.require(worst <= 1e-6, "softmax rows sum to 1");

  // zero-gradient Adam from a fresh state
  for (bool dense : {false, true}) {
    const auto fx = make_gradcheck_fixture(Variant::M2, 5);
    ModelParams<double> params = fx.params;
    AdamState<double> state = init_adam(params);
    Gradients<double> g = zero_gradients(params);
    for (Index r = 0; r < params.embeddings.rows(); ++r)
      g.embedding_rows.emplace(r, Vector<double>::Zero(params.embeddings.cols()));
    AdamConfig c;
    c.dense_embedding_updates = dense;
    adam_step(state, params, g, c);
    bool same = true;
    for_each_tensor([&](const char*, const auto& x, const auto& y) { same = same && same_bits(x, y); },
                    params, fx.params);
    o.require(same, dense ? "dense adam identity" : "lazy adam identity");
  }
  o.detail << "; zero-grad adam is identity";

  // permutation and duplication of a batch
  for (Variant v : {Variant::M1, Variant::M2}) {
    const auto fx = make_gradcheck_fixture(v, 11);
    std::mt19937_64 rng(2);
    std::vector<Instance> xs;
    for (int k = 0; k < 9; ++k) {
      Instance inst = fx.instance;
      for (std::size_t t = 0; t < inst.real_len; ++t) {
        inst.word_ids[t] = 1 + static_cast<int>(rng() % 15);
        inst.labels[t] = static_cast<Label>(rng() % 4);
      }
      xs.push_back(std::move(inst));
    }
    std::vector<const Instance*> batch;
    for (const auto& x : xs) batch.push_back(&x);
    auto shuffled = batch;
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(9));
    auto doubled = batch;
    doubled.insert(doubled.end(), batch.begin(), batch.end());
    // dropout off: the loss is a function of the batch contents only
    std::mt19937_64 r1(1), r2(1), r3(1);
    using Batch = std::span<const Instance* const>;
    const auto a = backward(fx.params, fx.config, Batch(batch), r1, false);
    const auto b = backward(fx.params, fx.config, Batch(shuffled), r2, false);
    const auto c = backward(fx.params, fx.config, Batch(doubled), r3, false);
    const std::string name = variant_name(v);
    o.require(a.loss == b.loss && a.loss == c.loss, name + " batch loss bit-exact");
    o.require(same_gradients(a.grads, b.grads) && same_gradients(a.grads, c.grads),
              name + " batch gradient bit-exact");
  }
  o.detail << "; batch loss and gradient bit-identical under permutation and duplication";
}

void oracle_statistics(Outcome& o) {
  testing::TempDir tmp;
  SynthConfig tr;
  tr.n_instances = 2000;
  tr.n_nonexplicit = 150;
  tr.delimiter_ambiguity = 0.1;
  tr.distance_distribution = {{0, 0.25}, {1, 0.5}, {5, 0.15}, {12, 0.05}, {30, 0.05}};
  tr.seed = 21;
  SynthConfig te = tr;
  te.n_instances = 300;
  te.n_nonexplicit = 40;
  te.seed = 22;
  te.first_id = 100000;
  te.doc_prefix = "test";
  const auto train = generate(tr), test = generate(te);
  write_synth_corpus(train, tmp / "train");
  write_synth_corpus(test, tmp / "test");

  std::ostringstream out, err;
  const int rc = cmd_stats({tmp / "train", tmp / "test", tmp / "stats.json"}, out, err);
  o.require(rc == 0, "stats exit code: " + err.str());
  if (rc != 0) return;
  const json j = json::parse(testing::read_file(tmp / "stats.json"));

  std::map<std::int64_t, std::size_t> hist;
  std::map<std::string, std::size_t> bins = {{"0", 0}, {"1", 0}, {"2-10", 0}, {">10", 0}};
  for (const auto* c : {&train, &test})
    for (const auto& g : c->truth) {
      ++hist[g.distance];
      ++bins[bin_name(distance_bin(g.distance))];
    }
  json want_hist = json::object();
  for (const auto& [d, n] : hist) want_hist[std::to_string(d)] = n;
  o.require(j["n_explicit_train"] == 2000 && j["n_explicit_test"] == 300, "explicit counts");
  o.require(j["n_nonexplicit_train"] == 150 && j["n_nonexplicit_test"] == 40, "non-explicit counts");
  o.require(j["n_total"] == 2490, "total count");
  o.require(j["distance_histogram"] == want_hist, "distance histogram");
  o.require(j["distance_bins"] == json(bins), "distance bins");
  o.detail << "stats match ground truth on 2490 relations";

  // distance and label round trip on every explicit instance
  std::size_t n = 0;
  for (const auto* c : {&train, &test}) {
    const auto docs = index_documents(*c);
    const Vocabulary vocab = build_vocabulary(c->relations, docs);
    for (std::size_t k = 0; k < c->truth.size(); ++k) {
      const Relation& r = c->relations[k];
      const GroundTruth& g = c->truth[k];
      o.require(r.id == g.relation_id, "relation order");
      if (distance(r) != g.distance) o.require(false, "distance of relation " + std::to_string(r.id));
      const Instance inst = build_instance(r, docs.at(r.doc_id), vocab, tr.max_window);
      const auto spans = decode_spans(inst.labels, inst);
      if (!(spans.arg1 == g.arg1 && spans.arg2 == g.arg2 && spans.conn == g.conn))
        o.require(false, "round trip of relation " + std::to_string(r.id));
      ++n;
    }
  }
  o.detail << "; distance() equals the planted distance and build→decode round-trips on " << n
           << " instances";
}

// Shared by the learning and determinism criteria.
struct SynthRun {
  testing::TempDir dir;
  fs::path config;

  SynthRun() {
    SynthConfig tr;  // 2000 instances, vocab 200, max_window 60, {0, 1, 5, 12}
    tr.seed = 101;
    SynthConfig te = tr;
    te.n_instances = 200;
    te.seed = 102;
    te.first_id = 100000;
    te.doc_prefix = "test";
    write_synth_corpus(generate(tr), dir / "train");
    write_synth_corpus(generate(te), dir / "test");
    config = dir / "run.ini";
    testing::write_file(config,
                        "[model]\nvariant = m1\nembed_dim = 32\nhidden = 16\nmax_len = 60\n"
                        "[train]\nepochs = 50\nbatch_size = 32\nseed = 3\nworkers = 1\n"
                        "[data]\ntrain = train\ntest = test\n"
                        "[embedding]\nmode = random\n"
                        "[output]\ndir = out\n");
  }

  int train(const std::string& out, std::optional<int> stop_after = {},
            std::optional<fs::path> resume = {}) const {
    TrainOptions opt;
    opt.config = config;
    opt.out = dir / out;
    opt.stop_after = stop_after;
    opt.resume = resume;
    std::ostringstream log, err;
    const int rc = cmd_train(opt, log, err);
    if (rc != 0) std::cerr << err.str();
    return rc;
  }
};

SynthRun& shared_run() {
  static SynthRun run;
  return run;
}

void desk_scale_learning(Outcome& o) {
  SynthRun& run = shared_run();
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = run.train("a");
  const double s = seconds_since(t0);
  o.require(rc == 0, "train exit code");
  if (rc != 0) return;
  const json scores = json::parse(testing::read_file(run.dir / "a/test_scores.json"));
  const double f1 = scores["overall"]["Arg1+Arg2"]["f1"];
  double lo = 1.0, hi = 0.0;
  o.detail << "final Arg1+Arg2 F1 " << f1 << "; by distance";
  for (const char* d : {"0", "1", "5", "12"}) {
    if (!scores["by_distance"].contains(d)) {
      o.require(false, std::string("distance ") + d + " missing from the test set");
      continue;
    }
    const double v = scores["by_distance"][d]["Arg1+Arg2"]["f1"];
    o.detail << ' ' << d << ':' << v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  o.detail << " (spread " << hi - lo << "); runtime " << s << " s";
  o.require(f1 >= 0.90, "F1 >= 0.90");
  o.require(hi - lo < 0.10, "distance spread < 0.10");
  o.require(s < 600.0, "runtime < 10 min");
}

void determinism(Outcome& o) {
  SynthRun& run = shared_run();
  if (!fs::exists(run.dir / "a/epochs.csv")) o.require(run.train("a") == 0, "first run");
  o.require(run.train("b") == 0, "second run");
  o.require(run.train("half", 25) == 0, "run stopped at 25");
  o.require(run.train("resumed", std::nullopt, run.dir / "half/model.ckpt") == 0, "resumed run");
  if (!o.pass) return;
  const auto a = testing::read_file(run.dir / "a/epochs.csv");
  const auto b = testing::read_file(run.dir / "b/epochs.csv");
  const auto half = testing::read_file(run.dir / "half/epochs.csv");
  const auto resumed = testing::read_file(run.dir / "resumed/epochs.csv");
  o.require(!a.empty() && a == b, "identical epoch CSVs");
  o.require(std::count(half.begin(), half.end(), '\n') == 26, "stopped run has 25 epochs");
  o.require(resumed == a, "resumed epochs 26-50 match");
  o.require(testing::read_file(run.dir / "resumed/model.ckpt") ==
                testing::read_file(run.dir / "a/model.ckpt"),
            "resumed final weights match");
  o.detail << "two runs give identical epochs.csv; resume from epoch 25 reproduces epochs 26-50 "
              "and the final checkpoint byte for byte";
}

// Relation counts and distance bins of the published corpus tables.
struct TableCounts {
  std::size_t explicit_train = 15246, nonexplicit_train = 17289;
  std::size_t explicit_test = 699, nonexplicit_test = 737;
  std::size_t d0 = 3554, d1 = 8582, d2_10 = 1743, d_over10 = 2066;
};

// Checks printed `stats` output against the tables, numbers and percentages.
void check_stats_output(Outcome& o, const std::string& text, const TableCounts& t,
                        const std::string& label) {
  auto row = [](const std::string& name, std::initializer_list<std::size_t> cells) {
    std::string s = name;
    for (auto c : cells) s += ' ' + std::to_string(c);
    return s;
  };
  // collapse runs of spaces so the comparison ignores column widths
  std::istringstream in(text);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    std::istringstream w(line);
    std::string norm, word;
    while (w >> word) norm += (norm.empty() ? "" : " ") + word;
    lines.push_back(norm);
  }
  auto has = [&](const std::string& l) {
    return std::find(lines.begin(), lines.end(), l) != lines.end();
  };
  const std::size_t ex = t.explicit_train + t.explicit_test;
  const std::size_t ne = t.nonexplicit_train + t.nonexplicit_test;
  o.require(has(row("train", {t.explicit_train, t.nonexplicit_train, t.explicit_train + t.nonexplicit_train})),
            label + " training row");
  o.require(has(row("test", {t.explicit_test, t.nonexplicit_test, t.explicit_test + t.nonexplicit_test})),
            label + " testing row");
  o.require(has(row("total", {ex, ne, ex + ne})), label + " total row");
  o.require(has("0 " + std::to_string(t.d0) + " 22.29%"), label + " distance 0");
  o.require(has("1 " + std::to_string(t.d1) + " 53.82%"), label + " distance 1");
  o.require(has("2-10 " + std::to_string(t.d2_10) + " 10.93%"), label + " distance 2-10");
  o.require(has(">10 " + std::to_string(t.d_over10) + " 12.96%"), label + " distance >10");
  o.require(has("total " + std::to_string(ex) + " 100.00%"), label + " distance total");
}

void published_numbers_statement(Outcome& o) {
  // Table-shaped fixture: relations whose counts and distances equal the
  // published corpus tables, pushed through the stats command.
  const TableCounts t;
  testing::TempDir tmp;
  std::vector<std::string> words;
  for (int k = 0; k < 20; ++k) words.push_back("t" + std::to_string(k));
  std::int64_t id = 1;
  auto explicit_at = [&](std::int64_t d) {
    return testing::FixtureRelation{id++, "doc", "Explicit", {0}, {d + 2}, {d + 1}};
  };
  auto implicit_rel = [&] { return testing::FixtureRelation{id++, "doc", "Implicit", {0}, {1}, {}}; };
  // the test split takes the first 699 explicit relations in bin order
  std::vector<std::int64_t> dists;
  dists.insert(dists.end(), t.d0, 0);
  dists.insert(dists.end(), t.d1, 1);
  dists.insert(dists.end(), t.d2_10, 5);
  dists.insert(dists.end(), t.d_over10, 12);
  std::vector<testing::FixtureRelation> train, test;
  for (std::size_t k = 0; k < dists.size(); ++k)
    (k % 23 == 0 && test.size() < t.explicit_test ? test : train).push_back(explicit_at(dists[k]));
  while (test.size() < t.explicit_test) {  // top up from the training side
    test.push_back(train.back());
    train.pop_back();
  }
  for (std::size_t k = 0; k < t.nonexplicit_train; ++k) train.push_back(implicit_rel());
  for (std::size_t k = 0; k < t.nonexplicit_test; ++k) test.push_back(implicit_rel());
  testing::write_dataset(tmp / "train", {{"doc", words}}, train);
  testing::write_dataset(tmp / "test", {{"doc", words}}, test);

  std::ostringstream out, err;
  const int rc = cmd_stats({tmp / "train", tmp / "test", {}}, out, err);
  o.require(rc == 0, "stats on the table fixture: " + err.str());
  check_stats_output(o, out.str(), t, "fixture");
  o.detail << "stats reproduces the published count and distance tables (15,246/17,289, "
              "699/737; 22.29/53.82/10.93/12.96%) from table-shaped data";

  if (const char* pdtb = std::getenv("ARGLABEL_PDTB_DIR"); pdtb && *pdtb) {
    const fs::path root(pdtb);
    std::ostringstream pout, perr;
    const int prc = cmd_stats({root / "train", root / "test", {}}, pout, perr);
    o.require(prc == 0, "stats on " + root.string() + ": " + perr.str());
    check_stats_output(o, pout.str(), t, "PDTB");
    o.detail << "; PDTB at " << root.string() << " matches the tables";
  } else {
    o.detail << "; no PDTB supplied (ARGLABEL_PDTB_DIR unset), so the real-corpus counts and the "
                "trained F1 table (m2_GloVe 25.75% Arg1+Arg2) are not reproduced here and trained "
                "F1 is informational only";
  }
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int k = 1; k + 1 < argc; ++k)
    if (std::string(argv[k]) == "--only") only = std::atoi(argv[k + 1]);

  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"gradient correctness", gradient_correctness},
      {"numerical invariants", numerical_invariants},
      {"oracle/statistics equivalence", oracle_statistics},
      {"desk-scale learning", desk_scale_learning},
      {"determinism", determinism},
      {"published-number replication statement", published_numbers_statement},
  };
  std::cout.precision(6);
  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only && static_cast<int>(k + 1) != only) continue;
    Outcome o;
    o.detail.precision(4);
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << k + 1 << ". " << criteria[k].first << ": "
              << o.detail.str() << std::endl;
  }
  return all ? 0 : 1;
}
