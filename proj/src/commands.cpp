#include "arglabel/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "arglabel/checkpoint.hpp"
#include "arglabel/corpus.hpp"
#include "arglabel/embedding.hpp"
#include "arglabel/errors.hpp"
#include "arglabel/numeric.hpp"
#include "arglabel/pipeline.hpp"
#include "arglabel/run_config.hpp"
#include "arglabel/score.hpp"
#include "arglabel/train.hpp"
#include "arglabel/vocabulary.hpp"

#ifndef ARGLABEL_VERSION
#define ARGLABEL_VERSION "unknown"
#endif

namespace arglabel {

using nlohmann::json;

namespace {

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    body();
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(ErrorKind::Io);
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string percent(std::size_t part, std::size_t whole) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%",
                whole ? 100.0 * static_cast<double>(part) / static_cast<double>(whole) : 0.0);
  return buf;
}

std::uint64_t dataset_fingerprint(const Dataset& ds, const std::filesystem::path& dir) {
  std::ifstream in(dir / "relations.json", std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  std::uint64_t h = fnv1a(buf.str());
  for (const auto& [id, doc] : ds.documents) {
    h = fnv1a(id, h);
    for (const auto& t : doc.tokens) h = fnv1a(t.surface + '\n', h);
  }
  return h;
}

void write_epoch_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& records) {
  auto out = open_out(path);
  out << "epoch,train_loss,f1_arg1,f1_arg2,f1_both\n";
  for (const auto& r : records)
    out << r.epoch << ',' << format_real(r.train_loss) << ',' << format_real(r.f1_arg1) << ','
        << format_real(r.f1_arg2) << ',' << format_real(r.f1_both) << '\n';
}

void check_model_compatible(const ModelConfig& ckpt, const ModelConfig& cfg) {
  auto shape = [](const ModelConfig& c) {
    std::ostringstream o;
    o << variant_name(c.variant) << " embed_dim=" << c.embed_dim << " hidden=" << c.hidden
      << " max_len=" << c.max_len;
    if (c.variant == Variant::M2) o << " mid_dense_size=" << c.mid_dense_size;
    return o.str();
  };
  const bool same = ckpt.variant == cfg.variant && ckpt.embed_dim == cfg.embed_dim &&
                    ckpt.hidden == cfg.hidden && ckpt.max_len == cfg.max_len &&
                    (cfg.variant != Variant::M2 || ckpt.mid_dense_size == cfg.mid_dense_size);
  if (!same)
    throw ValidationError("shape mismatch: checkpoint is " + shape(ckpt) + ", config asks for " +
                          shape(cfg));
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_stats(const StatsOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.train.empty() && opt.test.empty())
      throw ConfigError("stats needs --train and/or --test");
    Dataset train, test;
    if (!opt.train.empty()) train = load_dataset(opt.train);
    if (!opt.test.empty()) test = load_dataset(opt.test);
    const CorpusStats s = corpus_stats(train.relations, test.relations);

    char buf[128];
    out << "Relations\n";
    std::snprintf(buf, sizeof buf, "%-10s %10s %14s %10s\n", "split", "Explicit", "Non-Explicit",
                  "Total");
    out << buf;
    auto row = [&](const char* name, std::size_t e, std::size_t n) {
      std::snprintf(buf, sizeof buf, "%-10s %10zu %14zu %10zu\n", name, e, n, e + n);
      out << buf;
    };
    row("train", s.n_explicit_train, s.n_nonexplicit_train);
    row("test", s.n_explicit_test, s.n_nonexplicit_test);
    row("total", s.n_explicit(), s.n_nonexplicit());

    out << "\nArg1-Arg2 distance (explicit relations)\n";
    std::snprintf(buf, sizeof buf, "%-10s %10s %10s\n", "distance", "count", "percent");
    out << buf;
    const std::size_t measured = s.n_explicit() - s.n_distance_rejected;
    for (DistanceBin b : kAllBins) {
      std::snprintf(buf, sizeof buf, "%-10s %10zu %10s\n", bin_name(b), s.bin_counts.at(b),
                    percent(s.bin_counts.at(b), measured).c_str());
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%-10s %10zu %10s\n", "total", measured,
                  percent(measured, measured).c_str());
    out << buf;
    if (s.n_distance_rejected)
      out << s.n_distance_rejected << " explicit relations have overlapping arguments "
          << "and no defined distance\n";

    if (!opt.json_out.empty()) {
      json hist = json::object();
      for (const auto& [d, n] : s.distance_histogram) hist[std::to_string(d)] = n;
      json bins = json::object();
      for (const auto& [b, n] : s.bin_counts) bins[bin_name(b)] = n;
      json root = {{"n_explicit_train", s.n_explicit_train},
                   {"n_explicit_test", s.n_explicit_test},
                   {"n_nonexplicit_train", s.n_nonexplicit_train},
                   {"n_nonexplicit_test", s.n_nonexplicit_test},
                   {"n_explicit", s.n_explicit()},
                   {"n_nonexplicit", s.n_nonexplicit()},
                   {"n_total", s.n_total()},
                   {"n_distance_rejected", s.n_distance_rejected},
                   {"distance_bins", bins},
                   {"distance_histogram", hist}};
      open_out(opt.json_out) << root.dump(2) << '\n';
    }
  });
}

int cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.out.empty()) throw ConfigError("synth needs --out");
    const SynthCorpus corpus = generate(opt.config);
    write_synth_corpus(corpus, opt.out);
    out << "wrote " << corpus.truth.size() << " explicit and "
        << corpus.relations.size() - corpus.truth.size() << " implicit relations in "
        << corpus.documents.size() << " documents to " << opt.out.string() << '\n';
  });
}

// ---------------------------------------------------------------------------

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = load_run_config(opt.config);
    if (opt.seed) cfg.train.seed = *opt.seed;
    if (opt.out) cfg.out_dir = *opt.out;
    if (opt.workers) cfg.train.workers = *opt.workers;
    if (opt.epochs) cfg.train.epochs = *opt.epochs;
    cfg.validate();
    if (opt.stop_after && (*opt.stop_after < 1 || *opt.stop_after > cfg.train.epochs))
      throw ConfigError("--stop-after must be in [1, epochs]");

    const Dataset train_ds = load_dataset(cfg.train_data);
    Dataset test_ds;
    if (!cfg.test_data.empty()) test_ds = load_dataset(cfg.test_data);

    Checkpoint ckpt;
    ckpt.model = cfg.model;
    ckpt.has_train_state = true;
    std::size_t coverage = 0;
    if (opt.resume) {
      ckpt = load_checkpoint(*opt.resume);
      if (!ckpt.has_train_state)
        throw ValidationError(opt.resume->string() + " holds no optimizer state to resume");
      check_model_compatible(ckpt.model, cfg.model);
      ckpt.model = cfg.model;
      out << "resuming after epoch " << ckpt.state.epochs_done << '\n';
    } else {
      ckpt.vocab = build_vocabulary(train_ds.relations, train_ds.documents);
      EmbeddingMatrix<double> emb;
      const auto emb_seed = detail::derive_seed(cfg.train.seed, 301);
      if (cfg.embedding_mode == EmbeddingMode::Pretrained) {
        auto pre = load_pretrained<double>(cfg.pretrained_path, ckpt.vocab, cfg.model.embed_dim,
                                           emb_seed);
        emb = std::move(pre.vectors);
        coverage = pre.coverage;
        out << "pretrained coverage: " << coverage << " of " << ckpt.vocab.size() - 1
            << " words\n";
      } else {
        emb = init_random<double>(ckpt.vocab, cfg.model.embed_dim, emb_seed);
      }
      ckpt.state = start_training(
          init_model<double>(cfg.model, std::move(emb), detail::derive_seed(cfg.train.seed, 302)),
          cfg.train);
    }
    if (ckpt.state.adam.row_step.size() != ckpt.vocab.size())
      throw ValidationError("optimizer state does not match the vocabulary");

    const EncodedSet train_set = encode_relations(train_ds.relations, train_ds.documents,
                                                  ckpt.vocab, cfg.model.max_len, &err);
    const EncodedSet test_set = encode_relations(test_ds.relations, test_ds.documents,
                                                 ckpt.vocab, cfg.model.max_len, &err);
    out << "train instances: " << train_set.instances.size() << " (skipped " << train_set.skipped
        << "), test relations: " << test_set.relations.size() << " (skipped " << test_set.skipped
        << ")\n";

    const auto dir = cfg.out_dir;
    std::filesystem::create_directories(dir);
    // Output location and thread count do not affect the trained weights.
    RunConfig hashed = cfg;
    hashed.out_dir.clear();
    hashed.train.workers = 1;
    ckpt.meta["config_hash"] = hex64(fnv1a(to_ini(hashed)));
    ckpt.meta["seed"] = std::to_string(cfg.train.seed);

    EvalHook<double> eval;
    if (!test_set.relations.empty())
      eval = [&](const ModelParams<double>& p) {
        return f1_triple(evaluate(p, cfg.model, test_set, {}, cfg.train.workers));
      };
    EpochHook<double> on_epoch = [&](const TrainState<double>& st) {
      const auto& r = st.records.back();
      char line[160];
      std::snprintf(line, sizeof line,
                    "epoch %3d/%d  loss %.6f  f1 arg1 %.4f arg2 %.4f both %.4f\n", r.epoch,
                    cfg.train.epochs, r.train_loss, r.f1_arg1, r.f1_arg2, r.f1_both);
      out << line << std::flush;
      if (cfg.checkpoint_every > 0 && r.epoch % cfg.checkpoint_every == 0) {
        char name[32];
        std::snprintf(name, sizeof name, "epoch_%03d.ckpt", r.epoch);
        Checkpoint snap{ckpt.model, ckpt.vocab, st, true, ckpt.meta};
        std::filesystem::create_directories(dir / "checkpoints");
        save_checkpoint(dir / "checkpoints" / name, snap);
      }
    };

    TrainConfig run_cfg = cfg.train;
    if (opt.stop_after) run_cfg.epochs = *opt.stop_after;
    const auto started = std::chrono::steady_clock::now();
    train<double>(ckpt.state, train_set.instances, cfg.model, run_cfg, eval, on_epoch);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    save_checkpoint(dir / "model.ckpt", ckpt);
    ckpt.vocab.save(dir / "vocab.tsv");
    write_epoch_csv(dir / "epochs.csv", ckpt.state.records);

    if (!test_set.relations.empty()) {
      const auto preds = predict(ckpt.state.params, cfg.model, test_set, cfg.train.workers);
      const auto records = to_records(preds, test_set);
      const ScoreReport rep = score(records);
      const DistanceReport dist = score_by_distance(records);
      open_out(dir / "test_scores.json") << score_json(rep, dist, {}) << '\n';
      auto csv = open_out(dir / "test_distance.csv");
      write_distance_csv(csv, dist);
    }

    json manifest = {
        {"tool", "arglabel"},
        {"version", ARGLABEL_VERSION},
        {"config", to_ini(cfg)},
        {"config_hash", ckpt.meta["config_hash"]},
        {"seed", cfg.train.seed},
        {"resumed_from", opt.resume ? opt.resume->string() : ""},
        {"epochs_done", ckpt.state.epochs_done},
        {"vocabulary_size", ckpt.vocab.size()},
        {"pretrained_coverage", coverage},
        {"train_instances", train_set.instances.size()},
        {"train_skipped", train_set.skipped},
        {"test_relations", test_set.relations.size()},
        {"test_skipped", test_set.skipped},
        {"inputs",
         {{"train", {{"path", cfg.train_data.string()},
                     {"fingerprint", hex64(dataset_fingerprint(train_ds, cfg.train_data))}}},
          {"test", {{"path", cfg.test_data.string()},
                    {"fingerprint", cfg.test_data.empty()
                                        ? ""
                                        : hex64(dataset_fingerprint(test_ds, cfg.test_data))}}}}},
        {"wall_seconds", seconds}};
    open_out(dir / "manifest.json") << manifest.dump(2) << '\n';
    out << "wrote " << (dir / "model.ckpt").string() << '\n';
  });
}

int cmd_predict(const PredictOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Checkpoint ckpt = load_checkpoint(opt.checkpoint);
    if (opt.config) check_model_compatible(ckpt.model, load_run_config(*opt.config).model);
    const Dataset ds = load_dataset(opt.data);
    const EncodedSet set =
        encode_relations(ds.relations, ds.documents, ckpt.vocab, ckpt.model.max_len, &err);
    const auto preds = predict(ckpt.state.params, ckpt.model, set, opt.workers);
    if (opt.out.empty()) {
      write_predictions(out, preds);
    } else {
      auto file = open_out(opt.out);
      write_predictions(file, preds);
      out << "wrote " << preds.size() << " predictions to " << opt.out.string() << '\n';
    }
  });
}

int cmd_score(const ScoreOptionsCli& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto preds = read_predictions(opt.predictions);
    const Dataset gold = load_dataset(opt.gold);
    const auto records = join_predictions(preds, gold.relations);
    ScoreOptions so;
    so.fold_connective_into_arg2 = opt.fold_connective;
    const ScoreReport rep = score(records, so);
    const DistanceReport dist = score_by_distance(records, so);
    print_score_table(out, rep, &dist);
    if (!opt.json_out.empty()) open_out(opt.json_out) << score_json(rep, dist, so) << '\n';
    if (!opt.csv_out.empty()) {
      auto csv = open_out(opt.csv_out);
      write_distance_csv(csv, dist);
    }
  });
}

// ---------------------------------------------------------------------------

GradCheckFixture make_gradcheck_fixture(Variant variant, std::uint64_t seed) {
  GradCheckFixture f;
  f.config.variant = variant;
  f.config.embed_dim = 8;
  f.config.hidden = 5;
  f.config.mid_dense_size = 6;
  f.config.max_len = 12;
  f.config.dropout_rate = 0.5;
  constexpr std::size_t kVocab = 20;

  std::mt19937_64 rng(seed);
  // Ids 16..19 never occur, so their embedding gradients are exactly zero.
  std::uniform_int_distribution<int> word(1, 15);
  std::uniform_int_distribution<int> label(0, kNumLabels - 1);
  f.instance.word_ids.resize(f.config.max_len);
  f.instance.labels.resize(f.config.max_len);
  f.instance.real_len = 9;
  for (std::size_t t = 0; t < f.config.max_len; ++t) {
    const bool pad = t >= f.instance.real_len;
    f.instance.word_ids[t] = pad ? 0 : word(rng);
    f.instance.labels[t] = pad ? Label::None : static_cast<Label>(label(rng));
  }
  // Larger-than-default embeddings so the input path carries real signal.
  auto emb = init_random<double>(kVocab, f.config.embed_dim, rng(), 0.5);
  f.params = init_model<double>(f.config, std::move(emb), rng());
  // Non-zero biases exercise the bias gradients away from the symmetric point.
  std::uniform_real_distribution<double> bias(-0.3, 0.3);
  for_each_layer_tensor(
      [&](const char* name, auto& t) {
        if (std::string(name).ends_with(".b"))
          for (Index k = 0; k < t.size(); ++k) t(k) = bias(rng);
      },
      f.params);
  return f;
}

int cmd_gradcheck(const GradCheckOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto f = make_gradcheck_fixture(opt.variant, opt.seed);
    const auto rep =
        grad_check(f.params, f.config, f.instance, opt.epsilon, opt.per_family, opt.seed + 1);
    char line[128];
    for (const auto& fam : rep.families) {
      std::snprintf(line, sizeof line, "%-12s %5zu coords  max rel error %.3e\n",
                    fam.name.c_str(), fam.coordinates, fam.max_rel_error);
      out << line;
    }
    std::snprintf(line, sizeof line, "%s: max relative error %.3e (threshold %.1e)\n",
                  variant_name(opt.variant), rep.max_rel_error, opt.threshold);
    out << line;
    if (!(rep.max_rel_error < opt.threshold))
      throw NumericError("gradient check failed");
  });
}

}  // namespace arglabel
