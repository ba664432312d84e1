// arglabel: argument labeling of explicit discourse relations.
//
//   arglabel stats --train DIR [--test DIR] [--json FILE]
//   arglabel synth --out DIR [--n N] [--seed S] [--distances 0:0.25,1:0.5]
//   arglabel train --config run.ini [--seed S] [--out DIR] [--resume CKPT]
//   arglabel predict --checkpoint CKPT --data DIR [--out FILE]
//   arglabel score --predictions FILE --gold DIR [--json FILE] [--csv FILE]
//   arglabel gradcheck [--variant m1|m2] [--seed S]

#include <iostream>
#include <string>
#include <type_traits>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <CLI11.hpp>

#include "arglabel/commands.hpp"
#include "arglabel/errors.hpp"

namespace {

// [synth] section keys mirror the long flag names with '_' for '-'.
void apply_synth_config(const std::string& path, arglabel::SynthConfig& c) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw arglabel::ParseError(e.what());
  }
  const auto s = tree.get_child_optional("synth");
  if (!s) return;
  auto read = [&](const char* key, auto& field) {
    const auto node = s->get_child_optional(key);
    if (!node) return;
    using T = std::remove_reference_t<decltype(field)>;
    const auto v = node->get_value_optional<T>();
    if (!v) throw arglabel::ConfigError(std::string("[synth] ") + key + " has the wrong type");
    field = *v;
  };
  read("n", c.n_instances);
  read("vocab_size", c.vocab_size);
  read("max_window", c.max_window);
  read("max_arg_len", c.max_arg_len);
  read("relations_per_doc", c.relations_per_doc);
  read("nonexplicit", c.n_nonexplicit);
  read("ambiguity", c.delimiter_ambiguity);
  read("first_id", c.first_id);
  read("prefix", c.doc_prefix);
  read("seed", c.seed);
  if (auto d = s->get_optional<std::string>("distances"))
    c.distance_distribution = arglabel::parse_distance_distribution(*d);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace arglabel;
  CLI::App app{"BiLSTM argument labeling for explicit discourse relations"};
  app.require_subcommand(1);

  StatsOptions stats;
  auto* c_stats = app.add_subcommand("stats", "Relation counts and Arg1-Arg2 distance histogram");
  c_stats->add_option("--train", stats.train, "Training dataset directory");
  c_stats->add_option("--test", stats.test, "Test dataset directory");
  c_stats->add_option("--json", stats.json_out, "Write the key/value report here");

  SynthOptions synth;
  std::string synth_config, synth_distances;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  c_synth->add_option("--config", synth_config, "INI file with a [synth] section");
  c_synth->add_option("--out", synth.out, "Output dataset directory")->required();
  c_synth->add_option("--n", synth.config.n_instances, "Explicit relations");
  c_synth->add_option("--vocab-size", synth.config.vocab_size, "Content vocabulary size");
  c_synth->add_option("--max-window", synth.config.max_window, "Longest relation window");
  c_synth->add_option("--max-arg-len", synth.config.max_arg_len, "Content tokens per argument");
  c_synth->add_option("--distances", synth_distances, "distance:weight list, e.g. 0:0.25,1:0.5");
  c_synth->add_option("--nonexplicit", synth.config.n_nonexplicit, "Implicit relations to add");
  c_synth->add_option("--ambiguity", synth.config.delimiter_ambiguity,
                      "Probability of a connective word inside filler");
  c_synth->add_option("--first-id", synth.config.first_id, "First relation ID");
  c_synth->add_option("--prefix", synth.config.doc_prefix, "DocID prefix");
  c_synth->add_option("--seed", synth.config.seed, "Generator seed");

  TrainOptions tr;
  std::uint64_t tr_seed = 0;
  std::string tr_out, tr_resume;
  unsigned tr_workers = 0;
  int tr_epochs = 0, tr_stop = 0;
  auto* c_train = app.add_subcommand("train", "Train m1/m2 and write checkpoint, epoch CSV, manifest");
  c_train->add_option("--config", tr.config, "Run configuration (INI)")->required();
  auto* o_seed = c_train->add_option("--seed", tr_seed, "Override [train] seed");
  auto* o_out = c_train->add_option("--out", tr_out, "Override [output] dir");
  auto* o_resume = c_train->add_option("--resume", tr_resume, "Continue from a checkpoint");
  auto* o_workers = c_train->add_option("--workers", tr_workers, "Threads per minibatch");
  auto* o_epochs = c_train->add_option("--epochs", tr_epochs, "Override [train] epochs");
  auto* o_stop = c_train->add_option("--stop-after", tr_stop, "Stop (and checkpoint) after this epoch");

  PredictOptions pr;
  std::string pr_config;
  auto* c_predict = app.add_subcommand("predict", "Label relations with a trained checkpoint");
  c_predict->add_option("--checkpoint", pr.checkpoint, "Model checkpoint")->required();
  c_predict->add_option("--data", pr.data, "Dataset directory")->required();
  c_predict->add_option("--out", pr.out, "Prediction file (default stdout)");
  auto* o_pr_config = c_predict->add_option("--config", pr_config, "Cross-check model shape");
  c_predict->add_option("--workers", pr.workers, "Threads");

  ScoreOptionsCli sc;
  auto* c_score = app.add_subcommand("score", "Exact-match scoring, overall and by distance");
  c_score->add_option("--predictions", sc.predictions, "Prediction file")->required();
  c_score->add_option("--gold", sc.gold, "Gold dataset directory")->required();
  c_score->add_flag("--fold-connective", sc.fold_connective, "Score Arg2 together with the connective");
  c_score->add_option("--json", sc.json_out, "Write the machine-readable report here");
  c_score->add_option("--csv", sc.csv_out, "Write distance,count,f1_arg1,f1_arg2,f1_both here");

  GradCheckOptions gc;
  std::string gc_variant = "m1";
  auto* c_grad = app.add_subcommand("gradcheck", "Finite-difference check of the analytic gradients");
  c_grad->add_option("--variant", gc_variant, "m1 or m2");
  c_grad->add_option("--seed", gc.seed, "Fixture seed");
  c_grad->add_option("--coords", gc.per_family, "Coordinates per tensor family");
  c_grad->add_option("--epsilon", gc.epsilon, "Central-difference step");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_stats) return cmd_stats(stats, std::cout, std::cerr);
    if (*c_synth) {
      if (!synth_config.empty()) apply_synth_config(synth_config, synth.config);
      if (!synth_distances.empty())
        synth.config.distance_distribution = parse_distance_distribution(synth_distances);
      return cmd_synth(synth, std::cout, std::cerr);
    }
    if (*c_train) {
      if (*o_seed) tr.seed = tr_seed;
      if (*o_out) tr.out = tr_out;
      if (*o_resume) tr.resume = tr_resume;
      if (*o_workers) tr.workers = tr_workers;
      if (*o_epochs) tr.epochs = tr_epochs;
      if (*o_stop) tr.stop_after = tr_stop;
      return cmd_train(tr, std::cout, std::cerr);
    }
    if (*c_predict) {
      if (*o_pr_config) pr.config = pr_config;
      return cmd_predict(pr, std::cout, std::cerr);
    }
    if (*c_score) return cmd_score(sc, std::cout, std::cerr);
    if (*c_grad) {
      gc.variant = parse_variant(gc_variant);
      return cmd_gradcheck(gc, std::cout, std::cerr);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  }
  return 1;
}
