#include "arglabel/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "arglabel/errors.hpp"
#include "arglabel/numeric.hpp"

namespace arglabel {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kKnownKeys = {
    "model.variant", "model.embed_dim", "model.hidden", "model.max_len",
    "model.dropout_rate", "model.mid_dense_size", "model.mask_padding",
    "train.epochs", "train.batch_size", "train.learning_rate", "train.beta1",
    "train.beta2", "train.epsilon", "train.seed", "train.shuffle",
    "train.eval_each_epoch", "train.clip_norm", "train.workers",
    "train.dense_embedding_updates", "train.checkpoint_every", "data.train",
    "data.test", "embedding.mode", "embedding.pretrained", "output.dir"};

template <typename T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto node = tree.get_child_optional(key);
  if (!node) return fallback;
  // the defaulted overload of get() swallows conversion failures
  const auto v = node->get_value_optional<T>();
  if (!v) throw ConfigError("config value for " + key + " has the wrong type");
  return *v;
}

bool get_bool(const pt::ptree& tree, const std::string& key, bool fallback) {
  const auto v = tree.get_optional<std::string>(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw ConfigError("config value for " + key + " must be a boolean");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  train.validate();
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  std::error_code ec;
  if (train_data.empty()) throw ConfigError("[data] train is required");
  if (!std::filesystem::exists(train_data, ec))
    throw IoError("training data not found: " + train_data.string());
  if (!test_data.empty() && !std::filesystem::exists(test_data, ec))
    throw IoError("test data not found: " + test_data.string());
  if (embedding_mode == EmbeddingMode::Pretrained) {
    if (pretrained_path.empty())
      throw ConfigError("embedding mode pretrained needs [embedding] pretrained");
    if (!std::filesystem::exists(pretrained_path, ec))
      throw IoError("pretrained vectors not found: " + pretrained_path.string());
  }
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty())
      throw ConfigError("config key '" + section + "' must sit inside a section");
    for (const auto& [key, value] : body)
      if (!kKnownKeys.count(section + "." + key))
        throw ConfigError("unknown config key " + section + "." + key);
  }

  RunConfig c;
  c.model.variant = parse_variant(get<std::string>(tree, "model.variant", "m1"));
  c.model.embed_dim = get<Index>(tree, "model.embed_dim", c.model.embed_dim);
  c.model.hidden = get<Index>(tree, "model.hidden", c.model.hidden);
  c.model.max_len = get<std::size_t>(tree, "model.max_len", c.model.max_len);
  c.model.dropout_rate = get<double>(tree, "model.dropout_rate", c.model.dropout_rate);
  c.model.mid_dense_size = get<Index>(tree, "model.mid_dense_size", c.model.mid_dense_size);
  c.model.mask_padding = get_bool(tree, "model.mask_padding", c.model.mask_padding);

  auto& t = c.train;
  t.epochs = get<int>(tree, "train.epochs", t.epochs);
  t.batch_size = get<int>(tree, "train.batch_size", t.batch_size);
  t.adam.learning_rate = get<double>(tree, "train.learning_rate", t.adam.learning_rate);
  t.adam.beta1 = get<double>(tree, "train.beta1", t.adam.beta1);
  t.adam.beta2 = get<double>(tree, "train.beta2", t.adam.beta2);
  t.adam.epsilon = get<double>(tree, "train.epsilon", t.adam.epsilon);
  t.adam.dense_embedding_updates =
      get_bool(tree, "train.dense_embedding_updates", t.adam.dense_embedding_updates);
  t.seed = get<std::uint64_t>(tree, "train.seed", t.seed);
  t.shuffle = get_bool(tree, "train.shuffle", t.shuffle);
  t.eval_each_epoch = get_bool(tree, "train.eval_each_epoch", t.eval_each_epoch);
  t.clip_norm = get<double>(tree, "train.clip_norm", t.clip_norm);
  t.workers = get<unsigned>(tree, "train.workers", t.workers);
  c.checkpoint_every = get<int>(tree, "train.checkpoint_every", c.checkpoint_every);

  c.train_data = resolve(base_dir, get<std::string>(tree, "data.train", ""));
  c.test_data = resolve(base_dir, get<std::string>(tree, "data.test", ""));
  const auto mode = get<std::string>(tree, "embedding.mode", "random");
  if (mode == "random") c.embedding_mode = EmbeddingMode::Random;
  else if (mode == "pretrained") c.embedding_mode = EmbeddingMode::Pretrained;
  else throw ConfigError("embedding mode must be random or pretrained");
  c.pretrained_path = resolve(base_dir, get<std::string>(tree, "embedding.pretrained", ""));
  c.out_dir = resolve(base_dir, get<std::string>(tree, "output.dir", "run"));
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.parent_path());
}

std::string to_ini(const RunConfig& c) {
  std::ostringstream o;
  const auto& t = c.train;
  o << "[model]\n"
    << "variant = " << variant_name(c.model.variant) << '\n'
    << "embed_dim = " << c.model.embed_dim << '\n'
    << "hidden = " << c.model.hidden << '\n'
    << "max_len = " << c.model.max_len << '\n'
    << "dropout_rate = " << format_real(c.model.dropout_rate) << '\n'
    << "mid_dense_size = " << c.model.mid_dense_size << '\n'
    << "mask_padding = " << (c.model.mask_padding ? "true" : "false") << '\n'
    << "\n[train]\n"
    << "epochs = " << t.epochs << '\n'
    << "batch_size = " << t.batch_size << '\n'
    << "learning_rate = " << format_real(t.adam.learning_rate) << '\n'
    << "beta1 = " << format_real(t.adam.beta1) << '\n'
    << "beta2 = " << format_real(t.adam.beta2) << '\n'
    << "epsilon = " << format_real(t.adam.epsilon) << '\n'
    << "seed = " << t.seed << '\n'
    << "shuffle = " << (t.shuffle ? "true" : "false") << '\n'
    << "eval_each_epoch = " << (t.eval_each_epoch ? "true" : "false") << '\n'
    << "clip_norm = " << format_real(t.clip_norm) << '\n'
    << "workers = " << t.workers << '\n'
    << "dense_embedding_updates = " << (t.adam.dense_embedding_updates ? "true" : "false") << '\n'
    << "checkpoint_every = " << c.checkpoint_every << '\n'
    << "\n[data]\n"
    << "train = " << c.train_data.string() << '\n'
    << "test = " << c.test_data.string() << '\n'
    << "\n[embedding]\n"
    << "mode = " << (c.embedding_mode == EmbeddingMode::Random ? "random" : "pretrained") << '\n'
    << "pretrained = " << c.pretrained_path.string() << '\n'
    << "\n[output]\n"
    << "dir = " << c.out_dir.string() << '\n';
  return o.str();
}

}  // namespace arglabel
