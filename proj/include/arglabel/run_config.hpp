#ifndef ARGLABEL_RUN_CONFIG_HPP
#define ARGLABEL_RUN_CONFIG_HPP

#include <filesystem>
#include <string>

#include "arglabel/net.hpp"
#include "arglabel/train.hpp"

namespace arglabel {

enum class EmbeddingMode { Random, Pretrained };

// INI layout:
//   [model]     variant, embed_dim, hidden, max_len, dropout_rate,
//               mid_dense_size, mask_padding
//   [train]     epochs, batch_size, learning_rate, beta1, beta2, epsilon,
//               seed, shuffle, eval_each_epoch, clip_norm, workers,
//               dense_embedding_updates, checkpoint_every
//   [data]      train, test
//   [embedding] mode (random | pretrained), pretrained
//   [output]    dir
// Relative paths resolve against the config file's directory. Command-line
// flags override file values.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  std::filesystem::path train_data;
  std::filesystem::path test_data;
  EmbeddingMode embedding_mode = EmbeddingMode::Random;
  std::filesystem::path pretrained_path;
  std::filesystem::path out_dir = "run";
  int checkpoint_every = 0;  // 0: final checkpoint only

  // Checks ranges and that referenced paths exist.
  void validate() const;
};

RunConfig parse_run_config(const std::string& text,
                           const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical INI rendering; hashing it identifies the effective configuration.
std::string to_ini(const RunConfig& cfg);

}  // namespace arglabel

#endif  // ARGLABEL_RUN_CONFIG_HPP
