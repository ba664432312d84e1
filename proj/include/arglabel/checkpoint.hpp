#ifndef ARGLABEL_CHECKPOINT_HPP
#define ARGLABEL_CHECKPOINT_HPP

#include <filesystem>
#include <map>
#include <string>

#include "arglabel/net.hpp"
#include "arglabel/train.hpp"
#include "arglabel/vocabulary.hpp"

namespace arglabel {

// Binary checkpoint: model config, the vocabulary, every parameter tensor by
// name and shape, and optionally the optimizer moments, RNG state and epoch
// log needed to resume. Reals are stored as raw IEEE-754 doubles, so a
// write/read round trip is bit-exact.
struct Checkpoint {
  ModelConfig model;
  Vocabulary vocab;
  TrainState<double> state;
  bool has_train_state = false;
  std::map<std::string, std::string> meta;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace arglabel

#endif  // ARGLABEL_CHECKPOINT_HPP
