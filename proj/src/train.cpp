#include "arglabel/train.hpp"

namespace arglabel {

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("beta1 and beta2 must be in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (clip_norm < 0.0) throw ConfigError("clip_norm must be >= 0");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  adam.validate();
}

}  // namespace arglabel
