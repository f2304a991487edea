#include "soris/training.hpp"

namespace soris {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning rate must be a finite non-negative number");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (train_samples < 1) throw ConfigError("training needs at least one sample");
}

}  // namespace soris
