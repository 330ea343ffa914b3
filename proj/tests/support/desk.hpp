#pragma once

#include "mtsdvgan/train/train_config.hpp"

namespace desk {

/// SWaT-row hyperparameters with a reduced network so a 60-epoch, 5-seed
/// protocol fits in minutes on one machine.
inline mtsdvgan::train::TrainConfig config(std::uint64_t seed, std::int64_t epochs = 60) {
    mtsdvgan::train::TrainConfig c;
    c.apply_preset(mtsdvgan::train::Preset::swat);
    c.hidden_units = 32;
    c.depth = 1;
    c.feature_dim = 32;
    c.epochs = epochs;
    c.seed = seed;
    return c;
}

}  // namespace desk
