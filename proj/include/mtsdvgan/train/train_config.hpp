#pragma once

#include <cstdint>
#include <set>
#include <string>

#include "mtsdvgan/config.hpp"
#include "mtsdvgan/nn/model.hpp"

namespace mtsdvgan::train {

/// Per-dataset rows of the hyperparameter table.
enum class Preset { swat, wadi, nsl_kdd };

Preset parse_preset(const std::string& s);
std::string to_string(Preset p);

/// Every knob of preprocessing, training and detection. Defaults are the
/// SWaT row with the common architecture settings.
struct TrainConfig {
    Preset preset = Preset::swat;

    // Table entries; key names match the config file.
    double learning_rate = 5e-5;
    std::int64_t window_size = 30;
    std::int64_t latent_dimension = 15;
    std::int64_t batch_size = 100;
    std::int64_t signal_number = 5;

    std::int64_t epochs = 500;
    std::int64_t shift = 10;
    std::int64_t hidden_units = 100;
    std::int64_t depth = 3;
    std::int64_t feature_dim = 100;
    double alpha = 0.1;
    double beta = 0.05;
    std::uint64_t seed = 0;
    double prob_clamp = 1e-6;
    double init_std = 0.02;
    double rmsprop_rho = 0.9;
    double rmsprop_epsilon = 1e-8;
    double sigma_jitter = 0.03;
    double sigma_scale = 0.1;
    nn::GeneratorInput generator_input = nn::GeneratorInput::autoregressive;
    /// Drop the log D term from the generator objective.
    bool gen_adversarial = true;

    // Ablations.
    bool no_contrastive = false;
    bool no_encoder = false;
    bool bce_generator = false;

    // Preprocessing and detection.
    double validation_fraction = 0.2;
    std::int64_t inversion_steps = 50;
    double inversion_lr = 0.05;

    /// Applies a preset's learning rate, batch size and signal number.
    void apply_preset(Preset p);

    void validate() const;

    nn::ModelShape model_shape(std::int64_t features) const;

    /// Preset keys are applied first, then every other key overrides.
    static TrainConfig from_key_values(const KeyValues& kv);

    /// Canonical text with every key materialized, in a fixed order.
    std::string to_text() const;

    static const std::set<std::string>& known_keys();
};

}  // namespace mtsdvgan::train
