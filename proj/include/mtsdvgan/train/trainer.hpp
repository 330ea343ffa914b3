#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mtsdvgan/data/windows.hpp"
#include "mtsdvgan/nn/model.hpp"
#include "mtsdvgan/train/losses.hpp"
#include "mtsdvgan/train/rmsprop.hpp"
#include "mtsdvgan/train/step.hpp"
#include "mtsdvgan/train/train_config.hpp"

namespace mtsdvgan::train {

/// One RMSProp state per network.
struct Optimizers {
    RmsProp<nn::EncoderParams<float>> encoder;
    RmsProp<nn::GeneratorParams<float>> generator;
    RmsProp<nn::DiscriminatorParams<float>> discriminator;

    Optimizers() = default;
    Optimizers(const nn::Model<float>& m, double rho, double epsilon);
};

/// Applies a step's gradients in the order discriminator, generator, encoder.
void apply_step(nn::Model<float>& model, Optimizers& opt, const nn::Model<float>& grad, double lr);

/// Runs one step on a batch and updates the model in place.
LossBundle train_step(nn::Model<float>& model, Optimizers& opt, const std::vector<Eigen::MatrixXd>& batch,
                      const TrainConfig& config, std::uint64_t epoch, std::uint64_t step);

struct TrainHistory {
    std::vector<LossBundle> epochs;                  // per-epoch means over steps
    std::vector<std::filesystem::path> checkpoints;  // one per epoch when a directory is given
};

struct TrainOptions {
    std::optional<std::filesystem::path> checkpoint_dir;
    /// Extra metadata stored in every checkpoint.
    std::vector<std::pair<std::string, std::string>> checkpoint_meta;
    std::function<void(std::int64_t epoch, const nn::Model<float>&, const LossBundle&)> on_epoch;
};

struct TrainResult {
    nn::Model<float> model;
    TrainHistory history;
};

/// Mean of a list of bundles; l_gc stays absent if any entry lacks it.
LossBundle mean_bundle(const std::vector<LossBundle>& steps);

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::int64_t epoch);

/// Seeded per-epoch shuffle, mini-batches in order, one checkpoint per epoch.
TrainResult train(const data::WindowSet& data, const TrainConfig& config, const TrainOptions& options = {});

/// epoch,kl,adv_gen,l_gc,contras_z,contras_x,j_enc,j_gen,j_disc (l_gc empty when absent).
void write_history_csv(const std::filesystem::path& path, const TrainHistory& history);

}  // namespace mtsdvgan::train
