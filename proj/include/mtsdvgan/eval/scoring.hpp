#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtsdvgan/data/windows.hpp"
#include "mtsdvgan/nn/model.hpp"

namespace mtsdvgan::eval {

/// Mean squared difference over all k x d entries.
double recon_loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_recon);

/// 1 - clamp(D(x)): larger means more anomalous.
double disc_score(double prob, double prob_clamp);

/// How a window's latent code is recovered for reconstruction.
struct ScoringOptions {
    double prob_clamp = 1e-6;
    std::int64_t inversion_steps = 50;   // only without an encoder
    double inversion_lr = 0.05;
    std::size_t chunk = 256;             // windows per batched forward
};

/// Raw per-window channels.
struct RawScores {
    std::vector<double> l_r;
    std::vector<double> l_d;
};

/// Reconstruction from the posterior mean (no sampling noise) or, without an
/// encoder, from a latent fitted by RMSProp on the window MSE starting at 0.
RawScores score_windows(const nn::Model<float>& model, const data::WindowSet& windows,
                        const ScoringOptions& options = {});

/// Latents recovered for a batch of windows by minimizing reconstruction MSE.
nn::Mat<float> invert_latent(const nn::GeneratorParams<float>& gen, const nn::Sequence<float>& x,
                             std::int64_t steps, double lr);

/// Min-max rescale against the reference range, then clip to [0, 1].
/// Throws when the reference is empty or constant, naming `channel`.
std::vector<double> normalize_scores(const std::vector<double>& reference, const std::vector<double>& target,
                                     const std::string& channel);

/// lambda * l_d + (1 - lambda) * l_r.
double rd_score(double l_d, double l_r, double lambda);
std::vector<double> rd_score(const std::vector<double>& l_d, const std::vector<double>& l_r, double lambda);

}  // namespace mtsdvgan::eval
