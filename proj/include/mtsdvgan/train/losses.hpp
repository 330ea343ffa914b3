#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "mtsdvgan/error.hpp"
#include "mtsdvgan/nn/tensor.hpp"

namespace mtsdvgan::train {

using nn::Index;
using nn::Mat;
using nn::Sequence;
using nn::Vec;

/// Per-step (or per-epoch mean) training losses. `l_gc` is absent under the
/// bce_generator ablation.
struct LossBundle {
    double kl = 0;
    double adv_gen = 0;
    std::optional<double> l_gc = 0.0;
    double contras_z = 0;
    double contras_x = 0;
    double j_enc = 0;
    double j_gen = 0;
    double j_disc = 0;
};

/// 0.5 * sum_j (mu^2 + exp(logvar) - 1 - logvar), averaged over the batch columns.
template <class S>
double kl_gauss_std(const Mat<S>& mu, const Mat<S>& logvar) {
    if (mu.rows() != logvar.rows() || mu.cols() != logvar.cols()) throw ValidationError("kl: shape mismatch");
    if (!mu.allFinite() || !logvar.allFinite()) throw NumericError("kl: non-finite input");
    const auto a = mu.array().template cast<double>();
    const auto l = logvar.array().template cast<double>();
    return 0.5 * (a.square() + l.exp() - 1.0 - l).sum() / static_cast<double>(mu.cols());
}

/// -ln(clamp(p)) and its derivative with respect to the logit of p.
template <class S>
S neg_log_prob(S p, S eps) {
    return -std::log(std::clamp(p, eps, S(1) - eps));
}
template <class S>
S neg_log_prob_dlogit(S p, S eps) {
    return (p > eps && p < S(1) - eps) ? -(S(1) - p) : S(0);
}
/// -ln(1 - clamp(p)) and its derivative with respect to the logit of p.
template <class S>
S neg_log_one_minus(S p, S eps) {
    return -std::log(S(1) - std::clamp(p, eps, S(1) - eps));
}
template <class S>
S neg_log_one_minus_dlogit(S p, S eps) {
    return (p > eps && p < S(1) - eps) ? p : S(0);
}

/// -mean_b ln clamp(D(x~_b)).
template <class S>
double adversarial_gen_term(const Mat<S>& prob, S eps) {
    if (prob.size() == 0) throw ValidationError("adversarial term: empty batch");
    double s = 0;
    for (Index i = 0; i < prob.size(); ++i) s += static_cast<double>(neg_log_prob(prob.data()[i], eps));
    return s / static_cast<double>(prob.size());
}

/// Mean over the batch columns of an F x B feature matrix.
template <class S>
Vec<S> feature_center(const Mat<S>& fea) {
    if (fea.cols() == 0) throw ValidationError("feature_center: empty batch");
    return fea.rowwise().mean();
}

/// Euclidean distance between the feature centers of two batches.
template <class S>
double feature_center_loss(const Mat<S>& fea_real, const Mat<S>& fea_recon) {
    if (fea_real.cols() == 0 || fea_recon.cols() == 0) throw ValidationError("feature_center_loss: empty batch");
    if (fea_real.rows() != fea_recon.rows()) throw ValidationError("feature_center_loss: dimension mismatch");
    return static_cast<double>((feature_center(fea_real) - feature_center(fea_recon)).norm());
}

/// Batch mean of ||z - z_aug||^2 (columns are samples).
template <class S>
double contrastive_latent(const Mat<S>& z, const Mat<S>& z_aug) {
    if (z.rows() != z_aug.rows() || z.cols() != z_aug.cols() || z.cols() == 0)
        throw ValidationError("contrastive_latent: shape mismatch");
    return static_cast<double>((z - z_aug).squaredNorm()) / static_cast<double>(z.cols());
}

/// Batch mean of ||x~ - x~_aug||^2 summed over every timestep and feature.
template <class S>
double contrastive_recon(const Sequence<S>& x, const Sequence<S>& x_aug) {
    if (x.size() != x_aug.size() || x.empty()) throw ValidationError("contrastive_recon: shape mismatch");
    double s = 0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (x[t].rows() != x_aug[t].rows() || x[t].cols() != x_aug[t].cols())
            throw ValidationError("contrastive_recon: shape mismatch");
        s += static_cast<double>((x[t] - x_aug[t]).squaredNorm());
    }
    return s / static_cast<double>(x.front().cols());
}

/// mean_b -[ln D(x_k) + ln(1 - D(x~_g)) + ln(1 - D(x_f))]. An empty
/// `prob_recon` drops that term (training without an encoder).
template <class S>
double disc_objective(const Mat<S>& prob_real, const Mat<S>& prob_recon, const Mat<S>& prob_fake, S eps) {
    const Index b = prob_real.size();
    if (b == 0 || prob_fake.size() != b || (prob_recon.size() != 0 && prob_recon.size() != b))
        throw ValidationError("disc_objective: batches must be nonempty and equal-sized");
    double s = 0;
    for (Index i = 0; i < b; ++i) {
        s += static_cast<double>(neg_log_prob(prob_real.data()[i], eps));
        s += static_cast<double>(neg_log_one_minus(prob_fake.data()[i], eps));
        if (prob_recon.size()) s += static_cast<double>(neg_log_one_minus(prob_recon.data()[i], eps));
    }
    return s / static_cast<double>(b);
}

/// J_gen = adversarial + feature-center (or BCE) + beta * recon contrastive.
inline double gen_objective(double adv_gen, double center_term, double contras_x, double beta, bool contrastive = true,
                            bool adversarial = true) {
    return (adversarial ? adv_gen : 0.0) + center_term + (contrastive ? beta * contras_x : 0.0);
}

/// J_enc = adversarial + KL + alpha * latent contrastive.
inline double enc_objective(double adv_gen, double kl, double contras_z, double alpha, bool contrastive = true) {
    return adv_gen + kl + (contrastive ? alpha * contras_z : 0.0);
}

}  // namespace mtsdvgan::train
