#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mtsdvgan/data/windows.hpp"
#include "mtsdvgan/error.hpp"
#include "mtsdvgan/nn/model.hpp"
#include "mtsdvgan/rng.hpp"
#include "mtsdvgan/train/losses.hpp"
#include "mtsdvgan/train/train_config.hpp"

namespace mtsdvgan::train {

/// Loss weights and toggles consumed by one training step.
struct StepOptions {
    double alpha = 0.1;
    double beta = 0.05;
    double prob_clamp = 1e-6;
    bool contrastive = true;
    bool gen_adversarial = true;
    bool bce_generator = false;

    static StepOptions from(const TrainConfig& c) {
        StepOptions o;
        o.alpha = c.alpha;
        o.beta = c.beta;
        o.prob_clamp = c.prob_clamp;
        o.contrastive = !c.no_contrastive;
        o.gen_adversarial = c.gen_adversarial;
        o.bce_generator = c.bce_generator;
        return o;
    }
};

/// Every random draw a step consumes: the reparameterization noise (shared by
/// both branches), the noise latents for x_f and the augmented batch.
template <class S>
struct StepNoise {
    Mat<S> eps;        // latent x B
    Mat<S> z_fake;     // latent x B
    Sequence<S> x_aug; // k entries of d x B; empty without an encoder
};

template <class S>
StepNoise<S> make_step_noise(const nn::ModelShape& shape, const std::vector<Eigen::MatrixXd>& batch,
                             const TrainConfig& c, std::uint64_t epoch, std::uint64_t step) {
    const Index b = static_cast<Index>(batch.size());
    StepNoise<S> n;
    auto fill = [&](Mat<S>& m, std::uint64_t seed) {
        Rng rng(seed);
        m.resize(shape.latent, b);
        for (Index j = 0; j < b; ++j)
            for (Index i = 0; i < shape.latent; ++i) m(i, j) = static_cast<S>(rng.normal());
    };
    fill(n.eps, derive_seed(c.seed, Stream::reparam, {epoch, step}));
    fill(n.z_fake, derive_seed(c.seed, Stream::noise_latent, {epoch, step}));
    if (shape.has_encoder)
        n.x_aug = nn::to_sequence<S>(data::jitter_scale(batch, c.sigma_jitter, c.sigma_scale,
                                                        derive_seed(c.seed, Stream::augment, {epoch, step})));
    return n;
}

template <class S>
struct StepResult {
    LossBundle losses;
    nn::Model<S> grad;   // gradients of J_enc (encoder), J_gen (generator), J_disc (discriminator)
};

namespace detail {

inline void require_finite(double v, const char* term) {
    if (!std::isfinite(v)) throw NumericError(std::string("training step: non-finite ") + term);
}

template <class P>
void require_finite_params(const P& p, const char* network) {
    for (const auto& v : nn::flat_views(p))
        for (auto x : v.values)
            if (!std::isfinite(static_cast<double>(x)))
                throw NumericError(std::string("training step: non-finite gradient in ") + network + " ('" + v.name +
                                   "')");
}

}  // namespace detail

/// Forwards and all three gradients of one step, evaluated at the current
/// parameters. The discriminator is held constant in the generator and
/// encoder gradients; the generator is held constant in the encoder gradient.
template <class S>
StepResult<S> compute_step(const nn::Model<S>& m, const Sequence<S>& x, const StepNoise<S>& noise,
                           const StepOptions& opt) {
    if (x.empty()) throw ValidationError("training step: empty batch");
    const Index batch = x.front().cols();
    const Index k = static_cast<Index>(x.size());
    const S eps_p = static_cast<S>(opt.prob_clamp);
    const S inv_b = S(1) / static_cast<S>(batch);
    const bool has_enc = m.shape.has_encoder;
    const bool contrastive = opt.contrastive && has_enc;

    StepResult<S> r{LossBundle{}, nn::zeros_like_params(m)};
    LossBundle& L = r.losses;

    // Forward passes.
    nn::EncoderCache<S> ec, eca;
    nn::EncoderOutput<S> eo, eoa;
    Mat<S> z, z_aug;
    nn::GeneratorCache<S> gc, gca, gfc;
    Sequence<S> xg, xg_aug;
    if (has_enc) {
        if (noise.x_aug.size() != x.size()) throw ValidationError("training step: augmented batch missing");
        eo = nn::encode(m.encoder, x, &ec);
        eoa = nn::encode(m.encoder, noise.x_aug, &eca);
        z = nn::reparameterize(eo.mu, eo.logvar, noise.eps);
        z_aug = nn::reparameterize(eoa.mu, eoa.logvar, noise.eps);
        xg = nn::generate(m.generator, z, k, &gc);
        xg_aug = nn::generate(m.generator, z_aug, k, &gca);
    }
    const Sequence<S> xf = nn::generate(m.generator, noise.z_fake, k, &gfc);

    nn::DiscriminatorCache<S> dcr, dcg, dcf;
    const auto dr = nn::discriminate_raw(m.discriminator, x, &dcr);
    nn::DiscriminatorOutput<S> dg;
    if (has_enc) dg = nn::discriminate_raw(m.discriminator, xg, &dcg);
    const auto df = nn::discriminate_raw(m.discriminator, xf, &dcf);

    // The generator's target batch: reconstructions, or noise fakes without an encoder.
    const auto& dt = has_enc ? dg : df;
    const auto& dct = has_enc ? dcg : dcf;
    const auto& gct = has_enc ? gc : gfc;

    // Losses.
    L.j_disc = disc_objective<S>(dr.prob, has_enc ? dg.prob : Mat<S>(), df.prob, eps_p);
    L.adv_gen = adversarial_gen_term<S>(dt.prob, eps_p);
    double center_term = 0;
    if (opt.bce_generator) {
        L.l_gc.reset();
        center_term = L.adv_gen;
    } else {
        L.l_gc = feature_center_loss<S>(dr.fea, dt.fea);
        center_term = *L.l_gc;
    }
    if (has_enc) {
        L.kl = kl_gauss_std<S>(eo.mu, eo.logvar);
        if (contrastive) {
            L.contras_z = contrastive_latent<S>(z, z_aug);
            L.contras_x = contrastive_recon<S>(xg, xg_aug);
        }
        L.j_enc = enc_objective(L.adv_gen, L.kl, L.contras_z, opt.alpha, contrastive);
    }
    L.j_gen = gen_objective(L.adv_gen, center_term, L.contras_x, opt.beta, contrastive, opt.gen_adversarial);
    detail::require_finite(L.j_disc, "j_disc");
    detail::require_finite(L.adv_gen, "adv_gen");
    if (L.l_gc) detail::require_finite(*L.l_gc, "l_gc");
    detail::require_finite(L.kl, "kl");
    detail::require_finite(L.contras_z, "contras_z");
    detail::require_finite(L.contras_x, "contras_x");
    detail::require_finite(L.j_enc, "j_enc");
    detail::require_finite(L.j_gen, "j_gen");

    auto dlogit_of = [&](const Mat<S>& prob, auto f, S scale) {
        Mat<S> d(1, prob.cols());
        for (Index j = 0; j < prob.cols(); ++j) d(0, j) = scale * f(prob(0, j), eps_p) * inv_b;
        return d;
    };
    const auto d_real = [](S p, S e) { return neg_log_prob_dlogit(p, e); };
    const auto d_fake = [](S p, S e) { return neg_log_one_minus_dlogit(p, e); };

    // Discriminator (xi).
    {
        auto* g = &r.grad.discriminator;
        nn::discriminate_backward<S>(m.discriminator, dcr, dr, dlogit_of(dr.prob, d_real, S(1)), Mat<S>(), g, false);
        if (has_enc)
            nn::discriminate_backward<S>(m.discriminator, dcg, dg, dlogit_of(dg.prob, d_fake, S(1)), Mat<S>(), g, false);
        nn::discriminate_backward<S>(m.discriminator, dcf, df, dlogit_of(df.prob, d_fake, S(1)), Mat<S>(), g, false);
    }

    // Generator (phi).
    {
        const S adv_weight = static_cast<S>((opt.gen_adversarial ? 1 : 0) + (opt.bce_generator ? 1 : 0));
        Mat<S> dfea;
        if (!opt.bce_generator && *L.l_gc > 0) {
            const Vec<S> diff = feature_center(dr.fea) - feature_center(dt.fea);
            const S norm = static_cast<S>(*L.l_gc);
            dfea = (-diff / norm * inv_b).replicate(1, batch);
        } else if (!opt.bce_generator) {
            dfea = Mat<S>::Zero(dt.fea.rows(), batch);
        }
        Sequence<S> dx = nn::discriminate_backward<S>(m.discriminator, dct, dt, dlogit_of(dt.prob, d_real, adv_weight),
                                                   dfea, nullptr, true);
        if (contrastive) {
            Sequence<S> daug(static_cast<std::size_t>(k));
            const S w = S(2) * static_cast<S>(opt.beta) * inv_b;
            for (std::size_t t = 0; t < xg.size(); ++t) {
                const Mat<S> diff = xg[t] - xg_aug[t];
                dx[t] += w * diff;
                daug[t] = -w * diff;
            }
            nn::generate_backward<S>(m.generator, gca, daug, &r.grad.generator);
        }
        nn::generate_backward<S>(m.generator, gct, dx, &r.grad.generator);
    }

    // Encoder (theta).
    if (has_enc) {
        const Sequence<S> dx =
            nn::discriminate_backward<S>(m.discriminator, dcg, dg, dlogit_of(dg.prob, d_real, S(1)), Mat<S>(), nullptr, true);
        Mat<S> dz = nn::generate_backward<S>(m.generator, gc, dx, nullptr);
        Mat<S> dz_aug = Mat<S>::Zero(z.rows(), batch);
        if (contrastive) {
            const Mat<S> w = (S(2) * static_cast<S>(opt.alpha) * inv_b) * (z - z_aug);
            dz += w;
            dz_aug = -w;
        }
        const auto half_sigma = [](const Mat<S>& lv) { return (lv.array() * S(0.5)).exp() * S(0.5); };
        Mat<S> dmu = dz + eo.mu * inv_b;
        Mat<S> dlv = (dz.array() * noise.eps.array() * half_sigma(eo.logvar)).matrix() +
                     ((eo.logvar.array().exp() - S(1)) * (S(0.5) * inv_b)).matrix();
        nn::encode_backward(m.encoder, ec, dmu, dlv, r.grad.encoder);
        if (contrastive) {
            Mat<S> dlv_a = (dz_aug.array() * noise.eps.array() * half_sigma(eoa.logvar)).matrix();
            nn::encode_backward(m.encoder, eca, dz_aug, dlv_a, r.grad.encoder);
        }
        detail::require_finite_params(r.grad.encoder, "encoder");
    }
    detail::require_finite_params(r.grad.generator, "generator");
    detail::require_finite_params(r.grad.discriminator, "discriminator");
    return r;
}

}  // namespace mtsdvgan::train
