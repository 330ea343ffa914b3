#include "mtsdvgan/eval/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "mtsdvgan/error.hpp"

namespace mtsdvgan::eval {

double recon_loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_recon) {
    if (x.rows() != x_recon.rows() || x.cols() != x_recon.cols()) throw ValidationError("recon_loss: shape mismatch");
    if (x.size() == 0) throw ValidationError("recon_loss: empty window");
    return (x - x_recon).squaredNorm() / static_cast<double>(x.size());
}

double disc_score(double prob, double prob_clamp) { return 1.0 - std::clamp(prob, prob_clamp, 1.0 - prob_clamp); }

namespace {

// Per-column mean squared error between two sequences.
Eigen::VectorXd column_mse(const nn::Sequence<float>& a, const nn::Sequence<float>& b) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(a.front().cols());
    for (std::size_t t = 0; t < a.size(); ++t)
        s += (a[t] - b[t]).cast<double>().array().square().colwise().sum().matrix().transpose();
    return s / static_cast<double>(a.size() * static_cast<std::size_t>(a.front().rows()));
}

}  // namespace

nn::Mat<float> invert_latent(const nn::GeneratorParams<float>& gen, const nn::Sequence<float>& x,
                             std::int64_t steps, double lr) {
    const auto batch = x.front().cols();
    const auto k = static_cast<nn::Index>(x.size());
    const float scale = 2.0f / static_cast<float>(x.size() * static_cast<std::size_t>(x.front().rows()));
    nn::Mat<float> z = nn::Mat<float>::Zero(gen.latent(), batch);
    nn::Mat<float> acc = nn::Mat<float>::Zero(gen.latent(), batch);
    for (std::int64_t s = 0; s < steps; ++s) {
        nn::GeneratorCache<float> cache;
        const auto xr = nn::generate(gen, z, k, &cache);
        nn::Sequence<float> dout(x.size());
        for (std::size_t t = 0; t < x.size(); ++t) dout[t] = scale * (xr[t] - x[t]);
        const nn::Mat<float> dz = nn::generate_backward<float>(gen, cache, dout, nullptr);
        if (!dz.allFinite()) throw NumericError("latent inversion: non-finite gradient");
        acc = 0.9f * acc + 0.1f * dz.cwiseProduct(dz);
        z.array() -= static_cast<float>(lr) * dz.array() / (acc.array() + 1e-8f).sqrt();
    }
    return z;
}

RawScores score_windows(const nn::Model<float>& model, const data::WindowSet& windows, const ScoringOptions& options) {
    if (windows.empty()) throw EmptyWindowSet("score_windows: empty window set");
    if (windows.feature_dim() != model.shape.features || windows.window_length != model.shape.window)
        throw ValidationError("score_windows: windows are " + std::to_string(windows.window_length) + "x" +
                              std::to_string(windows.feature_dim()) + " but the model expects " +
                              std::to_string(model.shape.window) + "x" + std::to_string(model.shape.features));
    RawScores out;
    out.l_r.reserve(windows.size());
    out.l_d.reserve(windows.size());
    const std::size_t chunk = std::max<std::size_t>(1, options.chunk);
    for (std::size_t b = 0; b < windows.size(); b += chunk) {
        const std::vector<Eigen::MatrixXd> part(windows.windows.begin() + static_cast<std::ptrdiff_t>(b),
                                                windows.windows.begin() +
                                                    static_cast<std::ptrdiff_t>(std::min(windows.size(), b + chunk)));
        const auto x = nn::to_sequence<float>(part);
        nn::Mat<float> z;
        if (model.shape.has_encoder)
            z = nn::encode(model.encoder, x).mu;
        else
            z = invert_latent(model.generator, x, options.inversion_steps, options.inversion_lr);
        const auto xr = nn::generate(model.generator, z, model.shape.window);
        const Eigen::VectorXd mse = column_mse(x, xr);
        const auto d = nn::discriminate_raw(model.discriminator, x);
        for (nn::Index j = 0; j < mse.size(); ++j) {
            if (!std::isfinite(mse(j)) || !std::isfinite(d.prob(0, j)))
                throw NumericError("score_windows: non-finite score for window " + std::to_string(b + j));
            out.l_r.push_back(mse(j));
            out.l_d.push_back(disc_score(static_cast<double>(d.prob(0, j)), options.prob_clamp));
        }
    }
    return out;
}

std::vector<double> normalize_scores(const std::vector<double>& reference, const std::vector<double>& target,
                                     const std::string& channel) {
    if (reference.empty()) throw ValidationError("normalize_scores(" + channel + "): empty reference");
    const auto [lo_it, hi_it] = std::minmax_element(reference.begin(), reference.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo))
        throw ValidationError("normalize_scores(" + channel + "): reference scores are constant, cannot rescale");
    std::vector<double> out(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) out[i] = std::clamp((target[i] - lo) / (hi - lo), 0.0, 1.0);
    return out;
}

double rd_score(double l_d, double l_r, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("rd_score: lambda must lie in [0, 1]");
    return lambda * l_d + (1.0 - lambda) * l_r;
}

std::vector<double> rd_score(const std::vector<double>& l_d, const std::vector<double>& l_r, double lambda) {
    if (l_d.size() != l_r.size()) throw ValidationError("rd_score: channel lengths differ");
    std::vector<double> out(l_d.size());
    for (std::size_t i = 0; i < l_d.size(); ++i) out[i] = rd_score(l_d[i], l_r[i], lambda);
    return out;
}

}  // namespace mtsdvgan::eval
