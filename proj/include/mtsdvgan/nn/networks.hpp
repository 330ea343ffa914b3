#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "mtsdvgan/nn/lstm.hpp"

namespace mtsdvgan::nn {

// ---------------------------------------------------------------- encoder

/// LSTM stack over the window; mu and log-variance are affine maps of the
/// final top-layer hidden state.
template <class S>
struct EncoderParams {
    using Scalar = S;
    StackedLstm<S> lstm;
    Affine<S> mu_head;
    Affine<S> logvar_head;

    EncoderParams() = default;
    EncoderParams(Index features, Index hidden, Index depth, Index latent)
        : lstm(features, hidden, depth), mu_head(hidden, latent), logvar_head(hidden, latent) {}

    Index latent() const noexcept { return mu_head.out_size(); }

    template <class F>
    void for_each(const std::string& prefix, F&& f) {
        lstm.for_each(prefix, f);
        mu_head.for_each(prefix + ".mu_head", f);
        logvar_head.for_each(prefix + ".logvar_head", f);
    }
    template <class F>
    void for_each(const std::string& prefix, F&& f) const {
        lstm.for_each(prefix, f);
        mu_head.for_each(prefix + ".mu_head", f);
        logvar_head.for_each(prefix + ".logvar_head", f);
    }
};

template <class S>
struct EncoderOutput {
    Mat<S> mu;       // latent x B
    Mat<S> logvar;   // latent x B
};

template <class S>
struct EncoderCache {
    StackCache<S> steps;
    Mat<S> last_h;
};

template <class S>
EncoderOutput<S> encode(const EncoderParams<S>& p, const Sequence<S>& x, EncoderCache<S>* cache = nullptr) {
    if (x.empty()) throw ValidationError("encode: empty window");
    const Index batch = x.front().cols();
    auto state = StackState<S>::zeros(p.lstm, batch);
    if (cache) cache->steps.assign(x.size(), {});
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (x[t].rows() != p.lstm.input_size() || x[t].cols() != batch)
            throw ValidationError("encode: window feature dimension mismatch");
        stack_step(p.lstm, x[t], state, cache ? &cache->steps[t] : nullptr);
    }
    const Mat<S>& last = state.h.back();
    EncoderOutput<S> out{p.mu_head(last), p.logvar_head(last)};
    if (cache) cache->last_h = last;
    return out;
}

template <class S>
void encode_backward(const EncoderParams<S>& p, const EncoderCache<S>& cache, const Mat<S>& dmu,
                     const Mat<S>& dlogvar, EncoderParams<S>& grad) {
    Mat<S> dh = p.mu_head.backward(cache.last_h, dmu, &grad.mu_head);
    dh += p.logvar_head.backward(cache.last_h, dlogvar, &grad.logvar_head);
    const Index batch = dmu.cols();
    auto carry = StackCarry<S>::zeros(p.lstm, batch);
    const Mat<S> zero = Mat<S>::Zero(p.lstm.hidden(), batch);
    for (std::size_t t = cache.steps.size(); t-- > 0;) {
        stack_step_backward(p.lstm, cache.steps[t], t + 1 == cache.steps.size() ? dh : zero, carry, &grad.lstm,
                            false);
    }
}

/// z = mu + exp(logvar / 2) * eps.
template <class S>
Mat<S> reparameterize(const Mat<S>& mu, const Mat<S>& logvar, const Mat<S>& eps) {
    if (mu.rows() != logvar.rows() || mu.rows() != eps.rows() || mu.cols() != eps.cols() ||
        mu.cols() != logvar.cols())
        throw ValidationError("reparameterize: shape mismatch");
    return (mu.array() + (logvar.array() * S(0.5)).exp() * eps.array()).matrix();
}

// -------------------------------------------------------------- generator

/// What the generator LSTM receives at each step.
enum class GeneratorInput {
    autoregressive,   // previous step's output; zero at step 1
    latent_repeat,    // z at every step
};

/// latent_to_state maps z to the initial (h, c) of layer 1 (rows [0, H) and
/// [H, 2H)); deeper layers start at zero. output_head maps each top hidden
/// state to one reconstructed timestep.
template <class S>
struct GeneratorParams {
    using Scalar = S;
    Affine<S> latent_to_state;
    StackedLstm<S> lstm;
    Affine<S> output_head;
    GeneratorInput input_mode = GeneratorInput::autoregressive;

    GeneratorParams() = default;
    GeneratorParams(Index latent, Index hidden, Index depth, Index features,
                    GeneratorInput mode = GeneratorInput::autoregressive)
        : latent_to_state(latent, 2 * hidden),
          lstm(mode == GeneratorInput::autoregressive ? features : latent, hidden, depth),
          output_head(hidden, features),
          input_mode(mode) {}

    Index latent() const noexcept { return latent_to_state.in_size(); }
    Index features() const noexcept { return output_head.out_size(); }

    template <class F>
    void for_each(const std::string& prefix, F&& f) {
        latent_to_state.for_each(prefix + ".latent_to_state", f);
        lstm.for_each(prefix, f);
        output_head.for_each(prefix + ".output_head", f);
    }
    template <class F>
    void for_each(const std::string& prefix, F&& f) const {
        latent_to_state.for_each(prefix + ".latent_to_state", f);
        lstm.for_each(prefix, f);
        output_head.for_each(prefix + ".output_head", f);
    }
};

template <class S>
struct GeneratorCache {
    Mat<S> z;
    StackCache<S> steps;
    std::vector<Mat<S>> top_h;
};

template <class S>
Sequence<S> generate(const GeneratorParams<S>& p, const Mat<S>& z, Index steps, GeneratorCache<S>* cache = nullptr) {
    if (z.rows() != p.latent()) throw ValidationError("generate: latent dimension mismatch");
    if (steps < 1) throw ValidationError("generate: steps must be >= 1");
    const Index batch = z.cols();
    const Index hd = p.lstm.hidden();
    auto state = StackState<S>::zeros(p.lstm, batch);
    const Mat<S> init = p.latent_to_state(z);
    state.h[0] = init.topRows(hd);
    state.c[0] = init.bottomRows(hd);

    if (cache) {
        cache->z = z;
        cache->steps.assign(static_cast<std::size_t>(steps), {});
        cache->top_h.assign(static_cast<std::size_t>(steps), {});
    }
    Sequence<S> out;
    out.reserve(static_cast<std::size_t>(steps));
    Mat<S> input = p.input_mode == GeneratorInput::autoregressive ? Mat<S>::Zero(p.features(), batch) : z;
    for (Index t = 0; t < steps; ++t) {
        const auto ti = static_cast<std::size_t>(t);
        const Mat<S>& top = stack_step(p.lstm, input, state, cache ? &cache->steps[ti] : nullptr);
        out.push_back(p.output_head(top));
        if (cache) cache->top_h[ti] = top;
        if (p.input_mode == GeneratorInput::autoregressive) input = out.back();
    }
    return out;
}

/// Returns d(loss)/dz given d(loss)/d(output) at every step.
template <class S>
Mat<S> generate_backward(const GeneratorParams<S>& p, const GeneratorCache<S>& cache, const Sequence<S>& dout,
                         GeneratorParams<S>* grad) {
    const std::size_t steps = cache.steps.size();
    if (dout.size() != steps) throw ValidationError("generate_backward: step count mismatch");
    const Index batch = cache.z.cols();
    const bool autoreg = p.input_mode == GeneratorInput::autoregressive;
    auto carry = StackCarry<S>::zeros(p.lstm, batch);
    Mat<S> dz = Mat<S>::Zero(p.latent(), batch);
    Mat<S> d_next_input;   // gradient on output t flowing back from input t + 1
    for (std::size_t t = steps; t-- > 0;) {
        Mat<S> dy = dout[t];
        if (autoreg && t + 1 < steps) dy += d_next_input;
        const Mat<S> dh_top = p.output_head.backward(cache.top_h[t], dy, grad ? &grad->output_head : nullptr);
        const bool want_dx = !autoreg || t > 0;
        Mat<S> dx = stack_step_backward(p.lstm, cache.steps[t], dh_top, carry, grad ? &grad->lstm : nullptr, want_dx);
        if (autoreg) {
            d_next_input = std::move(dx);
        } else {
            dz += dx;
        }
    }
    Mat<S> dstate(2 * p.lstm.hidden(), batch);
    dstate.topRows(p.lstm.hidden()) = carry.dh[0];
    dstate.bottomRows(p.lstm.hidden()) = carry.dc[0];
    dz += p.latent_to_state.backward(cache.z, dstate, grad ? &grad->latent_to_state : nullptr);
    return dz;
}

// ---------------------------------------------------------- discriminator

/// LSTM stack, then feature_head (output = fea_D, the input of the last
/// fully connected layer), then final_head and the logistic function.
template <class S>
struct DiscriminatorParams {
    using Scalar = S;
    StackedLstm<S> lstm;
    Affine<S> feature_head;
    Affine<S> final_head;

    DiscriminatorParams() = default;
    DiscriminatorParams(Index features, Index hidden, Index depth, Index feature_dim)
        : lstm(features, hidden, depth), feature_head(hidden, feature_dim), final_head(feature_dim, 1) {}

    Index feature_dim() const noexcept { return feature_head.out_size(); }

    template <class F>
    void for_each(const std::string& prefix, F&& f) {
        lstm.for_each(prefix, f);
        feature_head.for_each(prefix + ".feature_head", f);
        final_head.for_each(prefix + ".final_head", f);
    }
    template <class F>
    void for_each(const std::string& prefix, F&& f) const {
        lstm.for_each(prefix, f);
        feature_head.for_each(prefix + ".feature_head", f);
        final_head.for_each(prefix + ".final_head", f);
    }
};

template <class S>
struct DiscriminatorOutput {
    Mat<S> logit;   // 1 x B
    Mat<S> prob;    // 1 x B, unclamped sigmoid(logit)
    Mat<S> fea;     // F x B
};

template <class S>
struct DiscriminatorCache {
    StackCache<S> steps;
    Mat<S> last_h;
};

template <class S>
DiscriminatorOutput<S> discriminate_raw(const DiscriminatorParams<S>& p, const Sequence<S>& x,
                                        DiscriminatorCache<S>* cache = nullptr) {
    if (x.empty()) throw ValidationError("discriminate: empty window");
    const Index batch = x.front().cols();
    auto state = StackState<S>::zeros(p.lstm, batch);
    if (cache) cache->steps.assign(x.size(), {});
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (x[t].rows() != p.lstm.input_size() || x[t].cols() != batch)
            throw ValidationError("discriminate: window feature dimension mismatch");
        stack_step(p.lstm, x[t], state, cache ? &cache->steps[t] : nullptr);
    }
    const Mat<S>& last = state.h.back();
    DiscriminatorOutput<S> out;
    out.fea = p.feature_head(last);
    out.logit = p.final_head(out.fea);
    out.prob = sigmoid(out.logit.array()).matrix();
    if (cache) cache->last_h = last;
    return out;
}

/// Clamps a probability into [eps, 1 - eps].
template <class S>
S clamp_prob(S p, S eps) {
    return std::clamp(p, eps, S(1) - eps);
}

/// Backward given gradients on the logit and on fea_D. Returns
/// d(loss)/d(input) per step when `want_dx`.
template <class S>
Sequence<S> discriminate_backward(const DiscriminatorParams<S>& p, const DiscriminatorCache<S>& cache,
                                  const DiscriminatorOutput<S>& out, const Mat<S>& dlogit, const Mat<S>& dfea,
                                  DiscriminatorParams<S>* grad, bool want_dx) {
    const Index batch = dlogit.cols();
    Mat<S> dfea_total = p.final_head.backward(out.fea, dlogit, grad ? &grad->final_head : nullptr);
    if (dfea.size() > 0) dfea_total += dfea;
    const Mat<S> dh = p.feature_head.backward(cache.last_h, dfea_total, grad ? &grad->feature_head : nullptr);
    auto carry = StackCarry<S>::zeros(p.lstm, batch);
    const Mat<S> zero = Mat<S>::Zero(p.lstm.hidden(), batch);
    Sequence<S> dx(want_dx ? cache.steps.size() : 0);
    for (std::size_t t = cache.steps.size(); t-- > 0;) {
        Mat<S> d = stack_step_backward(p.lstm, cache.steps[t], t + 1 == cache.steps.size() ? dh : zero, carry,
                                       grad ? &grad->lstm : nullptr, want_dx);
        if (want_dx) dx[t] = std::move(d);
    }
    return dx;
}

}  // namespace mtsdvgan::nn
