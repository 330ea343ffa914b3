#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtsdvgan/archive.hpp"
#include "mtsdvgan/nn/networks.hpp"
#include "mtsdvgan/rng.hpp"

namespace mtsdvgan::nn {

/// Architecture sizes shared by the three networks.
struct ModelShape {
    Index features = 5;      // d, after PCA
    Index window = 30;       // k
    Index hidden = 100;
    Index depth = 3;
    Index latent = 15;
    Index feature_dim = 100; // size of fea_D
    GeneratorInput generator_input = GeneratorInput::autoregressive;
    bool has_encoder = true;

    void validate() const;
};

std::string to_string(GeneratorInput mode);
GeneratorInput parse_generator_input(const std::string& s);

/// Encoder, generator and discriminator. Without an encoder the encoder
/// params hold no arrays.
template <class S>
struct Model {
    using Scalar = S;
    ModelShape shape;
    EncoderParams<S> encoder;
    GeneratorParams<S> generator;
    DiscriminatorParams<S> discriminator;

    /// All-zero parameters of the given shape.
    static Model zeros(const ModelShape& shape) {
        shape.validate();
        Model m;
        m.shape = shape;
        if (shape.has_encoder) m.encoder = EncoderParams<S>(shape.features, shape.hidden, shape.depth, shape.latent);
        m.generator =
            GeneratorParams<S>(shape.latent, shape.hidden, shape.depth, shape.features, shape.generator_input);
        m.discriminator = DiscriminatorParams<S>(shape.features, shape.hidden, shape.depth, shape.feature_dim);
        return m;
    }

    template <class F>
    void for_each(const std::string& prefix, F&& f) {
        if (shape.has_encoder) encoder.for_each(prefix + "encoder", f);
        generator.for_each(prefix + "generator", f);
        discriminator.for_each(prefix + "discriminator", f);
    }
    template <class F>
    void for_each(const std::string& prefix, F&& f) const {
        if (shape.has_encoder) encoder.for_each(prefix + "encoder", f);
        generator.for_each(prefix + "generator", f);
        discriminator.for_each(prefix + "discriminator", f);
    }
};

/// Fills `out` from N(0, std) with redraws until |v| <= 2 std.
void init_truncated_normal(std::span<double> out, double stddev, std::uint64_t seed);

/// Every weight matrix drawn by init_truncated_normal (one derived seed per
/// array); biases zero.
template <class S>
Model<S> init_model(const ModelShape& shape, double stddev, std::uint64_t seed) {
    auto m = Model<S>::zeros(shape);
    std::uint64_t idx = 0;
    m.for_each("", [&](const std::string& name, auto& t) {
        ++idx;
        if (name.size() >= 2 && name.compare(name.size() - 2, 2, ".b") == 0) return;
        std::vector<double> buf(static_cast<std::size_t>(t.size()));
        init_truncated_normal(buf, stddev, derive_seed(seed, Stream::init, {idx}));
        for (Index i = 0; i < t.size(); ++i) t.data()[i] = static_cast<S>(buf[static_cast<std::size_t>(i)]);
    });
    return m;
}

/// Same structure, all arrays zero (gradient or optimizer accumulators).
template <class P>
P zeros_like_params(const P& p) {
    P out = p;
    out.for_each("", [](const std::string&, auto& t) { t.setZero(); });
    return out;
}

template <class T, class S>
Model<T> cast_model(const Model<S>& m) {
    auto out = Model<T>::zeros(m.shape);
    auto src = flat_views(m);
    auto dst = flat_views(out);
    for (std::size_t i = 0; i < src.size(); ++i)
        for (std::size_t j = 0; j < src[i].values.size(); ++j) dst[i].values[j] = static_cast<T>(src[i].values[j]);
    return out;
}

/// Window list (each k x d) to a batched sequence (k entries of d x B).
template <class S>
Sequence<S> to_sequence(const std::vector<Eigen::MatrixXd>& windows) {
    if (windows.empty()) throw ValidationError("empty batch");
    const Index k = windows.front().rows(), d = windows.front().cols();
    const Index b = static_cast<Index>(windows.size());
    Sequence<S> seq(static_cast<std::size_t>(k), Mat<S>(d, b));
    for (Index j = 0; j < b; ++j) {
        const auto& w = windows[static_cast<std::size_t>(j)];
        if (w.rows() != k || w.cols() != d) throw ValidationError("windows in a batch must share a shape");
        for (Index t = 0; t < k; ++t) seq[static_cast<std::size_t>(t)].col(j) = w.row(t).transpose().cast<S>();
    }
    return seq;
}

template <class S>
std::vector<Eigen::MatrixXd> from_sequence(const Sequence<S>& seq) {
    if (seq.empty()) return {};
    const Index k = static_cast<Index>(seq.size()), d = seq.front().rows(), b = seq.front().cols();
    std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(b), Eigen::MatrixXd(k, d));
    for (Index j = 0; j < b; ++j)
        for (Index t = 0; t < k; ++t)
            out[static_cast<std::size_t>(j)].row(t) = seq[static_cast<std::size_t>(t)].col(j).transpose().template cast<double>();
    return out;
}

/// Checkpoint archive: LSTM arrays split per gate as
/// `network.lstmL.gate.{W,U,b}`, everything else as `network.head.{W,b}`.
/// `config_text` is stored verbatim under the `train_config` key.
TensorArchive model_to_archive(const Model<float>& model, const std::string& config_text,
                               const std::vector<std::pair<std::string, std::string>>& extra_meta = {});
Model<float> model_from_archive(const TensorArchive& archive);

}  // namespace mtsdvgan::nn
