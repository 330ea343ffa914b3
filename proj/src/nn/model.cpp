#include "mtsdvgan/nn/model.hpp"

#include <cmath>

namespace mtsdvgan::nn {
namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_lstm_array(const std::string& name) {
    return name.find(".lstm") != std::string::npos &&
           (ends_with(name, ".W") || ends_with(name, ".U") || ends_with(name, ".b"));
}

std::string gate_array_name(const std::string& name, int gate) {
    const auto dot = name.rfind('.');
    return name.substr(0, dot) + "." + gate_name(static_cast<Gate>(gate)) + name.substr(dot);
}

}  // namespace

void ModelShape::validate() const {
    if (features < 1 || window < 1 || hidden < 1 || depth < 1 || latent < 1 || feature_dim < 1)
        throw ValidationError("model sizes must all be >= 1");
}

std::string to_string(GeneratorInput mode) {
    return mode == GeneratorInput::autoregressive ? "autoregressive" : "latent_repeat";
}

GeneratorInput parse_generator_input(const std::string& s) {
    if (s == "autoregressive") return GeneratorInput::autoregressive;
    if (s == "latent_repeat") return GeneratorInput::latent_repeat;
    throw ValidationError("generator_input must be autoregressive or latent_repeat, got '" + s + "'");
}

void init_truncated_normal(std::span<double> out, double stddev, std::uint64_t seed) {
    if (!(stddev > 0.0)) throw ValidationError("truncated normal std must be positive");
    Rng rng(seed);
    for (auto& v : out) {
        double x;
        do {
            x = rng.normal() * stddev;
        } while (std::abs(x) > 2.0 * stddev);
        v = x;
    }
}

TensorArchive model_to_archive(const Model<float>& model, const std::string& config_text,
                               const std::vector<std::pair<std::string, std::string>>& extra_meta) {
    TensorArchive a("checkpoint");
    const auto& sh = model.shape;
    a.set_meta("features", std::to_string(sh.features));
    a.set_meta("window", std::to_string(sh.window));
    a.set_meta("hidden", std::to_string(sh.hidden));
    a.set_meta("depth", std::to_string(sh.depth));
    a.set_meta("latent", std::to_string(sh.latent));
    a.set_meta("feature_dim", std::to_string(sh.feature_dim));
    a.set_meta("generator_input", to_string(sh.generator_input));
    a.set_meta("has_encoder", sh.has_encoder ? "1" : "0");
    for (const auto& [k, v] : extra_meta) a.set_meta(k, v);
    a.set_meta("train_config", config_text);

    for (const auto& v : flat_views(model)) {
        // Column-major storage: element (r, c) at r + c * rows.
        auto block = [&](Index r0, Index nr) {
            std::vector<float> out;
            out.reserve(static_cast<std::size_t>(nr * v.cols));
            for (Index r = r0; r < r0 + nr; ++r)
                for (Index c = 0; c < v.cols; ++c) out.push_back(v.values[static_cast<std::size_t>(r + c * v.rows)]);
            return out;
        };
        const bool vec = ends_with(v.name, ".b");
        if (is_lstm_array(v.name)) {
            const Index h = v.rows / 4;
            for (int g = 0; g < 4; ++g) {
                std::vector<std::uint64_t> shape = vec ? std::vector<std::uint64_t>{std::uint64_t(h)}
                                                       : std::vector<std::uint64_t>{std::uint64_t(h), std::uint64_t(v.cols)};
                a.add(gate_array_name(v.name, g), shape, block(g * h, h));
            }
        } else {
            std::vector<std::uint64_t> shape = vec ? std::vector<std::uint64_t>{std::uint64_t(v.rows)}
                                                   : std::vector<std::uint64_t>{std::uint64_t(v.rows), std::uint64_t(v.cols)};
            a.add(v.name, shape, block(0, v.rows));
        }
    }
    return a;
}

Model<float> model_from_archive(const TensorArchive& archive) {
    if (archive.kind() != "checkpoint") throw ValidationError("not a checkpoint archive");
    ModelShape sh;
    sh.features = std::stoll(archive.meta("features"));
    sh.window = std::stoll(archive.meta("window"));
    sh.hidden = std::stoll(archive.meta("hidden"));
    sh.depth = std::stoll(archive.meta("depth"));
    sh.latent = std::stoll(archive.meta("latent"));
    sh.feature_dim = std::stoll(archive.meta("feature_dim"));
    sh.generator_input = parse_generator_input(archive.meta("generator_input"));
    sh.has_encoder = archive.meta("has_encoder") == "1";
    auto model = Model<float>::zeros(sh);

    for (auto& v : flat_views(model)) {
        auto fill = [&](const ArchiveArray& arr, Index r0, Index nr) {
            if (arr.size() != static_cast<std::uint64_t>(nr * v.cols))
                throw ValidationError("array '" + arr.name + "' has the wrong size");
            std::size_t i = 0;
            for (Index r = r0; r < r0 + nr; ++r)
                for (Index c = 0; c < v.cols; ++c) v.values[static_cast<std::size_t>(r + c * v.rows)] = arr.data[i++];
        };
        if (is_lstm_array(v.name)) {
            const Index h = v.rows / 4;
            for (int g = 0; g < 4; ++g) fill(archive.get(gate_array_name(v.name, g)), g * h, h);
        } else {
            fill(archive.get(v.name), 0, v.rows);
        }
    }
    return model;
}

}  // namespace mtsdvgan::nn
