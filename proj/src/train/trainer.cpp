#include "mtsdvgan/train/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "mtsdvgan/config.hpp"
#include "mtsdvgan/error.hpp"
#include "mtsdvgan/rng.hpp"

namespace mtsdvgan::train {

Optimizers::Optimizers(const nn::Model<float>& m, double rho, double epsilon)
    : encoder(m.encoder, rho, epsilon), generator(m.generator, rho, epsilon), discriminator(m.discriminator, rho, epsilon) {}

void apply_step(nn::Model<float>& model, Optimizers& opt, const nn::Model<float>& grad, double lr) {
    opt.discriminator.step(model.discriminator, grad.discriminator, lr);
    opt.generator.step(model.generator, grad.generator, lr);
    if (model.shape.has_encoder) opt.encoder.step(model.encoder, grad.encoder, lr);
}

LossBundle train_step(nn::Model<float>& model, Optimizers& opt, const std::vector<Eigen::MatrixXd>& batch,
                      const TrainConfig& config, std::uint64_t epoch, std::uint64_t step) {
    const auto x = nn::to_sequence<float>(batch);
    const auto noise = make_step_noise<float>(model.shape, batch, config, epoch, step);
    auto r = compute_step<float>(model, x, noise, StepOptions::from(config));
    apply_step(model, opt, r.grad, config.learning_rate);
    return r.losses;
}

LossBundle mean_bundle(const std::vector<LossBundle>& steps) {
    LossBundle m;
    if (steps.empty()) return m;
    const double n = static_cast<double>(steps.size());
    double gc = 0;
    bool has_gc = true;
    m = LossBundle{0, 0, 0.0, 0, 0, 0, 0, 0};
    for (const auto& s : steps) {
        m.kl += s.kl / n;
        m.adv_gen += s.adv_gen / n;
        m.contras_z += s.contras_z / n;
        m.contras_x += s.contras_x / n;
        m.j_enc += s.j_enc / n;
        m.j_gen += s.j_gen / n;
        m.j_disc += s.j_disc / n;
        if (s.l_gc) gc += *s.l_gc / n;
        else has_gc = false;
    }
    if (has_gc) m.l_gc = gc;
    else m.l_gc.reset();
    return m;
}

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::int64_t epoch) {
    char name[64];
    std::snprintf(name, sizeof(name), "checkpoint_epoch_%04lld.mtsd", static_cast<long long>(epoch));
    return dir / name;
}

TrainResult train(const data::WindowSet& data, const TrainConfig& config, const TrainOptions& options) {
    config.validate();
    if (data.empty()) throw EmptyWindowSet("train: empty window set");
    if (data.window_length != config.window_size)
        throw ValidationError("train: windows have length " + std::to_string(data.window_length) +
                              " but window_size is " + std::to_string(config.window_size));
    const auto shape = config.model_shape(data.feature_dim());
    TrainResult result{nn::init_model<float>(shape, config.init_std, config.seed), {}};
    Optimizers opt(result.model, config.rmsprop_rho, config.rmsprop_epsilon);
    if (options.checkpoint_dir) std::filesystem::create_directories(*options.checkpoint_dir);

    const std::size_t w = data.size();
    const auto bs = static_cast<std::size_t>(config.batch_size);
    const std::string config_text = config.to_text();
    std::vector<std::size_t> order(w);
    for (std::int64_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(config.seed, Stream::shuffle, {static_cast<std::uint64_t>(epoch)}));
        for (std::size_t i = w; i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(i - 1)));
            std::swap(order[i - 1], order[j]);
        }
        std::vector<LossBundle> steps;
        std::uint64_t step = 0;
        for (std::size_t b = 0; b < w; b += bs, ++step) {
            std::vector<Eigen::MatrixXd> batch;
            for (std::size_t i = b; i < std::min(w, b + bs); ++i) batch.push_back(data.windows[order[i]]);
            steps.push_back(train_step(result.model, opt, batch, config, static_cast<std::uint64_t>(epoch), step));
        }
        result.history.epochs.push_back(mean_bundle(steps));
        if (options.checkpoint_dir) {
            auto meta = options.checkpoint_meta;
            meta.emplace_back("epoch", std::to_string(epoch));
            const auto path = checkpoint_path(*options.checkpoint_dir, epoch);
            nn::model_to_archive(result.model, config_text, meta).save(path);
            result.history.checkpoints.push_back(path);
        }
        if (options.on_epoch) options.on_epoch(epoch, result.model, result.history.epochs.back());
    }
    return result;
}

void write_history_csv(const std::filesystem::path& path, const TrainHistory& history) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    auto f = [](double v) { return format_double(v); };
    out << "epoch,kl,adv_gen,l_gc,contras_z,contras_x,j_enc,j_gen,j_disc\n";
    for (std::size_t i = 0; i < history.epochs.size(); ++i) {
        const auto& e = history.epochs[i];
        out << (i + 1) << ',' << f(e.kl) << ',' << f(e.adv_gen) << ',' << (e.l_gc ? f(*e.l_gc) : "") << ','
            << f(e.contras_z) << ',' << f(e.contras_x) << ',' << f(e.j_enc) << ',' << f(e.j_gen) << ','
            << f(e.j_disc) << '\n';
    }
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace mtsdvgan::train
