#include "mtsdvgan/train/train_config.hpp"

#include <sstream>

#include "mtsdvgan/error.hpp"

namespace mtsdvgan::train {

Preset parse_preset(const std::string& s) {
    if (s == "swat") return Preset::swat;
    if (s == "wadi") return Preset::wadi;
    if (s == "nsl_kdd") return Preset::nsl_kdd;
    throw ValidationError("config key 'preset': unknown preset '" + s + "' (swat, wadi, nsl_kdd)");
}

std::string to_string(Preset p) {
    switch (p) {
        case Preset::swat: return "swat";
        case Preset::wadi: return "wadi";
        case Preset::nsl_kdd: return "nsl_kdd";
    }
    return "?";
}

void TrainConfig::apply_preset(Preset p) {
    preset = p;
    switch (p) {
        case Preset::nsl_kdd:
            learning_rate = 1e-5;
            batch_size = 100;
            signal_number = 12;
            break;
        case Preset::swat:
            learning_rate = 5e-5;
            batch_size = 100;
            signal_number = 5;
            break;
        case Preset::wadi:
            learning_rate = 1e-4;
            batch_size = 1000;
            signal_number = 8;
            break;
    }
    window_size = 30;
    latent_dimension = 15;
}

void TrainConfig::validate() const {
    auto fail = [](const std::string& key, const std::string& why) {
        throw ValidationError("config key '" + key + "': " + why);
    };
    if (!(learning_rate > 0)) fail("learning_rate", "must be > 0");
    if (epochs < 1) fail("epochs", "must be >= 1");
    if (batch_size < 1) fail("batch_size", "must be >= 1");
    if (window_size < 1) fail("window_size", "must be >= 1");
    if (shift < 1) fail("shift", "must be >= 1");
    if (latent_dimension < 1) fail("latent_dimension", "must be >= 1");
    if (signal_number < 1) fail("signal_number", "must be >= 1");
    if (hidden_units < 1) fail("hidden_units", "must be >= 1");
    if (depth < 1) fail("depth", "must be >= 1");
    if (feature_dim < 1) fail("feature_dim", "must be >= 1");
    if (!(alpha >= 0)) fail("alpha", "must be >= 0");
    if (!(beta >= 0)) fail("beta", "must be >= 0");
    if (!(prob_clamp > 0 && prob_clamp < 0.5)) fail("prob_clamp", "must lie in (0, 0.5)");
    if (!(init_std > 0)) fail("init_std", "must be > 0");
    if (!(rmsprop_rho > 0 && rmsprop_rho < 1)) fail("rmsprop_rho", "must lie in (0, 1)");
    if (!(rmsprop_epsilon > 0)) fail("rmsprop_epsilon", "must be > 0");
    if (!(sigma_jitter >= 0)) fail("sigma_jitter", "must be >= 0");
    if (!(sigma_scale >= 0)) fail("sigma_scale", "must be >= 0");
    if (!(validation_fraction >= 0 && validation_fraction < 1)) fail("validation_fraction", "must lie in [0, 1)");
    if (inversion_steps < 1) fail("inversion_steps", "must be >= 1");
    if (!(inversion_lr > 0)) fail("inversion_lr", "must be > 0");
}

nn::ModelShape TrainConfig::model_shape(std::int64_t features) const {
    nn::ModelShape s;
    s.features = features;
    s.window = window_size;
    s.hidden = hidden_units;
    s.depth = depth;
    s.latent = latent_dimension;
    s.feature_dim = feature_dim;
    s.generator_input = generator_input;
    s.has_encoder = !no_encoder;
    return s;
}

const std::set<std::string>& TrainConfig::known_keys() {
    static const std::set<std::string> keys = {
        "preset",        "learning_rate",   "window_size",     "latent_dimension", "batch_size",
        "signal_number", "epochs",          "shift",           "hidden_units",     "depth",
        "feature_dim",   "alpha",           "beta",            "seed",             "prob_clamp",
        "init_std",      "rmsprop_rho",     "rmsprop_epsilon", "sigma_jitter",     "sigma_scale",
        "generator_input", "gen_adversarial", "no_contrastive", "no_encoder",      "bce_generator",
        "validation_fraction", "inversion_steps", "inversion_lr",
    };
    return keys;
}

TrainConfig TrainConfig::from_key_values(const KeyValues& kv) {
    TrainConfig c;
    if (kv.has("preset")) c.apply_preset(parse_preset(kv.get_string("preset", "swat")));
    c.learning_rate = kv.get_double("learning_rate", c.learning_rate);
    c.window_size = kv.get_int("window_size", c.window_size);
    c.latent_dimension = kv.get_int("latent_dimension", c.latent_dimension);
    c.batch_size = kv.get_int("batch_size", c.batch_size);
    c.signal_number = kv.get_int("signal_number", c.signal_number);
    c.epochs = kv.get_int("epochs", c.epochs);
    c.shift = kv.get_int("shift", c.shift);
    c.hidden_units = kv.get_int("hidden_units", c.hidden_units);
    c.depth = kv.get_int("depth", c.depth);
    c.feature_dim = kv.get_int("feature_dim", c.feature_dim);
    c.alpha = kv.get_double("alpha", c.alpha);
    c.beta = kv.get_double("beta", c.beta);
    const auto seed = kv.get_int("seed", 0);
    if (seed < 0) throw ValidationError("config key 'seed': must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
    c.prob_clamp = kv.get_double("prob_clamp", c.prob_clamp);
    c.init_std = kv.get_double("init_std", c.init_std);
    c.rmsprop_rho = kv.get_double("rmsprop_rho", c.rmsprop_rho);
    c.rmsprop_epsilon = kv.get_double("rmsprop_epsilon", c.rmsprop_epsilon);
    c.sigma_jitter = kv.get_double("sigma_jitter", c.sigma_jitter);
    c.sigma_scale = kv.get_double("sigma_scale", c.sigma_scale);
    c.generator_input = nn::parse_generator_input(kv.get_string("generator_input", to_string(c.generator_input)));
    c.gen_adversarial = kv.get_bool("gen_adversarial", c.gen_adversarial);
    c.no_contrastive = kv.get_bool("no_contrastive", c.no_contrastive);
    c.no_encoder = kv.get_bool("no_encoder", c.no_encoder);
    c.bce_generator = kv.get_bool("bce_generator", c.bce_generator);
    c.validation_fraction = kv.get_double("validation_fraction", c.validation_fraction);
    c.inversion_steps = kv.get_int("inversion_steps", c.inversion_steps);
    c.inversion_lr = kv.get_double("inversion_lr", c.inversion_lr);
    c.validate();
    return c;
}

std::string TrainConfig::to_text() const {
    std::ostringstream o;
    auto b = [](bool v) { return v ? "true" : "false"; };
    o << "preset = " << to_string(preset) << '\n'
      << "learning_rate = " << format_double(learning_rate) << '\n'
      << "window_size = " << window_size << '\n'
      << "latent_dimension = " << latent_dimension << '\n'
      << "batch_size = " << batch_size << '\n'
      << "signal_number = " << signal_number << '\n'
      << "epochs = " << epochs << '\n'
      << "shift = " << shift << '\n'
      << "hidden_units = " << hidden_units << '\n'
      << "depth = " << depth << '\n'
      << "feature_dim = " << feature_dim << '\n'
      << "alpha = " << format_double(alpha) << '\n'
      << "beta = " << format_double(beta) << '\n'
      << "seed = " << seed << '\n'
      << "prob_clamp = " << format_double(prob_clamp) << '\n'
      << "init_std = " << format_double(init_std) << '\n'
      << "rmsprop_rho = " << format_double(rmsprop_rho) << '\n'
      << "rmsprop_epsilon = " << format_double(rmsprop_epsilon) << '\n'
      << "sigma_jitter = " << format_double(sigma_jitter) << '\n'
      << "sigma_scale = " << format_double(sigma_scale) << '\n'
      << "generator_input = " << nn::to_string(generator_input) << '\n'
      << "gen_adversarial = " << b(gen_adversarial) << '\n'
      << "no_contrastive = " << b(no_contrastive) << '\n'
      << "no_encoder = " << b(no_encoder) << '\n'
      << "bce_generator = " << b(bce_generator) << '\n'
      << "validation_fraction = " << format_double(validation_fraction) << '\n'
      << "inversion_steps = " << inversion_steps << '\n'
      << "inversion_lr = " << format_double(inversion_lr) << '\n';
    return o.str();
}

}  // namespace mtsdvgan::train
