#include "mtsdvgan/cli/commands.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "mtsdvgan/archive.hpp"
#include "mtsdvgan/config.hpp"
#include "mtsdvgan/data/prepare.hpp"
#include "mtsdvgan/data/series.hpp"
#include "mtsdvgan/data/synth.hpp"
#include "mtsdvgan/error.hpp"
#include "mtsdvgan/eval/detect.hpp"
#include "mtsdvgan/eval/stats.hpp"
#include "mtsdvgan/nn/model.hpp"
#include "mtsdvgan/train/trainer.hpp"

namespace mtsdvgan::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kManifestVersion = 1;

KeyValues to_kv(const std::map<std::string, std::string>& m) {
    KeyValues kv;
    for (const auto& [k, v] : m) kv.set(k, v);
    return kv;
}

std::map<std::string, std::string> from_text(const std::string& text) {
    return KeyValues::parse(text).values();
}

const std::string& need(const std::map<std::string, std::string>& m, const std::string& key, const char* what) {
    auto it = m.find(key);
    if (it == m.end() || it->second.empty()) throw ValidationError(std::string("missing ") + what + " '" + key + "'");
    return it->second;
}

std::string get(const std::map<std::string, std::string>& m, const std::string& key, const std::string& fallback = {}) {
    auto it = m.find(key);
    return it == m.end() ? fallback : it->second;
}

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// ---------------------------------------------------------------- synth

const std::set<std::string>& synth_keys() {
    static const std::set<std::string> k{"n_features", "length",    "seed",          "anomaly_kinds",
                                         "anomaly_rate", "noise_std", "train_fraction"};
    return k;
}

struct SynthRequest {
    data::SynthConfig config;
    double train_fraction = 0.5;
};

SynthRequest synth_from_kv(const KeyValues& kv) {
    kv.require_known(synth_keys());
    SynthRequest r;
    auto& c = r.config;
    c.n_features = kv.get_int("n_features", c.n_features);
    c.length = kv.get_int("length", c.length);
    const auto seed = kv.get_int("seed", 0);
    if (seed < 0) throw ValidationError("config key 'seed' must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
    if (kv.has("anomaly_kinds")) {
        c.anomaly_kinds.clear();
        std::stringstream ss(kv.get_string("anomaly_kinds", ""));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item.erase(0, item.find_first_not_of(' '));
            item.erase(item.find_last_not_of(' ') + 1);
            if (!item.empty()) c.anomaly_kinds.insert(data::parse_anomaly_kind(item));
        }
    }
    c.anomaly_rate = kv.get_double("anomaly_rate", c.anomaly_rate);
    c.noise_std = kv.get_double("noise_std", c.noise_std);
    r.train_fraction = kv.get_double("train_fraction", r.train_fraction);
    if (!(r.train_fraction > 0 && r.train_fraction < 1))
        throw ValidationError("config key 'train_fraction' must lie in (0, 1)");
    try {
        c.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("synth config: ") + e.what());
    }
    return r;
}

std::string synth_text(const SynthRequest& r) {
    std::ostringstream o;
    std::string kinds;
    for (auto k : r.config.anomaly_kinds) kinds += (kinds.empty() ? "" : ",") + data::to_string(k);
    o << "n_features = " << r.config.n_features << '\n'
      << "length = " << r.config.length << '\n'
      << "seed = " << r.config.seed << '\n'
      << "anomaly_kinds = " << kinds << '\n'
      << "anomaly_rate = " << format_double(r.config.anomaly_rate) << '\n'
      << "noise_std = " << format_double(r.config.noise_std) << '\n'
      << "train_fraction = " << format_double(r.train_fraction) << '\n';
    return o.str();
}

void run_synth(const Invocation& inv, std::ostream& log) {
    const auto req = synth_from_kv(to_kv(inv.config));
    const auto series = data::synth_generate(req.config);
    const fs::path out = need(inv.outputs, "corpus", "output");
    ensure_parent(out);
    data::save_csv(out, series);
    log << "wrote " << out.string() << " (" << series.length() << " rows, " << series.features() << " features)\n";
    const auto split = static_cast<Eigen::Index>(std::llround(req.train_fraction * static_cast<double>(series.length())));
    if (auto p = get(inv.outputs, "train"); !p.empty()) {
        ensure_parent(p);
        data::save_csv(p, series.slice(0, split));
    }
    if (auto p = get(inv.outputs, "eval"); !p.empty()) {
        ensure_parent(p);
        data::save_csv(p, series.slice(split, series.length()));
    }
}

// ---------------------------------------------------------------- shared

train::TrainConfig train_config_from(const std::map<std::string, std::string>& config) {
    const auto kv = to_kv(config);
    kv.require_known(train::TrainConfig::known_keys());
    return train::TrainConfig::from_key_values(kv);
}

bool csv_has_label_column(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    std::stringstream ss(header);
    std::string col;
    while (std::getline(ss, col, ','))
        if (col == "label") return true;
    return false;
}

data::RawSeries load_series(const fs::path& path) { return data::load_csv(path, csv_has_label_column(path)); }

// ---------------------------------------------------------------- preprocess

void run_preprocess(const Invocation& inv, std::ostream& log) {
    const auto cfg = train_config_from(inv.config);
    const auto train_series = load_series(need(inv.inputs, "train", "input"));
    std::optional<data::RawSeries> eval_series;
    if (auto p = get(inv.inputs, "eval"); !p.empty()) eval_series = load_series(p);
    data::PrepareOptions po;
    po.signal_number = cfg.signal_number;
    po.window_size = cfg.window_size;
    po.shift = cfg.shift;
    po.validation_fraction = cfg.validation_fraction;
    const auto prepared = data::prepare(train_series, eval_series, po);

    const fs::path dir = need(inv.outputs, "dir", "output");
    fs::create_directories(dir);
    prepared.state.to_archive().save(dir / "preprocess.mtsd");
    prepared.train.to_archive().save(dir / "train_windows.mtsd");
    prepared.reference.to_archive().save(dir / "reference_windows.mtsd");
    if (prepared.eval) prepared.eval->to_archive().save(dir / "eval_windows.mtsd");
    log << "train windows " << prepared.train.size() << ", reference windows " << prepared.reference.size();
    if (prepared.eval) log << ", eval windows " << prepared.eval->size();
    log << " (d = " << prepared.train.feature_dim() << ")\n";
}

// ---------------------------------------------------------------- train

void run_train(const Invocation& inv, std::ostream& log) {
    const auto cfg = train_config_from(inv.config);
    const auto windows = data::WindowSet::from_archive(TensorArchive::load(need(inv.inputs, "windows", "input"), "windows"));
    const fs::path dir = need(inv.outputs, "dir", "output");
    fs::create_directories(dir);
    train::TrainOptions opt;
    opt.checkpoint_dir = dir / "checkpoints";
    fs::create_directories(*opt.checkpoint_dir);
    opt.on_epoch = [&](std::int64_t epoch, const nn::Model<float>&, const train::LossBundle& l) {
        log << "epoch " << epoch << "/" << cfg.epochs << "  j_disc " << format_double(l.j_disc) << "  j_gen "
            << format_double(l.j_gen) << "  j_enc " << format_double(l.j_enc) << '\n';
    };
    const auto result = train::train(windows, cfg, opt);
    train::write_history_csv(dir / "history.csv", result.history);
    std::ofstream(dir / "train_config.txt") << cfg.to_text();
}

// ---------------------------------------------------------------- evaluate

std::vector<fs::path> list_checkpoints(const fs::path& dir) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) throw ValidationError("checkpoint directory '" + dir.string() + "' not found");
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".mtsd" &&
            e.path().filename().string().rfind("checkpoint_epoch_", 0) == 0)
            out.push_back(e.path());
    std::sort(out.begin(), out.end());
    if (out.empty()) throw ValidationError("no checkpoints in '" + dir.string() + "'");
    return out;
}

std::optional<double> auto_or_value(const std::string& s, const char* flag) {
    if (s.empty() || s == "auto") return std::nullopt;
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size()) throw ValidationError(std::string("--") + flag + " expects 'auto' or a number, got '" + s + "'");
    return v;
}

void run_evaluate(const Invocation& inv, std::ostream& log, json& results) {
    std::vector<fs::path> candidates;
    if (auto p = get(inv.inputs, "checkpoint"); !p.empty()) candidates.push_back(p);
    else candidates = list_checkpoints(need(inv.inputs, "checkpoints", "input"));
    const std::string best_by = get(inv.options, "best_by", "last");
    if (best_by != "last" && best_by != "f1") throw ValidationError("--best-by must be 'last' or 'f1'");
    if (best_by == "last") candidates = {candidates.back()};

    const auto eval_set = data::WindowSet::from_archive(TensorArchive::load(need(inv.inputs, "windows", "input"), "windows"));
    const auto reference =
        data::WindowSet::from_archive(TensorArchive::load(need(inv.inputs, "reference", "input"), "windows"));

    eval::DetectOptions d;
    d.lambda = auto_or_value(get(inv.options, "lambda", "auto"), "lambda");
    d.threshold = auto_or_value(get(inv.options, "threshold", "auto"), "threshold");
    if (d.lambda && !(*d.lambda >= 0 && *d.lambda <= 1)) throw ValidationError("--lambda must lie in [0, 1]");
    if ((!d.lambda || !d.threshold) && !eval_set.window_labels)
        throw ValidationError("--lambda auto and --threshold auto need labeled evaluation windows");
    if (best_by == "f1" && !eval_set.window_labels) throw ValidationError("--best-by f1 needs labeled evaluation windows");

    std::optional<eval::DetectionReport> best;
    fs::path chosen;
    for (const auto& path : candidates) {
        const auto archive = TensorArchive::load(path, "checkpoint");
        const auto model = nn::model_from_archive(archive);
        // Scoring settings come from the checkpoint's config, overridable from the command line.
        auto config = archive.has_meta("train_config") ? from_text(archive.meta("train_config"))
                                                        : std::map<std::string, std::string>{};
        for (const auto& [k, v] : inv.config) config[k] = v;
        const auto cfg = train_config_from(config);
        d.scoring.prob_clamp = cfg.prob_clamp;
        d.scoring.inversion_steps = cfg.inversion_steps;
        d.scoring.inversion_lr = cfg.inversion_lr;
        auto report = eval::detect(model, eval_set, reference, d);
        if (candidates.size() > 1)
            log << path.filename().string() << ": f1 " << format_double(report.metrics ? report.metrics->f1 : 0) << '\n';
        if (!best || (report.metrics && report.metrics->f1 > best->metrics->f1)) {
            best = std::move(report);
            chosen = path;
        }
    }
    const fs::path dir = need(inv.outputs, "dir", "output");
    fs::create_directories(dir);
    eval::write_metrics_json(dir / "metrics.json", *best);
    eval::write_scores_csv(dir / "scores.csv", *best);
    if (best->roc) eval::write_roc_csv(dir / "roc.csv", *best->roc);
    char lam[16];
    std::snprintf(lam, sizeof lam, "%.2f", best->lambda);
    results["checkpoint"] = chosen.string();
    results["lambda"] = lam;
    results["threshold"] = format_double(best->threshold);
    if (best->metrics) results["f1"] = format_double(best->metrics->f1);
    log << "checkpoint " << chosen.string() << "  lambda " << format_double(best->lambda) << "  threshold "
        << format_double(best->threshold);
    if (best->metrics) {
        log << "  f1 " << format_double(best->metrics->f1);
        if (best->metrics->auc) log << "  auc " << format_double(*best->metrics->auc);
    }
    log << '\n';
}

// ---------------------------------------------------------------- stats-cd

void run_stats_cd(const Invocation& inv, std::ostream& log) {
    const fs::path input = need(inv.inputs, "results", "input");
    std::ifstream in(input);
    if (!in) throw ValidationError("cannot open '" + input.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(input.string() + ": " + e.what());
    }
    std::vector<std::string> methods, datasets;
    std::vector<std::vector<double>> rows;
    try {
        methods = j.at("methods").get<std::vector<std::string>>();
        if (j.contains("datasets")) datasets = j.at("datasets").get<std::vector<std::string>>();
        rows = j.at("scores").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
        throw ValidationError(input.string() + ": expected {\"methods\": [...], \"datasets\": [...], \"scores\": "
                              "[[...], ...]}: " + e.what());
    }
    if (rows.empty()) throw ValidationError(input.string() + ": no datasets");
    if (!datasets.empty() && datasets.size() != rows.size())
        throw ValidationError(input.string() + ": 'datasets' and 'scores' differ in length");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(methods.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != methods.size())
            throw ValidationError(input.string() + ": dataset row " + std::to_string(i) + " has " +
                                  std::to_string(rows[i].size()) + " scores for " + std::to_string(methods.size()) +
                                  " methods");
        for (std::size_t c = 0; c < methods.size(); ++c)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
    const auto alpha_s = get(inv.options, "alpha", "0.05");
    const double alpha = std::stod(alpha_s);
    const bool higher = get(inv.options, "lower_is_better", "false") != "true";
    const int k = get(inv.options, "k").empty() ? static_cast<int>(methods.size()) : std::stoi(get(inv.options, "k"));
    const auto table = eval::friedman_ranks(m, higher);
    const int n = static_cast<int>(rows.size());
    const double q = eval::nemenyi_q(k, alpha);
    const double cd = eval::nemenyi_cd(k, n, alpha);

    json out;
    out["format_version"] = kManifestVersion;
    out["alpha"] = alpha;
    out["k"] = k;
    out["N"] = n;
    out["q"] = q;
    out["cd"] = cd;
    out["higher_is_better"] = higher;
    json ms = json::array();
    for (std::size_t c = 0; c < methods.size(); ++c) {
        json r;
        r["method"] = methods[c];
        r["average_rank"] = table.average(static_cast<Eigen::Index>(c));
        std::vector<double> per(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            per[i] = table.ranks(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
        r["ranks"] = per;
        ms.push_back(r);
    }
    out["methods"] = ms;
    if (!datasets.empty()) out["datasets"] = datasets;
    const fs::path path = need(inv.outputs, "ranks", "output");
    ensure_parent(path);
    std::ofstream(path) << out.dump(2) << '\n';
    log << "k = " << k << ", N = " << n << ", alpha = " << alpha_s << ": q = " << format_double(q)
        << ", CD = " << format_double(cd) << '\n';
}

// ---------------------------------------------------------------- manifest

std::map<std::string, std::string> materialized_config(const Invocation& inv) {
    if (inv.command == "synth") return from_text(synth_text(synth_from_kv(to_kv(inv.config))));
    if (inv.command == "stats-cd") return {};
    if (inv.command == "evaluate") return inv.config;  // overrides only; the rest comes from the checkpoint
    return from_text(train_config_from(inv.config).to_text());
}

std::string materialized_text(const Invocation& inv) {
    if (inv.command == "synth") return synth_text(synth_from_kv(to_kv(inv.config)));
    if (inv.command == "preprocess" || inv.command == "train") return train_config_from(inv.config).to_text();
    return {};
}

json to_json(const std::map<std::string, std::string>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

std::map<std::string, std::string> from_json(const json& j) {
    std::map<std::string, std::string> m;
    for (const auto& [k, v] : j.items()) m[k] = v.get<std::string>();
    return m;
}

}  // namespace

fs::path manifest_path(const Invocation& inv) {
    if (inv.command == "synth") {
        fs::path p = need(inv.outputs, "corpus", "output");
        return p.parent_path() / (p.stem().string() + ".manifest.json");
    }
    if (inv.command == "stats-cd") {
        fs::path p = need(inv.outputs, "ranks", "output");
        return p.parent_path() / (p.stem().string() + ".manifest.json");
    }
    return fs::path(need(inv.outputs, "dir", "output")) / "manifest.json";
}

int thread_cap() {
    const char* v = std::getenv("MTSDVGAN_THREADS");
    if (!v || !*v) return 1;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1) throw ValidationError(std::string("MTSDVGAN_THREADS must be a positive integer, got '") + v + "'");
    return static_cast<int>(n);
}

void execute(const Invocation& inv, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    Invocation resolved = inv;
    json results = json::object();
    resolved.config = materialized_config(inv);
    const int threads = thread_cap();

    if (inv.command == "synth") run_synth(resolved, log);
    else if (inv.command == "preprocess") run_preprocess(resolved, log);
    else if (inv.command == "train") run_train(resolved, log);
    else if (inv.command == "evaluate") run_evaluate(resolved, log, results);
    else if (inv.command == "stats-cd") run_stats_cd(resolved, log);
    else throw ValidationError("unknown command '" + inv.command + "'");

    json m;
    m["format_version"] = kManifestVersion;
    m["command"] = inv.command;
    m["seed"] = get(resolved.config, "seed", "0");
    m["config"] = to_json(resolved.config);
    if (auto text = materialized_text(resolved); !text.empty()) m["config_text"] = text;
    m["inputs"] = to_json(inv.inputs);
    m["outputs"] = to_json(inv.outputs);
    m["options"] = to_json(inv.options);
    if (!results.empty()) m["results"] = results;
    m["threads"] = threads;
    m["duration_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto path = manifest_path(inv);
    ensure_parent(path);
    std::ofstream(path) << m.dump(2) << '\n';
}

Invocation load_manifest(const fs::path& path, const fs::path& out_dir) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open manifest '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    Invocation inv;
    try {
        if (j.at("format_version").get<int>() != kManifestVersion)
            throw ValidationError(path.string() + ": unsupported manifest version");
        inv.command = j.at("command").get<std::string>();
        inv.config = from_json(j.at("config"));
        inv.inputs = from_json(j.at("inputs"));
        inv.outputs = from_json(j.at("outputs"));
        inv.options = from_json(j.at("options"));
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": malformed manifest: " + e.what());
    }
    if (!out_dir.empty())
        for (auto& [k, v] : inv.outputs) v = (k == "dir") ? out_dir.string() : (out_dir / fs::path(v).filename()).string();
    return inv;
}

namespace {

void add_config_flags(CLI::App* app, std::string& config_path, std::vector<std::string>& sets) {
    app->add_option("--config", config_path, "flat key = value configuration file");
    app->add_option("--set", sets, "KEY=VALUE override (repeatable)");
}

std::map<std::string, std::string> gather_config(const std::string& config_path, const std::vector<std::string>& sets,
                                                 const std::map<std::string, std::string>& flags) {
    std::map<std::string, std::string> c;
    if (!config_path.empty()) c = KeyValues::load(config_path).values();
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects KEY=VALUE, got '" + s + "'");
        c[s.substr(0, eq)] = s.substr(eq + 1);
    }
    for (const auto& [k, v] : flags)
        if (!v.empty()) c[k] = v;
    return c;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dual-variational LSTM GAN anomaly detector for multivariate time series", "mtsdvgan"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;
    Invocation inv;

    auto* synth = app.add_subcommand("synth", "generate a labeled synthetic corpus");
    add_config_flags(synth, config_path, sets);
    synth->add_option("--out", inv.outputs["corpus"], "corpus CSV")->required();
    synth->add_option("--train-out", inv.outputs["train"], "leading train_fraction of the rows");
    synth->add_option("--eval-out", inv.outputs["eval"], "remaining rows");
    synth->add_option("--seed", flags["seed"]);
    synth->add_option("--length", flags["length"]);
    synth->add_option("--features", flags["n_features"]);
    synth->add_option("--anomaly-rate", flags["anomaly_rate"]);
    synth->add_option("--anomaly-kinds", flags["anomaly_kinds"], "comma-separated: spike,level_shift,correlation_break");

    auto* pre = app.add_subcommand("preprocess", "normalize, reduce with PCA and window");
    add_config_flags(pre, config_path, sets);
    pre->add_option("--train", inv.inputs["train"], "training CSV")->required();
    pre->add_option("--eval", inv.inputs["eval"], "evaluation CSV");
    pre->add_option("--out-dir", inv.outputs["dir"])->required();
    pre->add_option("--signal-number", flags["signal_number"]);
    pre->add_option("--window-size", flags["window_size"]);
    pre->add_option("--shift", flags["shift"]);

    auto* tr = app.add_subcommand("train", "train on a window archive");
    add_config_flags(tr, config_path, sets);
    tr->add_option("--windows", inv.inputs["windows"], "training window archive")->required();
    tr->add_option("--out-dir", inv.outputs["dir"])->required();
    tr->add_option("--epochs", flags["epochs"]);
    tr->add_option("--seed", flags["seed"]);
    std::string ablate;
    tr->add_option("--ablate", ablate, "no_contrastive | no_encoder | bce_generator")
        ->check(CLI::IsMember({"no_contrastive", "no_encoder", "bce_generator"}));

    std::string lambda = "auto", threshold = "auto", best_by = "last";
    auto add_eval = [&](CLI::App* a, bool lambda_flag) {
        add_config_flags(a, config_path, sets);
        a->add_option("--checkpoint", inv.inputs["checkpoint"], "checkpoint archive");
        a->add_option("--checkpoints", inv.inputs["checkpoints"], "directory of per-epoch checkpoints");
        a->add_option("--windows", inv.inputs["windows"], "evaluation window archive")->required();
        a->add_option("--reference", inv.inputs["reference"], "normal reference window archive")->required();
        a->add_option("--out-dir", inv.outputs["dir"])->required();
        if (lambda_flag) a->add_option("--lambda", lambda, "auto or a value in [0, 1]");
        a->add_option("--threshold", threshold, "auto or a value");
        a->add_option("--best-by", best_by, "last or f1 (scan every checkpoint)")
            ->check(CLI::IsMember({"last", "f1"}));
    };
    auto* ev = app.add_subcommand("evaluate", "score windows and report metrics");
    add_eval(ev, true);
    auto* sw = app.add_subcommand("sweep-lambda", "evaluate with --lambda auto");
    add_eval(sw, false);

    auto* st = app.add_subcommand("stats-cd", "Friedman ranks and Nemenyi critical difference");
    st->add_option("--input", inv.inputs["results"], "JSON {methods, datasets, scores}")->required();
    st->add_option("--out", inv.outputs["ranks"], "rank/CD JSON")->required();
    std::string alpha = "0.05";
    int k = 0;
    bool lower = false;
    st->add_option("--alpha", alpha)->check(CLI::IsMember({"0.05", "0.1", "0.10"}));
    st->add_option("--k", k, "number of methods for the CD (default: all)")->check(CLI::PositiveNumber);
    st->add_flag("--lower-is-better", lower);

    auto* rr = app.add_subcommand("rerun", "repeat a command from its manifest");
    std::string manifest, rerun_dir;
    rr->add_option("manifest", manifest)->required();
    rr->add_option("--out-dir", rerun_dir, "write outputs here instead");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e2;
        const int code = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return code == 0 ? 0 : 2;
    }

    try {
        const auto* sub = app.get_subcommands().front();
        if (sub == rr) {
            inv = load_manifest(manifest, rerun_dir);
        } else {
            inv.command = sub->get_name() == "sweep-lambda" ? "evaluate" : sub->get_name();
            if (!ablate.empty()) flags[ablate] = "true";
            inv.config = gather_config(config_path, sets, flags);
            for (auto* m : {&inv.inputs, &inv.outputs})
                for (auto it = m->begin(); it != m->end();) it = it->second.empty() ? m->erase(it) : std::next(it);
            if (inv.command == "evaluate") {
                if (inv.inputs.count("checkpoint") == inv.inputs.count("checkpoints"))
                    throw ValidationError("give exactly one of --checkpoint and --checkpoints");
                inv.options = {{"lambda", sub == sw ? "auto" : lambda}, {"threshold", threshold}, {"best_by", best_by}};
            }
            if (inv.command == "stats-cd") {
                inv.options = {{"alpha", alpha}, {"lower_is_better", lower ? "true" : "false"}};
                if (k > 0) inv.options["k"] = std::to_string(k);
            }
        }
        execute(inv, out);
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace mtsdvgan::cli
