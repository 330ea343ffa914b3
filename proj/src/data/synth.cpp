#include "mtsdvgan/data/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "mtsdvgan/error.hpp"
#include "mtsdvgan/rng.hpp"

namespace mtsdvgan::data {
namespace {

constexpr int kSources = 3;
constexpr std::int64_t kMinSpan = 10;
constexpr std::int64_t kMaxSpan = 40;
constexpr double kMeanSpan = 25.0;

struct Span {
    std::int64_t begin = 0;
    std::int64_t length = 0;
    AnomalyKind kind = AnomalyKind::spike;
};

// Random lengths whose sum equals `total`, each in [1, cap].
std::vector<std::int64_t> span_lengths(Rng& rng, std::int64_t n_spans, std::int64_t total, std::int64_t cap) {
    std::vector<std::int64_t> len(static_cast<std::size_t>(n_spans));
    for (auto& l : len) l = std::min(cap, rng.integer(kMinSpan, kMaxSpan));
    std::int64_t sum = 0;
    for (auto l : len) sum += l;
    // Shift the residual one unit at a time, cycling through spans.
    std::size_t i = 0;
    std::int64_t guard = 0;
    while (sum != total && guard < 100 * total + 100) {
        auto& l = len[i % len.size()];
        if (sum < total && l < cap) {
            ++l;
            ++sum;
        } else if (sum > total && l > 1) {
            --l;
            --sum;
        }
        ++i;
        ++guard;
    }
    return len;
}

}  // namespace

AnomalyKind parse_anomaly_kind(const std::string& name) {
    if (name == "spike") return AnomalyKind::spike;
    if (name == "level_shift") return AnomalyKind::level_shift;
    if (name == "correlation_break") return AnomalyKind::correlation_break;
    throw ValidationError("unknown anomaly kind '" + name + "'");
}

std::string to_string(AnomalyKind kind) {
    switch (kind) {
        case AnomalyKind::spike: return "spike";
        case AnomalyKind::level_shift: return "level_shift";
        case AnomalyKind::correlation_break: return "correlation_break";
    }
    return "?";
}

void SynthConfig::validate() const {
    if (n_features < 1) throw ValidationError("n_features must be >= 1");
    if (length < 1) throw ValidationError("length must be >= 1");
    if (!(anomaly_rate > 0.0 && anomaly_rate < 0.5)) throw ValidationError("anomaly_rate must lie in (0, 0.5)");
    if (!(noise_std > 0.0)) throw ValidationError("noise_std must be positive");
    if (anomaly_kinds.empty()) throw ValidationError("anomaly_kinds is empty but anomaly_rate > 0");
}

RawSeries synth_generate(const SynthConfig& config) {
    config.validate();
    Rng rng(derive_seed(config.seed, Stream::synth));
    const auto t_len = config.length;
    const auto n = config.n_features;

    std::array<double, kSources> period{}, phase{};
    for (int s = 0; s < kSources; ++s) {
        period[static_cast<std::size_t>(s)] = rng.uniform(40.0, 200.0);
        phase[static_cast<std::size_t>(s)] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    Eigen::MatrixXd mix(n, kSources);
    for (Eigen::Index j = 0; j < n; ++j)
        for (int s = 0; s < kSources; ++s) mix(j, s) = rng.normal() * 0.8;
    Eigen::VectorXd base(n), sigma(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        base(j) = 1.5 + mix.row(j).cwiseAbs().sum();
        sigma(j) = std::max(std::sqrt(mix.row(j).squaredNorm() / 2.0), 0.1);
    }

    Eigen::MatrixXd sources(t_len, kSources);
    for (std::int64_t t = 0; t < t_len; ++t)
        for (int s = 0; s < kSources; ++s)
            sources(t, s) = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) /
                                         period[static_cast<std::size_t>(s)] +
                                     phase[static_cast<std::size_t>(s)]);
    const Eigen::MatrixXd signal = sources * mix.transpose();   // T x N, zero-mean part

    RawSeries out;
    out.values.resize(t_len, n);
    for (std::int64_t t = 0; t < t_len; ++t)
        for (Eigen::Index j = 0; j < n; ++j)
            out.values(t, j) = base(j) + signal(t, j) + config.noise_std * rng.normal();
    for (Eigen::Index j = 0; j < n; ++j) out.feature_names.push_back("sensor_" + std::to_string(j));

    // Spread spans over equal segments so they never overlap.
    const auto labeled = std::max<std::int64_t>(1, std::llround(config.anomaly_rate * static_cast<double>(t_len)));
    const auto n_spans = std::max<std::int64_t>(1, std::llround(static_cast<double>(labeled) / kMeanSpan));
    const auto segment = t_len / n_spans;
    const auto cap = std::max<std::int64_t>(1, std::min(kMaxSpan * 2, segment - 1));
    const auto lengths = span_lengths(rng, n_spans, labeled, cap);
    const std::vector<AnomalyKind> kinds(config.anomaly_kinds.begin(), config.anomaly_kinds.end());

    Labels labels(static_cast<std::size_t>(t_len), 0);
    for (std::int64_t s = 0; s < n_spans; ++s) {
        Span sp;
        sp.length = std::min(lengths[static_cast<std::size_t>(s)], segment);
        sp.begin = s * segment + rng.integer(0, std::max<std::int64_t>(0, segment - sp.length));
        sp.kind = kinds[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(kinds.size()) - 1))];

        std::vector<Eigen::Index> feats(static_cast<std::size_t>(n));
        for (Eigen::Index j = 0; j < n; ++j) feats[static_cast<std::size_t>(j)] = j;
        std::shuffle(feats.begin(), feats.end(), rng.engine());
        auto pick = [&](std::int64_t lo, std::int64_t hi) {
            const auto m = std::min<std::int64_t>(n, rng.integer(lo, hi));
            return std::vector<Eigen::Index>(feats.begin(), feats.begin() + m);
        };

        switch (sp.kind) {
            case AnomalyKind::spike:
                for (std::int64_t t = sp.begin; t < sp.begin + sp.length; ++t) {
                    for (auto j : pick(1, 2)) {
                        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
                        out.values(t, j) += sign * rng.uniform(4.0, 6.0) * sigma(j);
                    }
                }
                break;
            case AnomalyKind::level_shift: {
                for (auto j : pick(2, 4)) {
                    const double delta = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(2.0, 3.0) * sigma(j);
                    for (std::int64_t t = sp.begin; t < sp.begin + sp.length; ++t) out.values(t, j) += delta;
                }
                break;
            }
            case AnomalyKind::correlation_break: {
                for (auto j : pick(2, 3))
                    for (std::int64_t t = sp.begin; t < sp.begin + sp.length; ++t)
                        out.values(t, j) -= 2.0 * signal(t, j);
                break;
            }
        }
        for (std::int64_t t = sp.begin; t < sp.begin + sp.length; ++t) labels[static_cast<std::size_t>(t)] = 1;
    }
    out.labels = std::move(labels);
    return out;
}

}  // namespace mtsdvgan::data
