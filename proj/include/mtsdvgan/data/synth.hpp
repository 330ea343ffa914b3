#pragma once

#include <cstdint>
#include <set>
#include <string>

#include "mtsdvgan/data/series.hpp"

namespace mtsdvgan::data {

enum class AnomalyKind { spike, level_shift, correlation_break };

AnomalyKind parse_anomaly_kind(const std::string& name);
std::string to_string(AnomalyKind kind);

/// Synthetic CPS-like telemetry: a few shared sinusoidal sources mixed into
/// every feature on top of a positive operating level, plus Gaussian noise.
struct SynthConfig {
    std::int64_t n_features = 8;
    std::int64_t length = 20000;
    std::uint64_t seed = 0;
    std::set<AnomalyKind> anomaly_kinds{AnomalyKind::spike, AnomalyKind::level_shift};
    double anomaly_rate = 0.05;
    double noise_std = 0.05;

    void validate() const;
};

/// Anomalous spans are labeled 1 over their full extent:
///  - spike: every step in the span carries a 4-6 sigma impulse on 1-2 features
///  - level_shift: 2-4 features offset by 2-3 sigma for the span
///  - correlation_break: 2-3 features follow the negated shared signal
/// The labeled fraction equals anomaly_rate up to rounding.
RawSeries synth_generate(const SynthConfig& config);

}  // namespace mtsdvgan::data
