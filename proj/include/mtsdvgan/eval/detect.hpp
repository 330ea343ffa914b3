#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mtsdvgan/data/windows.hpp"
#include "mtsdvgan/eval/metrics.hpp"
#include "mtsdvgan/eval/scoring.hpp"
#include "mtsdvgan/nn/model.hpp"

namespace mtsdvgan::eval {

/// A fixed value, or nullopt for "auto".
struct DetectOptions {
    std::optional<double> lambda;
    std::optional<double> threshold;
    ScoringOptions scoring;
};

struct DetectionReport {
    std::vector<std::int64_t> start_indices;
    std::optional<data::Labels> labels;
    std::vector<double> l_r_raw, l_d_raw;   // before normalization
    std::vector<double> l_r, l_d;           // normalized against the reference split
    std::vector<double> rd;
    double lambda = 0;
    bool lambda_auto = false;
    double threshold = 0;
    bool threshold_auto = false;
    std::optional<MetricsReport> metrics;   // when labels are present
    std::optional<RocResult> roc;           // when both classes are present
};

/// Scores `eval` and `reference`, normalizes both channels against the
/// reference, mixes them with lambda, picks lambda and threshold as asked.
DetectionReport detect(const nn::Model<float>& model, const data::WindowSet& eval, const data::WindowSet& reference,
                       const DetectOptions& options);

/// Metrics JSON (precision, accuracy, recall, f1, auc, lambda, threshold,
/// counts and the format version), serialized deterministically.
std::string metrics_json(const DetectionReport& report, int indent = 2);
void write_metrics_json(const std::filesystem::path& path, const DetectionReport& report);
/// fpr,tpr,threshold
void write_roc_csv(const std::filesystem::path& path, const RocResult& roc);
/// start_index,l_r,l_d,rd,label
void write_scores_csv(const std::filesystem::path& path, const DetectionReport& report);

}  // namespace mtsdvgan::eval
