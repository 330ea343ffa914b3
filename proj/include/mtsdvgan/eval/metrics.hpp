#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mtsdvgan/data/series.hpp"

namespace mtsdvgan::eval {

/// Precision, accuracy, recall and F1 in percent. A metric whose
/// denominator is zero is reported as 0 and flagged.
struct MetricsReport {
    double precision = 0, accuracy = 0, recall = 0, f1 = 0;
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    bool precision_degenerate = false;
    bool recall_degenerate = false;
    bool f1_degenerate = false;
    std::optional<double> auc;
    double threshold = 0;

    std::int64_t total() const noexcept { return tp + fp + fn + tn; }
};

MetricsReport confusion_metrics(std::int64_t tp, std::int64_t fp, std::int64_t fn, std::int64_t tn);

/// Counts with the rule score > threshold => anomalous.
MetricsReport evaluate_threshold(const std::vector<double>& scores, const data::Labels& labels, double threshold);

/// Candidate thresholds: every midpoint between consecutive distinct scores,
/// plus one below the minimum (all anomalous) and the maximum (none). Above
/// `exact_limit` scores, 512 evenly spaced quantiles replace the midpoints.
std::vector<double> threshold_candidates(const std::vector<double>& scores, std::size_t exact_limit = 10000);

/// Highest-F1 candidate threshold (the smallest one on ties). Requires both
/// classes among the labels.
MetricsReport select_threshold(const std::vector<double>& scores, const data::Labels& labels);

struct LambdaChoice {
    double lambda = 0;
    double f1 = 0;
    MetricsReport metrics;
};

/// 0.00, 0.01, ..., 1.00.
std::vector<double> lambda_grid();

/// Best lambda over the grid by thresholded F1; the smallest lambda on ties.
LambdaChoice sweep_lambda(const std::vector<double>& l_d, const std::vector<double>& l_r, const data::Labels& labels);

struct RocPoint {
    double fpr = 0, tpr = 0, threshold = 0;
};

struct RocResult {
    std::vector<RocPoint> points;   // from (0, 0) to (1, 1)
    double auc = 0;
};

/// ROC over the distinct scores, trapezoidal AUC. Ties receive half credit,
/// so the AUC equals the pairwise rank statistic.
RocResult roc_auc(const std::vector<double>& scores, const data::Labels& labels);

}  // namespace mtsdvgan::eval
