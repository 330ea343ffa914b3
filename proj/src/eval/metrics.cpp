#include "mtsdvgan/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mtsdvgan/error.hpp"
#include "mtsdvgan/eval/scoring.hpp"

namespace mtsdvgan::eval {

MetricsReport confusion_metrics(std::int64_t tp, std::int64_t fp, std::int64_t fn, std::int64_t tn) {
    if (tp < 0 || fp < 0 || fn < 0 || tn < 0) throw ValidationError("confusion_metrics: negative count");
    MetricsReport m;
    m.tp = tp, m.fp = fp, m.fn = fn, m.tn = tn;
    const std::int64_t total = tp + fp + fn + tn;
    if (total == 0) throw ValidationError("confusion_metrics: no samples");
    m.accuracy = 100.0 * static_cast<double>(tp + tn) / static_cast<double>(total);
    if (tp + fp > 0) m.precision = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp);
    else m.precision_degenerate = true;
    if (tp + fn > 0) m.recall = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn);
    else m.recall_degenerate = true;
    if (m.precision + m.recall > 0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    else m.f1_degenerate = true;
    return m;
}

namespace {

void check_inputs(const std::vector<double>& scores, const data::Labels& labels, const char* who) {
    if (scores.size() != labels.size()) throw ValidationError(std::string(who) + ": scores and labels differ in length");
    if (scores.empty()) throw ValidationError(std::string(who) + ": no scores");
    for (double s : scores)
        if (!std::isfinite(s)) throw ValidationError(std::string(who) + ": non-finite score");
}

void require_both_classes(const data::Labels& labels, const char* who) {
    const auto pos = std::count(labels.begin(), labels.end(), std::uint8_t{1});
    if (pos == 0 || pos == static_cast<std::ptrdiff_t>(labels.size()))
        throw ValidationError(std::string(who) + ": labels must contain both classes");
}

}  // namespace

MetricsReport evaluate_threshold(const std::vector<double>& scores, const data::Labels& labels, double threshold) {
    check_inputs(scores, labels, "evaluate_threshold");
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] > threshold;
        if (labels[i]) pred ? ++tp : ++fn;
        else pred ? ++fp : ++tn;
    }
    auto m = confusion_metrics(tp, fp, fn, tn);
    m.threshold = threshold;
    return m;
}

std::vector<double> threshold_candidates(const std::vector<double>& scores, std::size_t exact_limit) {
    if (scores.empty()) throw ValidationError("threshold_candidates: no scores");
    std::vector<double> u(scores);
    std::sort(u.begin(), u.end());
    std::vector<double> c;
    c.push_back(std::nextafter(u.front(), -std::numeric_limits<double>::infinity()));
    if (u.size() > exact_limit) {
        const std::size_t q = 512;
        for (std::size_t j = 0; j < q; ++j) c.push_back(u[j * (u.size() - 1) / (q - 1)]);
    } else {
        u.erase(std::unique(u.begin(), u.end()), u.end());
        for (std::size_t i = 0; i + 1 < u.size(); ++i) c.push_back(u[i] + (u[i + 1] - u[i]) / 2);
        c.push_back(u.back());
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

MetricsReport select_threshold(const std::vector<double>& scores, const data::Labels& labels) {
    check_inputs(scores, labels, "select_threshold");
    require_both_classes(labels, "select_threshold");
    const auto cand = threshold_candidates(scores);

    // Sweep candidates in ascending order against scores sorted ascending:
    // everything above the threshold is predicted anomalous.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
    const auto pos_total = std::count(labels.begin(), labels.end(), std::uint8_t{1});
    const auto neg_total = static_cast<std::int64_t>(labels.size()) - pos_total;
    std::int64_t below_pos = 0, below_neg = 0;   // scores <= threshold
    std::size_t idx = 0;
    MetricsReport best;
    bool have = false;
    for (double t : cand) {
        while (idx < order.size() && scores[order[idx]] <= t) {
            labels[order[idx]] ? ++below_pos : ++below_neg;
            ++idx;
        }
        auto m = confusion_metrics(pos_total - below_pos, neg_total - below_neg, below_pos, below_neg);
        m.threshold = t;
        if (!have || m.f1 > best.f1) {
            best = m;
            have = true;
        }
    }
    return best;
}

std::vector<double> lambda_grid() {
    std::vector<double> g(101);
    for (int i = 0; i <= 100; ++i) g[static_cast<std::size_t>(i)] = i / 100.0;
    return g;
}

LambdaChoice sweep_lambda(const std::vector<double>& l_d, const std::vector<double>& l_r, const data::Labels& labels) {
    LambdaChoice best;
    bool have = false;
    for (double lambda : lambda_grid()) {
        const auto m = select_threshold(rd_score(l_d, l_r, lambda), labels);
        if (!have || m.f1 > best.f1) {
            best = LambdaChoice{lambda, m.f1, m};
            have = true;
        }
    }
    return best;
}

RocResult roc_auc(const std::vector<double>& scores, const data::Labels& labels) {
    check_inputs(scores, labels, "roc_auc");
    require_both_classes(labels, "roc_auc");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
    const auto p = static_cast<double>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
    const auto n = static_cast<double>(labels.size()) - p;

    RocResult r;
    r.points.push_back({0.0, 0.0, scores[order.front()]});
    std::int64_t tp = 0, fp = 0;
    double auc2 = 0;   // twice the area
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        const auto tp0 = tp, fp0 = fp;
        while (i < order.size() && scores[order[i]] == s) {
            labels[order[i]] ? ++tp : ++fp;
            ++i;
        }
        const double below = i < order.size() ? s + (scores[order[i]] - s) / 2
                                              : std::nextafter(s, -std::numeric_limits<double>::infinity());
        r.points.push_back({static_cast<double>(fp) / n, static_cast<double>(tp) / p, below});
        auc2 += static_cast<double>(fp - fp0) * static_cast<double>(tp + tp0);
    }
    r.auc = auc2 / (2.0 * p * n);
    return r;
}

}  // namespace mtsdvgan::eval
