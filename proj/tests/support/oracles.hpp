#pragma once

// Independent brute-force references for the evaluation and loss code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct Counts {
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Counts count(const std::vector<std::uint8_t>& pred, const std::vector<std::uint8_t>& labels) {
    Counts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] && labels[i]) ++c.tp;
        else if (pred[i]) ++c.fp;
        else if (labels[i]) ++c.fn;
        else ++c.tn;
    }
    return c;
}

struct Percentages {
    double precision = 0, recall = 0, accuracy = 0, f1 = 0;
};

/// Precision, recall, accuracy in percent from the counts, F1 as their
/// harmonic mean; 0 wherever a denominator vanishes.
inline Percentages percentages(const Counts& c) {
    Percentages p;
    if (c.tp + c.fp > 0) p.precision = 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0) p.recall = 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    p.accuracy = 100.0 * static_cast<double>(c.tp + c.tn) / static_cast<double>(c.tp + c.fp + c.fn + c.tn);
    if (p.precision + p.recall > 0) p.f1 = 2.0 * p.precision * p.recall / (p.precision + p.recall);
    return p;
}

/// P(anomalous score > normal score) + 0.5 P(tie), over all pairs.
inline double pairwise_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& labels) {
    double wins = 0;
    std::int64_t pairs = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (labels[j]) continue;
            ++pairs;
            if (s[i] > s[j]) wins += 1;
            else if (s[i] == s[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

/// Best F1 over every distinct cut of the rule score > t, with `f1_of`
/// turning confusion counts into F1.
template <class F1Of>
double exhaustive_best_f1(const std::vector<double>& s, const std::vector<std::uint8_t>& labels, F1Of f1_of) {
    std::vector<double> cuts(s);
    cuts.push_back(-std::numeric_limits<double>::infinity());
    double best = 0;
    std::vector<std::uint8_t> pred(s.size());
    for (double t : cuts) {
        for (std::size_t i = 0; i < s.size(); ++i) pred[i] = s[i] > t;
        best = std::max(best, f1_of(count(pred, labels)));
    }
    return best;
}

/// Mean of ln q(z) - ln p(z) for z ~ q = N(mu, exp(lv)) per dimension, p = N(0, 1).
inline double kl_monte_carlo(const std::vector<double>& mu, const std::vector<double>& lv, int n,
                             std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> nd(0, 1);
    double s = 0;
    for (int i = 0; i < n; ++i)
        for (std::size_t j = 0; j < mu.size(); ++j) {
            const double e = nd(g);
            const double z = mu[j] + std::exp(0.5 * lv[j]) * e;
            s += -0.5 * e * e - 0.5 * lv[j] + 0.5 * z * z;
        }
    return s / n;
}

/// CDF of the range of k iid standard normals:
/// k * integral phi(x) [Phi(x + q) - Phi(x)]^(k-1) dx (Simpson on [-9, 9]).
inline double range_cdf(double q, int k) {
    const int n = 4000;
    const double a = -9, b = 9, h = (b - a) / n;
    auto Phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    auto f = [&](double x) {
        const double phi = std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI);
        return phi * std::pow(Phi(x + q) - Phi(x), k - 1);
    };
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
    return k * s * h / 3;
}

/// Upper-alpha studentized range quantile (infinite df) divided by sqrt(2).
inline double nemenyi_q(int k, double alpha) {
    double lo = 0, hi = 10;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (range_cdf(mid, k) < 1 - alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi) / std::sqrt(2.0);
}

/// Average ranks per row by counting strictly better and tied entries.
inline Eigen::MatrixXd ranks(const Eigen::MatrixXd& m) {
    Eigen::MatrixXd r(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            int better = 0, ties = 0;
            for (Eigen::Index l = 0; l < m.cols(); ++l) {
                if (m(i, l) > m(i, j)) ++better;
                else if (m(i, l) == m(i, j)) ++ties;
            }
            r(i, j) = better + (ties + 1) / 2.0;
        }
    return r;
}

}  // namespace oracle
