#include "mtsdvgan/eval/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "mtsdvgan/error.hpp"

namespace mtsdvgan::eval {

RankTable friedman_ranks(const Eigen::MatrixXd& scores, bool higher_is_better) {
    if (scores.rows() < 1 || scores.cols() < 1) throw ValidationError("friedman_ranks: empty score matrix");
    if (!scores.allFinite()) throw ValidationError("friedman_ranks: non-finite entry");
    const auto m = scores.cols();
    RankTable t{Eigen::MatrixXd(scores.rows(), m), Eigen::VectorXd()};
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    for (Eigen::Index d = 0; d < scores.rows(); ++d) {
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        auto better = [&](Eigen::Index a, Eigen::Index b) {
            return higher_is_better ? scores(d, a) > scores(d, b) : scores(d, a) < scores(d, b);
        };
        std::stable_sort(order.begin(), order.end(), better);
        for (std::size_t i = 0; i < order.size();) {
            std::size_t j = i;
            while (j + 1 < order.size() && scores(d, order[j + 1]) == scores(d, order[i])) ++j;
            const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2;
            for (std::size_t q = i; q <= j; ++q) t.ranks(d, order[q]) = r;
            i = j + 1;
        }
    }
    t.average = t.ranks.colwise().mean().transpose();
    return t;
}

namespace {

// k = 2..20. The first nine entries of each row are the standard published
// values; the rest come from integrating the studentized range distribution
// with infinite degrees of freedom, divided by sqrt(2).
constexpr std::array<double, 19> kQ05 = {1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164, 3.219,
                                         3.268, 3.313, 3.354, 3.391, 3.426, 3.458, 3.489, 3.517, 3.544};
constexpr std::array<double, 19> kQ10 = {1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920, 2.978,
                                         3.030, 3.077, 3.120, 3.159, 3.196, 3.230, 3.261, 3.291, 3.319};

}  // namespace

double nemenyi_q(int k, double alpha) {
    if (k < 2 || k > 20) throw ValidationError("nemenyi: k must lie in [2, 20]");
    const auto i = static_cast<std::size_t>(k - 2);
    if (std::abs(alpha - 0.05) < 1e-12) return kQ05[i];
    if (std::abs(alpha - 0.10) < 1e-12) return kQ10[i];
    throw ValidationError("nemenyi: alpha must be 0.05 or 0.10");
}

double nemenyi_cd(int k, int n_datasets, double alpha) {
    if (n_datasets < 1) throw ValidationError("nemenyi: need at least one dataset");
    return nemenyi_q(k, alpha) * std::sqrt(k * (k + 1.0) / (6.0 * n_datasets));
}

}  // namespace mtsdvgan::eval
