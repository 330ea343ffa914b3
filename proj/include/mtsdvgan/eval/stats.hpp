#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mtsdvgan::eval {

struct RankTable {
    Eigen::MatrixXd ranks;            // datasets x methods, 1 = best
    Eigen::VectorXd average;          // per method
};

/// Ranks methods within each dataset (row). Ties share the average of the
/// ranks they span.
RankTable friedman_ranks(const Eigen::MatrixXd& scores, bool higher_is_better = true);

/// Studentized-range-based q_alpha for the Nemenyi test, k = 2..20,
/// alpha in {0.05, 0.10}.
double nemenyi_q(int k, double alpha);

/// q_alpha * sqrt(k (k + 1) / (6 N)).
double nemenyi_cd(int k, int n_datasets, double alpha);

}  // namespace mtsdvgan::eval
