#pragma once

#include <Eigen/Dense>

#include "mtsdvgan/archive.hpp"
#include "mtsdvgan/data/series.hpp"

namespace mtsdvgan::data {

/// Column maxima of the training series; maps x to 2 * x / max - 1.
///
/// Test data is transformed with the training maxima and is not clipped, so
/// values above 1 survive. Negative inputs go through the same formula and
/// may land below -1.
struct NormalizerState {
    Eigen::VectorXd per_feature_max;
};

NormalizerState fit_normalizer(const RawSeries& train);
RawSeries apply_normalizer(const NormalizerState& state, const RawSeries& series);

/// Principal subspace of the (normalized) training series.
struct PcaState {
    Eigen::VectorXd mean;                 // N
    Eigen::MatrixXd components;           // d x N, orthonormal rows
    Eigen::VectorXd explained_variance;   // d, nonincreasing

    Eigen::Index dims() const noexcept { return components.rows(); }
};

/// Top-d eigenvectors of the sample covariance (divisor T - 1).
/// When fewer than d eigenvalues are nonzero the remaining rows come from
/// the residual eigenbasis with explained variance 0.
PcaState fit_pca(const RawSeries& train, Eigen::Index d);

/// (x - mean) * components^T, T x d.
Eigen::MatrixXd apply_pca(const PcaState& state, const Eigen::MatrixXd& values);

/// reduced * components + mean, T x N.
Eigen::MatrixXd reconstruct_pca(const PcaState& state, const Eigen::MatrixXd& reduced);

/// Normalizer and PCA fitted together; stored as one archive.
struct PreprocessState {
    NormalizerState normalizer;
    PcaState pca;
    std::vector<std::string> feature_names;

    TensorArchive to_archive() const;
    static PreprocessState from_archive(const TensorArchive& archive);

    /// normalize then project, T x d.
    Eigen::MatrixXd transform(const RawSeries& series) const;
};

}  // namespace mtsdvgan::data
