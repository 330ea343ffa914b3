#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mtsdvgan/archive.hpp"
#include "mtsdvgan/data/series.hpp"

namespace mtsdvgan::data {

/// W windows of k timesteps by d features.
struct WindowSet {
    std::vector<Eigen::MatrixXd> windows;        // each k x d
    std::optional<Labels> window_labels;          // W
    std::vector<std::int64_t> start_indices;      // W, constant stride
    Eigen::Index window_length = 0;
    Eigen::Index shift = 0;

    std::size_t size() const noexcept { return windows.size(); }
    bool empty() const noexcept { return windows.empty(); }
    Eigen::Index feature_dim() const noexcept { return windows.empty() ? 0 : windows.front().cols(); }

    /// Subset by index list, keeping order.
    WindowSet select(const std::vector<std::size_t>& idx) const;

    TensorArchive to_archive() const;
    static WindowSet from_archive(const TensorArchive& archive);
};

/// Window count for a series of length t; 0 when t < k.
constexpr std::int64_t window_count(std::int64_t t, std::int64_t k, std::int64_t shift) noexcept {
    return t < k ? 0 : (t - k) / shift + 1;
}

/// Window i covers [i * shift, i * shift + k). A window is labeled anomalous
/// iff any covered timestep is anomalous. Throws EmptyWindowSet when T < k.
WindowSet make_windows(const Eigen::MatrixXd& series, const std::optional<Labels>& labels, Eigen::Index k,
                       Eigen::Index shift);

/// x_aug = s * x + eps, with s ~ N(1, sigma_scale) drawn per window and
/// feature, eps ~ N(0, sigma_jitter) per element.
std::vector<Eigen::MatrixXd> jitter_scale(const std::vector<Eigen::MatrixXd>& batch, double sigma_jitter,
                                          double sigma_scale, std::uint64_t seed);

}  // namespace mtsdvgan::data
