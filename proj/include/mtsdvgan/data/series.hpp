#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mtsdvgan::data {

using Labels = std::vector<std::uint8_t>;

/// T x N multivariate series, optionally with per-timestep {0,1} labels.
struct RawSeries {
    Eigen::MatrixXd values;
    std::optional<Labels> labels;
    std::vector<std::string> feature_names;

    Eigen::Index length() const noexcept { return values.rows(); }
    Eigen::Index features() const noexcept { return values.cols(); }

    /// Throws ValidationError if any invariant is broken.
    void validate() const;

    /// Rows [begin, end) as a new series.
    RawSeries slice(Eigen::Index begin, Eigen::Index end) const;
};

/// Parses CSV text with a header row. When `has_labels` is set a column named
/// `label` must exist; it is removed from the feature columns.
RawSeries parse_csv(std::istream& in, bool has_labels, const std::string& source = "<stream>");
RawSeries load_csv(const std::filesystem::path& path, bool has_labels);

/// Writes the same schema load_csv reads. Numbers use shortest round-trip form.
void write_csv(std::ostream& out, const RawSeries& series);
void save_csv(const std::filesystem::path& path, const RawSeries& series);

}  // namespace mtsdvgan::data
