#pragma once

#include <optional>

#include "mtsdvgan/data/preprocess.hpp"
#include "mtsdvgan/data/series.hpp"
#include "mtsdvgan/data/windows.hpp"

namespace mtsdvgan::data {

struct PrepareOptions {
    Eigen::Index signal_number = 5;
    Eigen::Index window_size = 30;
    Eigen::Index shift = 10;
    double validation_fraction = 0.2;
};

/// Training windows, the held-out normal reference split and the
/// evaluation windows, all in the reduced space.
struct PreparedData {
    PreprocessState state;
    WindowSet train;
    WindowSet reference;
    std::optional<WindowSet> eval;
};

/// Fits the normalizer and PCA on the training rows (only the label-0 rows
/// when labels exist) and windows both series. Anomalous training windows
/// are dropped. The last `validation_fraction` of the remaining training
/// windows becomes the reference split; with a fraction of 0 the reference
/// is the training set itself.
PreparedData prepare(const RawSeries& train, const std::optional<RawSeries>& eval, const PrepareOptions& options);

/// Windows [0, n - m) and [n - m, n) with m = round(fraction * n).
std::pair<WindowSet, WindowSet> split_tail(const WindowSet& windows, double fraction);

}  // namespace mtsdvgan::data
