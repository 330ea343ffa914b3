#include "mtsdvgan/data/windows.hpp"

#include <cmath>
#include <string>

#include "mtsdvgan/error.hpp"
#include "mtsdvgan/rng.hpp"

namespace mtsdvgan::data {

WindowSet make_windows(const Eigen::MatrixXd& series, const std::optional<Labels>& labels, Eigen::Index k,
                       Eigen::Index shift) {
    if (k < 1 || shift < 1) throw ValidationError("window length and shift must be >= 1");
    const Eigen::Index t = series.rows();
    if (labels && static_cast<Eigen::Index>(labels->size()) != t)
        throw ValidationError("labels length does not match series length");
    if (t < k)
        throw EmptyWindowSet("series of length " + std::to_string(t) + " is shorter than window size " +
                             std::to_string(k));

    WindowSet out;
    out.window_length = k;
    out.shift = shift;
    const auto w = window_count(t, k, shift);
    out.windows.reserve(static_cast<std::size_t>(w));
    out.start_indices.reserve(static_cast<std::size_t>(w));
    if (labels) out.window_labels.emplace();
    for (std::int64_t i = 0; i < w; ++i) {
        const Eigen::Index start = i * shift;
        out.windows.push_back(series.middleRows(start, k));
        out.start_indices.push_back(start);
        if (labels) {
            std::uint8_t any = 0;
            for (Eigen::Index s = start; s < start + k; ++s) any |= (*labels)[static_cast<std::size_t>(s)];
            out.window_labels->push_back(any);
        }
    }
    return out;
}

WindowSet WindowSet::select(const std::vector<std::size_t>& idx) const {
    WindowSet out;
    out.window_length = window_length;
    out.shift = shift;
    if (window_labels) out.window_labels.emplace();
    for (auto i : idx) {
        out.windows.push_back(windows.at(i));
        out.start_indices.push_back(start_indices.at(i));
        if (window_labels) out.window_labels->push_back((*window_labels)[i]);
    }
    return out;
}

TensorArchive WindowSet::to_archive() const {
    TensorArchive a("windows");
    a.set_meta("window_length", std::to_string(window_length));
    a.set_meta("shift", std::to_string(shift));
    const auto w = static_cast<std::uint64_t>(windows.size());
    const auto k = static_cast<std::uint64_t>(window_length);
    const auto d = static_cast<std::uint64_t>(feature_dim());
    std::vector<float> flat;
    flat.reserve(w * k * d);
    for (const auto& m : windows)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(static_cast<float>(m(r, c)));
    a.add("windows", {w, k, d}, std::move(flat));
    // Stored separately as exact integers: float32 is exact below 2^24.
    std::vector<float> starts;
    for (auto s : start_indices) {
        if (s >= (std::int64_t{1} << 24)) throw ValidationError("start index too large for archive");
        starts.push_back(static_cast<float>(s));
    }
    a.add("start_indices", {w}, std::move(starts));
    if (window_labels) {
        std::vector<float> lab(window_labels->begin(), window_labels->end());
        a.add("window_labels", {w}, std::move(lab));
    }
    return a;
}

WindowSet WindowSet::from_archive(const TensorArchive& archive) {
    if (archive.kind() != "windows") throw ValidationError("not a windows archive");
    WindowSet out;
    out.window_length = std::stoll(archive.meta("window_length"));
    out.shift = std::stoll(archive.meta("shift"));
    const auto& win = archive.get("windows");
    if (win.shape.size() != 3) throw ValidationError("windows array must be 3-D");
    const auto w = win.shape[0], k = win.shape[1], d = win.shape[2];
    if (static_cast<Eigen::Index>(k) != out.window_length) throw ValidationError("window length mismatch");
    for (std::uint64_t i = 0; i < w; ++i) {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
        for (std::uint64_t r = 0; r < k; ++r)
            for (std::uint64_t c = 0; c < d; ++c)
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = win.data[(i * k + r) * d + c];
        out.windows.push_back(std::move(m));
    }
    const auto& starts = archive.get("start_indices");
    if (starts.size() != w) throw ValidationError("start_indices length mismatch");
    for (float f : starts.data) out.start_indices.push_back(static_cast<std::int64_t>(f));
    if (archive.contains("window_labels")) {
        const auto& lab = archive.get("window_labels");
        if (lab.size() != w) throw ValidationError("window_labels length mismatch");
        Labels l;
        for (float f : lab.data) {
            if (f != 0.0f && f != 1.0f) throw ValidationError("window label not in {0,1}");
            l.push_back(static_cast<std::uint8_t>(f));
        }
        out.window_labels = std::move(l);
    }
    return out;
}

std::vector<Eigen::MatrixXd> jitter_scale(const std::vector<Eigen::MatrixXd>& batch, double sigma_jitter,
                                          double sigma_scale, std::uint64_t seed) {
    if (!(sigma_jitter >= 0.0) || !(sigma_scale >= 0.0))
        throw ValidationError("jitter/scale sigmas must be nonnegative");
    Rng rng(seed);
    std::vector<Eigen::MatrixXd> out;
    out.reserve(batch.size());
    for (const auto& x : batch) {
        Eigen::MatrixXd y(x.rows(), x.cols());
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            const double s = 1.0 + sigma_scale * rng.normal();
            for (Eigen::Index r = 0; r < x.rows(); ++r) y(r, c) = s * x(r, c) + sigma_jitter * rng.normal();
        }
        out.push_back(std::move(y));
    }
    return out;
}

}  // namespace mtsdvgan::data
