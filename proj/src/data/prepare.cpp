#include "mtsdvgan/data/prepare.hpp"

#include <cmath>
#include <numeric>

#include "mtsdvgan/error.hpp"

namespace mtsdvgan::data {

std::pair<WindowSet, WindowSet> split_tail(const WindowSet& windows, double fraction) {
    if (!(fraction >= 0 && fraction < 1)) throw ValidationError("validation_fraction must lie in [0, 1)");
    const std::size_t n = windows.size();
    const auto m = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (m == 0) return {windows, windows};
    if (m >= n) throw EmptyWindowSet("split: no training windows left after holding out the reference split");
    std::vector<std::size_t> head(n - m), tail(m);
    std::iota(head.begin(), head.end(), std::size_t{0});
    std::iota(tail.begin(), tail.end(), n - m);
    return {windows.select(head), windows.select(tail)};
}

PreparedData prepare(const RawSeries& train, const std::optional<RawSeries>& eval, const PrepareOptions& o) {
    train.validate();
    if (eval && eval->features() != train.features())
        throw ValidationError("evaluation series has " + std::to_string(eval->features()) + " features, training has " +
                              std::to_string(train.features()));
    RawSeries fit = train;
    if (train.labels) {
        std::vector<Eigen::Index> rows;
        for (Eigen::Index t = 0; t < train.length(); ++t)
            if (!(*train.labels)[static_cast<std::size_t>(t)]) rows.push_back(t);
        if (rows.size() < 2) throw ValidationError("training series has fewer than two normal rows");
        fit.values = train.values(rows, Eigen::all);
        fit.labels.reset();
    }
    PreparedData p;
    p.state.normalizer = fit_normalizer(fit);
    p.state.pca = fit_pca(apply_normalizer(p.state.normalizer, fit), o.signal_number);
    p.state.feature_names = train.feature_names;

    auto all = make_windows(p.state.transform(train), train.labels, o.window_size, o.shift);
    if (all.window_labels) {
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < all.size(); ++i)
            if (!(*all.window_labels)[i]) keep.push_back(i);
        if (keep.empty()) throw EmptyWindowSet("every training window contains an anomalous timestep");
        all = all.select(keep);
        all.window_labels.reset();
    }
    std::tie(p.train, p.reference) = split_tail(all, o.validation_fraction);
    if (eval) p.eval = make_windows(p.state.transform(*eval), eval->labels, o.window_size, o.shift);
    return p;
}

}  // namespace mtsdvgan::data
