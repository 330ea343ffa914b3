#include "mtsdvgan/data/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mtsdvgan/error.hpp"

namespace mtsdvgan::data {

NormalizerState fit_normalizer(const RawSeries& train) {
    train.validate();
    NormalizerState s;
    s.per_feature_max = train.values.colwise().maxCoeff().transpose();
    for (Eigen::Index c = 0; c < s.per_feature_max.size(); ++c) {
        const double m = s.per_feature_max(c);
        if (!std::isfinite(m) || m == 0.0) {
            const std::string name =
                train.feature_names.empty() ? std::to_string(c) : train.feature_names[static_cast<std::size_t>(c)];
            throw DegenerateColumn("column '" + name + "' has maximum " + std::to_string(m) +
                                   "; cannot normalize");
        }
    }
    return s;
}

RawSeries apply_normalizer(const NormalizerState& state, const RawSeries& series) {
    if (state.per_feature_max.size() != series.features())
        throw ValidationError("normalizer expects " + std::to_string(state.per_feature_max.size()) +
                              " features, series has " + std::to_string(series.features()));
    RawSeries out = series;
    for (Eigen::Index c = 0; c < out.features(); ++c) {
        const double m = state.per_feature_max(c);
        // Written as 2*x/max so x == max maps to exactly 1.
        out.values.col(c) = (2.0 * series.values.col(c).array() / m - 1.0).matrix();
    }
    return out;
}

PcaState fit_pca(const RawSeries& train, Eigen::Index d) {
    train.validate();
    const Eigen::Index n = train.features();
    const Eigen::Index t = train.length();
    if (d < 1 || d > n)
        throw ValidationError("component count " + std::to_string(d) + " outside [1, " + std::to_string(n) + "]");
    if (t < 2) throw ValidationError("PCA needs at least 2 rows");

    PcaState s;
    s.mean = train.values.colwise().mean().transpose();
    const Eigen::MatrixXd centered = train.values.rowwise() - s.mean.transpose();
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(t - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw NumericError("PCA eigendecomposition failed");
    const Eigen::VectorXd& values = eig.eigenvalues();   // ascending
    const Eigen::MatrixXd& vectors = eig.eigenvectors();

    const double top = std::max(values(n - 1), 0.0);
    const double tol = std::max(top, 1.0) * 1e-12 * static_cast<double>(n);

    s.components.resize(d, n);
    s.explained_variance.resize(d);
    for (Eigen::Index r = 0; r < d; ++r) {
        const Eigen::Index src = n - 1 - r;
        Eigen::VectorXd v = vectors.col(src);
        // Sign convention: largest-magnitude entry positive.
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        s.components.row(r) = v.transpose();
        s.explained_variance(r) = values(src) > tol ? values(src) : 0.0;
    }
    return s;
}

Eigen::MatrixXd apply_pca(const PcaState& state, const Eigen::MatrixXd& values) {
    if (values.cols() != state.mean.size())
        throw ValidationError("PCA expects " + std::to_string(state.mean.size()) + " features, got " +
                              std::to_string(values.cols()));
    return (values.rowwise() - state.mean.transpose()) * state.components.transpose();
}

Eigen::MatrixXd reconstruct_pca(const PcaState& state, const Eigen::MatrixXd& reduced) {
    if (reduced.cols() != state.dims()) throw ValidationError("reduced series has wrong dimension");
    return (reduced * state.components).rowwise() + state.mean.transpose();
}

Eigen::MatrixXd PreprocessState::transform(const RawSeries& series) const {
    return apply_pca(pca, apply_normalizer(normalizer, series).values);
}

namespace {

std::vector<double> row_major(const Eigen::MatrixXd& m) {
    std::vector<double> out(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
    return out;
}

Eigen::VectorXd vector_of(const ArchiveArray& a, std::uint64_t expected) {
    if (a.shape.size() != 1 || a.shape[0] != expected)
        throw ValidationError("array '" + a.name + "' has unexpected shape");
    Eigen::VectorXd v(static_cast<Eigen::Index>(expected));
    for (std::uint64_t i = 0; i < expected; ++i) v(static_cast<Eigen::Index>(i)) = a.data[i];
    return v;
}

}  // namespace

TensorArchive PreprocessState::to_archive() const {
    TensorArchive a("preprocess");
    std::ostringstream names;
    for (std::size_t i = 0; i < feature_names.size(); ++i) names << (i ? "," : "") << feature_names[i];
    a.set_meta("feature_names", names.str());
    const auto n = static_cast<std::uint64_t>(normalizer.per_feature_max.size());
    const auto d = static_cast<std::uint64_t>(pca.dims());
    a.add("normalizer.per_feature_max", {n},
          std::span<const double>(normalizer.per_feature_max.data(), normalizer.per_feature_max.size()));
    a.add("pca.mean", {n}, std::span<const double>(pca.mean.data(), pca.mean.size()));
    const auto comps = row_major(pca.components);
    a.add("pca.components", {d, n}, std::span<const double>(comps));
    a.add("pca.explained_variance", {d},
          std::span<const double>(pca.explained_variance.data(), pca.explained_variance.size()));
    return a;
}

PreprocessState PreprocessState::from_archive(const TensorArchive& archive) {
    if (archive.kind() != "preprocess") throw ValidationError("not a preprocess archive");
    PreprocessState s;
    const auto& mx = archive.get("normalizer.per_feature_max");
    if (mx.shape.size() != 1) throw ValidationError("bad normalizer shape");
    const auto n = mx.shape[0];
    s.normalizer.per_feature_max = vector_of(mx, n);
    s.pca.mean = vector_of(archive.get("pca.mean"), n);
    const auto& comps = archive.get("pca.components");
    if (comps.shape.size() != 2 || comps.shape[1] != n) throw ValidationError("bad pca.components shape");
    const auto d = comps.shape[0];
    s.pca.components.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
    for (std::uint64_t r = 0; r < d; ++r)
        for (std::uint64_t c = 0; c < n; ++c)
            s.pca.components(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = comps.data[r * n + c];
    s.pca.explained_variance = vector_of(archive.get("pca.explained_variance"), d);
    const auto& names = archive.meta("feature_names");
    std::string cur;
    for (char ch : names) {
        if (ch == ',') {
            s.feature_names.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!names.empty()) s.feature_names.push_back(cur);
    return s;
}

}  // namespace mtsdvgan::data
