#pragma once

#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

namespace mtsdvgan::nn {

using Index = Eigen::Index;

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

/// Batched sequence: one (features x batch) matrix per timestep.
template <class S>
using Sequence = std::vector<Mat<S>>;

/// out = weight * in + bias, applied column-wise over a batch.
template <class S>
struct Affine {
    using Scalar = S;
    Mat<S> weight;   // out x in
    Vec<S> bias;     // out

    Affine() = default;
    Affine(Index in, Index out) : weight(Mat<S>::Zero(out, in)), bias(Vec<S>::Zero(out)) {}

    Index in_size() const noexcept { return weight.cols(); }
    Index out_size() const noexcept { return weight.rows(); }

    Mat<S> operator()(const Mat<S>& in) const {
        Mat<S> out = weight * in;
        out.colwise() += bias;
        return out;
    }

    /// Accumulates parameter gradients into `grad` (when non-null) and
    /// returns d(loss)/d(in).
    Mat<S> backward(const Mat<S>& in, const Mat<S>& dout, Affine* grad) const {
        if (grad) {
            grad->weight.noalias() += dout * in.transpose();
            grad->bias += dout.rowwise().sum();
        }
        return weight.transpose() * dout;
    }

    template <class F>
    void for_each(const std::string& prefix, F&& f) {
        f(prefix + ".W", weight);
        f(prefix + ".b", bias);
    }
    template <class F>
    void for_each(const std::string& prefix, F&& f) const {
        f(prefix + ".W", weight);
        f(prefix + ".b", bias);
    }
};

/// Flat view of one parameter array.
template <class T>
struct NamedSpan {
    std::string name;
    std::span<T> values;
    Index rows = 0;
    Index cols = 0;
};

/// All parameter arrays of `params` in visitation order. Const input gives
/// read-only spans.
template <class P>
auto flat_views(P& params, const std::string& prefix = {}) {
    using Scalar = typename std::remove_cvref_t<decltype(params)>::Scalar;
    using T = std::conditional_t<std::is_const_v<P>, const Scalar, Scalar>;
    std::vector<NamedSpan<T>> out;
    params.for_each(prefix, [&](const std::string& name, auto& t) {
        out.push_back({name, std::span<T>(t.data(), static_cast<std::size_t>(t.size())), t.rows(), t.cols()});
    });
    return out;
}

/// Elementwise logistic function.
template <class Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& a) {
    using S = typename Derived::Scalar;
    return (S(1) + (-a).exp()).inverse();
}

template <class S>
Sequence<S> zeros_like(const Sequence<S>& seq) {
    Sequence<S> out;
    out.reserve(seq.size());
    for (const auto& m : seq) out.push_back(Mat<S>::Zero(m.rows(), m.cols()));
    return out;
}

}  // namespace mtsdvgan::nn
