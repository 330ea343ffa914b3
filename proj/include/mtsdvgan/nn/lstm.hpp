#pragma once

#include <string>
#include <vector>

#include "mtsdvgan/error.hpp"
#include "mtsdvgan/nn/tensor.hpp"

namespace mtsdvgan::nn {

/// Row-block order of the stacked gate matrices.
enum class Gate : int { forget = 0, input = 1, output = 2, candidate = 3 };

inline const char* gate_name(Gate g) {
    switch (g) {
        case Gate::forget: return "forget";
        case Gate::input: return "input";
        case Gate::output: return "output";
        case Gate::candidate: return "candidate";
    }
    return "?";
}

/// One LSTM layer with the four gates stacked row-wise (forget, input,
/// output, candidate), each block `hidden` rows tall.
template <class S>
struct LstmLayer {
    using Scalar = S;
    Mat<S> w_input;       // 4H x in
    Mat<S> w_recurrent;   // 4H x H
    Vec<S> bias;          // 4H

    LstmLayer() = default;
    LstmLayer(Index in, Index hidden)
        : w_input(Mat<S>::Zero(4 * hidden, in)),
          w_recurrent(Mat<S>::Zero(4 * hidden, hidden)),
          bias(Vec<S>::Zero(4 * hidden)) {}

    Index hidden() const noexcept { return w_recurrent.cols(); }
    Index input_size() const noexcept { return w_input.cols(); }

    template <class F>
    void for_each(const std::string& prefix, F&& f) {
        f(prefix + ".W", w_input);
        f(prefix + ".U", w_recurrent);
        f(prefix + ".b", bias);
    }
    template <class F>
    void for_each(const std::string& prefix, F&& f) const {
        f(prefix + ".W", w_input);
        f(prefix + ".U", w_recurrent);
        f(prefix + ".b", bias);
    }
};

/// Values saved by a forward step for the backward pass.
template <class S>
struct CellCache {
    Mat<S> x, h_prev, c_prev;
    Mat<S> gates;    // 4H x B, post-activation (f, i, o, candidate)
    Mat<S> tanh_c;   // H x B
};

/// One step over a batch (columns):
///   f, i, o = sigmoid(W x + U h + b), candidate = tanh(W x + U h + b)
///   c = f * c_prev + i * candidate,  h = o * tanh(c)
template <class S>
void lstm_cell_step(const LstmLayer<S>& p, const Mat<S>& x, const Mat<S>& h_prev, const Mat<S>& c_prev, Mat<S>& h,
                    Mat<S>& c, CellCache<S>* cache = nullptr) {
    const Index hd = p.hidden();
    if (x.rows() != p.input_size() || h_prev.rows() != hd || c_prev.rows() != hd || x.cols() != h_prev.cols() ||
        x.cols() != c_prev.cols())
        throw ValidationError("lstm_cell_step: shape mismatch");

    Mat<S> gates = p.w_input * x;
    gates.noalias() += p.w_recurrent * h_prev;
    gates.colwise() += p.bias;
    gates.topRows(3 * hd) = sigmoid(gates.topRows(3 * hd).array()).matrix();
    gates.bottomRows(hd) = gates.bottomRows(hd).array().tanh().matrix();

    c = (gates.topRows(hd).array() * c_prev.array() + gates.middleRows(hd, hd).array() * gates.bottomRows(hd).array())
            .matrix();
    Mat<S> tc = c.array().tanh().matrix();
    h = (gates.middleRows(2 * hd, hd).array() * tc.array()).matrix();

    if (cache) {
        cache->x = x;
        cache->h_prev = h_prev;
        cache->c_prev = c_prev;
        cache->gates = std::move(gates);
        cache->tanh_c = std::move(tc);
    }
}

/// Backward through one step. `dh` is d(loss)/d(h_t) from every consumer,
/// `dc` the gradient reaching c_t from step t + 1. Outputs gradients for the
/// previous state and (when non-null) the input; parameter gradients are
/// accumulated into `grad` when non-null.
template <class S>
void lstm_cell_backward(const LstmLayer<S>& p, const CellCache<S>& cache, const Mat<S>& dh, const Mat<S>& dc,
                        LstmLayer<S>* grad, Mat<S>* dx, Mat<S>& dh_prev, Mat<S>& dc_prev) {
    const Index hd = p.hidden();
    const auto f = cache.gates.topRows(hd).array();
    const auto i = cache.gates.middleRows(hd, hd).array();
    const auto o = cache.gates.middleRows(2 * hd, hd).array();
    const auto g = cache.gates.bottomRows(hd).array();
    const auto tc = cache.tanh_c.array();

    const Mat<S> dc_total = (dc.array() + dh.array() * o * (S(1) - tc.square())).matrix();
    Mat<S> dpre(4 * hd, dh.cols());
    dpre.topRows(hd) = (dc_total.array() * cache.c_prev.array() * f * (S(1) - f)).matrix();
    dpre.middleRows(hd, hd) = (dc_total.array() * g * i * (S(1) - i)).matrix();
    dpre.middleRows(2 * hd, hd) = (dh.array() * tc * o * (S(1) - o)).matrix();
    dpre.bottomRows(hd) = (dc_total.array() * i * (S(1) - g.square())).matrix();

    if (grad) {
        grad->w_input.noalias() += dpre * cache.x.transpose();
        grad->w_recurrent.noalias() += dpre * cache.h_prev.transpose();
        grad->bias += dpre.rowwise().sum();
    }
    if (dx) *dx = p.w_input.transpose() * dpre;
    dh_prev = p.w_recurrent.transpose() * dpre;
    dc_prev = (dc_total.array() * f).matrix();
}

/// Layers applied bottom to top at every timestep.
template <class S>
struct StackedLstm {
    using Scalar = S;
    std::vector<LstmLayer<S>> layers;

    StackedLstm() = default;
    StackedLstm(Index in, Index hidden, Index depth) {
        if (depth < 1 || hidden < 1 || in < 1) throw ValidationError("LSTM stack needs depth, hidden, input >= 1");
        for (Index l = 0; l < depth; ++l) layers.emplace_back(l == 0 ? in : hidden, hidden);
    }

    Index depth() const noexcept { return static_cast<Index>(layers.size()); }
    Index hidden() const noexcept { return layers.empty() ? 0 : layers.back().hidden(); }
    Index input_size() const noexcept { return layers.empty() ? 0 : layers.front().input_size(); }

    template <class F>
    void for_each(const std::string& prefix, F&& f) {
        for (std::size_t l = 0; l < layers.size(); ++l) layers[l].for_each(prefix + ".lstm" + std::to_string(l), f);
    }
    template <class F>
    void for_each(const std::string& prefix, F&& f) const {
        for (std::size_t l = 0; l < layers.size(); ++l) layers[l].for_each(prefix + ".lstm" + std::to_string(l), f);
    }
};

/// Per-layer recurrent state.
template <class S>
struct StackState {
    std::vector<Mat<S>> h, c;

    static StackState zeros(const StackedLstm<S>& stack, Index batch) {
        StackState s;
        for (const auto& l : stack.layers) {
            s.h.push_back(Mat<S>::Zero(l.hidden(), batch));
            s.c.push_back(Mat<S>::Zero(l.hidden(), batch));
        }
        return s;
    }
};

/// Caches indexed [t][layer].
template <class S>
using StackCache = std::vector<std::vector<CellCache<S>>>;

/// Advances every layer by one timestep; returns the top hidden state.
template <class S>
const Mat<S>& stack_step(const StackedLstm<S>& stack, const Mat<S>& x, StackState<S>& state,
                         std::vector<CellCache<S>>* cache) {
    if (cache) cache->resize(stack.layers.size());
    const Mat<S>* in = &x;
    for (std::size_t l = 0; l < stack.layers.size(); ++l) {
        Mat<S> h, c;
        lstm_cell_step(stack.layers[l], *in, state.h[l], state.c[l], h, c, cache ? &(*cache)[l] : nullptr);
        state.h[l] = std::move(h);
        state.c[l] = std::move(c);
        in = &state.h[l];
    }
    return state.h.back();
}

/// Backward carry between timesteps.
template <class S>
struct StackCarry {
    std::vector<Mat<S>> dh, dc;

    static StackCarry zeros(const StackedLstm<S>& stack, Index batch) {
        StackCarry s;
        for (const auto& l : stack.layers) {
            s.dh.push_back(Mat<S>::Zero(l.hidden(), batch));
            s.dc.push_back(Mat<S>::Zero(l.hidden(), batch));
        }
        return s;
    }
};

/// Backward through one timestep of the whole stack, top layer first.
/// `dh_top` is the external gradient on the top hidden state at this step.
/// Returns d(loss)/d(input at this step) when `want_dx`.
template <class S>
Mat<S> stack_step_backward(const StackedLstm<S>& stack, const std::vector<CellCache<S>>& cache, const Mat<S>& dh_top,
                           StackCarry<S>& carry, StackedLstm<S>* grad, bool want_dx) {
    Mat<S> ext = dh_top;
    Mat<S> dx;
    for (std::size_t li = stack.layers.size(); li-- > 0;) {
        Mat<S> dh = ext + carry.dh[li];
        Mat<S> dh_prev, dc_prev;
        const bool need_dx = li > 0 || want_dx;
        lstm_cell_backward(stack.layers[li], cache[li], dh, carry.dc[li], grad ? &grad->layers[li] : nullptr,
                           need_dx ? &dx : nullptr, dh_prev, dc_prev);
        carry.dh[li] = std::move(dh_prev);
        carry.dc[li] = std::move(dc_prev);
        if (li > 0) ext = dx;
    }
    return want_dx ? dx : Mat<S>();
}

}  // namespace mtsdvgan::nn
