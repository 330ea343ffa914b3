#pragma once

#include <cmath>
#include <string>

#include "mtsdvgan/error.hpp"
#include "mtsdvgan/nn/model.hpp"

namespace mtsdvgan::train {

/// RMSProp over any parameter struct with `for_each`:
///   acc <- rho * acc + (1 - rho) * g^2
///   p   <- p - lr * g / sqrt(acc + epsilon)
template <class P>
class RmsProp {
public:
    RmsProp() = default;
    RmsProp(const P& like, double rho = 0.9, double epsilon = 1e-8)
        : acc_(nn::zeros_like_params(like)), rho_(rho), epsilon_(epsilon) {}

    void step(P& params, const P& grads, double lr) {
        auto p = nn::flat_views(params);
        auto g = nn::flat_views(grads);
        auto a = nn::flat_views(acc_);
        if (p.size() != g.size() || p.size() != a.size()) throw ValidationError("rmsprop: structure mismatch");
        using S = typename P::Scalar;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i].values.size() != g[i].values.size() || p[i].values.size() != a[i].values.size())
                throw ValidationError("rmsprop: shape mismatch in '" + p[i].name + "'");
            for (std::size_t j = 0; j < g[i].values.size(); ++j)
                if (!std::isfinite(static_cast<double>(g[i].values[j])))
                    throw NumericError("rmsprop: non-finite gradient in '" + g[i].name + "'");
        }
        const S rho = static_cast<S>(rho_);
        const S eps = static_cast<S>(epsilon_);
        const S rate = static_cast<S>(lr);
        for (std::size_t i = 0; i < p.size(); ++i) {
            auto& pv = p[i].values;
            const auto& gv = g[i].values;
            auto& av = a[i].values;
            for (std::size_t j = 0; j < pv.size(); ++j) {
                av[j] = rho * av[j] + (S(1) - rho) * gv[j] * gv[j];
                pv[j] -= rate * gv[j] / std::sqrt(av[j] + eps);
            }
        }
    }

    const P& accumulator() const noexcept { return acc_; }
    P& accumulator() noexcept { return acc_; }

private:
    P acc_;
    double rho_ = 0.9;
    double epsilon_ = 1e-8;
};

}  // namespace mtsdvgan::train
