// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "trimf/rng.hpp"
#include "trimf/tensor.hpp"

namespace trimf::testing {

// Central finite-difference check of d(loss)/d(param). `make_loss` must
// rebuild the scalar loss from scratch (deterministically) on every call.
// Checks up to `max_entries` entries per tensor and returns the worst
// relative error.
inline double max_rel_grad_error(Tensor& param,
                                 const std::function<Tensor()>& make_loss,
                                 size_t max_entries = 8, double h = 1e-5) {
    param.zero_grad();
    Tensor loss = make_loss();
    loss.backward();
    std::vector<double> analytic = param.grad();
    param.zero_grad();

    size_t n = analytic.size();
    size_t stride = n <= max_entries ? 1 : n / max_entries;
    double worst = 0.0;
    std::vector<double>& vals = param.mutable_values();
    for (size_t i = 0; i < n; i += stride) {
        double saved = vals[i];
        vals[i] = saved + h;
        double up = make_loss().item();
        vals[i] = saved - h;
        double down = make_loss().item();
        vals[i] = saved;
        double numeric = (up - down) / (2.0 * h);
        double denom = std::max({std::fabs(analytic[i]), std::fabs(numeric), 1e-4});
        worst = std::max(worst, std::fabs(analytic[i] - numeric) / denom);
    }
    return worst;
}

inline Tensor random_tensor(size_t rows, size_t cols, Rng& rng,
                            bool requires_grad = true, double std = 1.0) {
    return Tensor::randn(rows, cols, rng, 0.0, std, requires_grad);
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
    double worst = 0.0;
    for (size_t i = 0; i < a.values().size(); ++i)
        worst = std::max(worst, std::fabs(a.values()[i] - b.values()[i]));
    return worst;
}

}  // namespace trimf::testing
