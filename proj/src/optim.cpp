// SPDX-License-Identifier: Apache-2.0

#include "trimf/optim.hpp"

#include <algorithm>
#include <cmath>

#include "trimf/errors.hpp"

namespace trimf {

double scheduled_lr(int64_t step, int64_t warmup_steps, int64_t total_steps,
                    double peak_lr) {
    if (warmup_steps <= 0 || warmup_steps >= total_steps)
        throw_contract("scheduled_lr requires 0 < warmup_steps < total_steps");
    step = std::clamp<int64_t>(step, 0, total_steps);
    if (step <= warmup_steps)
        return peak_lr * double(step) / double(warmup_steps);
    return peak_lr * double(total_steps - step) /
           double(total_steps - warmup_steps);
}

void Adam::step(const std::vector<Parameter*>& params, double lr) {
    ++step_;
    double bc1 = 1.0 - std::pow(beta1_, double(step_));
    double bc2 = 1.0 - std::pow(beta2_, double(step_));
    for (Parameter* p : params) {
        if (!p->tensor.has_grad())
            throw_contract("adam step on parameter without grad: " + p->name);
        auto& vals = p->tensor.mutable_values();
        const auto& g = p->tensor.grad();
        auto& mom = state_[p->name];
        if (mom.m.size() != vals.size()) {
            mom.m.assign(vals.size(), 0.0);
            mom.v.assign(vals.size(), 0.0);
        }
        for (size_t i = 0; i < vals.size(); ++i) {
            mom.m[i] = beta1_ * mom.m[i] + (1.0 - beta1_) * g[i];
            mom.v[i] = beta2_ * mom.v[i] + (1.0 - beta2_) * g[i] * g[i];
            double mhat = mom.m[i] / bc1;
            double vhat = mom.v[i] / bc2;
            vals[i] -= lr * mhat / (std::sqrt(vhat) + eps_);
        }
        p->tensor.zero_grad();
    }
}

}  // namespace trimf
