// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "trimf/tensor.hpp"

namespace trimf {

// Named trainable tensor. The group decides stage-1 trainability.
struct Parameter {
    std::string name;
    std::string group;  // encoder | memory | mfa | graph | trigger | classifier
    Tensor tensor;
};

// Linear ramp 0 -> peak over warmup steps, then linear decay peak -> 0.
double scheduled_lr(int64_t step, int64_t warmup_steps, int64_t total_steps,
                    double peak_lr);

// Adaptive-moment optimizer over a parameter set. Moments are keyed by
// parameter name so that the active subset may change between stages.
class Adam {
public:
    explicit Adam(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : beta1_(beta1), beta2_(beta2), eps_(eps) {}

    // Applies one update with the given learning rate, then zeroes grads.
    // Every parameter must have a populated grad.
    void step(const std::vector<Parameter*>& params, double lr);

    int64_t step_count() const { return step_; }

private:
    struct Moments {
        std::vector<double> m, v;
    };
    double beta1_, beta2_, eps_;
    int64_t step_ = 0;
    std::unordered_map<std::string, Moments> state_;
};

}  // namespace trimf
