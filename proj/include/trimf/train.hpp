// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "trimf/model.hpp"

namespace trimf {

struct EpochMetrics {
    int stage = 1;          // 1 or 2
    int64_t epoch = 0;      // global epoch index, 0-based
    double mean_loss = 0.0; // mean batch loss over the epoch
    double last_lr = 0.0;   // scheduled lr at the last step of the epoch
};

struct TrainResult {
    std::vector<EpochMetrics> history;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

// Two-stage training. Stage 1 trains the classifier, graph, and encoder
// groups with flows and the trigger sensor bypassed; memory changes only
// through the write process. Stage 2 enables the remaining groups and, per
// the gradient-flow flags, lets backprop reach the memory slots (applied as
// a plain gradient step after the optimizer update). The lr schedule spans
// both stages. Fails fast when the smoothed loss does not decrease over the
// first five epochs.
TrainResult train_two_stage(Model& model, const Corpus& corpus,
                            const EpochCallback& on_epoch = nullptr);

}  // namespace trimf
