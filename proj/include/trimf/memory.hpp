// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trimf/optim.hpp"
#include "trimf/tensor.hpp"

namespace trimf {

enum class MemoryKind { Entity, Relation };

// One learned slot per category. Slots are state, not optimizer parameters:
// they change through the write process, and in stage 2 optionally through
// backprop applied by the training loop.
struct Memory {
    Tensor slots;  // n_cat x h_slot leaf
    MemoryKind kind = MemoryKind::Entity;
    std::vector<std::string> category_names;

    size_t slot_count() const { return slots.rows(); }
    size_t slot_size() const { return slots.cols(); }
};

// Slots i.i.d. Normal(0, 0.02).
Memory init_memory(MemoryKind kind, std::vector<std::string> category_names,
                   size_t h_slot, uint64_t seed);

// Attention with the input as query over memory slots:
// softmax_rows(query * W * slots^T) * slots. Optionally exposes the
// attention matrix (q x n_cat).
Tensor read_normal(const Tensor& query, const Tensor& slots, const Tensor& form,
                   Tensor* attention_out = nullptr);

struct InverseRead {
    Tensor weights;     // m x 1, sums to slot count
    Tensor scaled_seq;  // m x h_in
};

// Attention with slots as queries over sequence positions; per-position
// weights are the column sums of the slot-wise softmax and rescale the
// sequence row-wise.
InverseRead read_inverse(const Tensor& seq, const Tensor& slots,
                         const Tensor& form);

// Gradient-driven write: slot_c -= (instance * W) * logit_grad[c] * lr.
// Pure state mutation, outside the autodiff graph.
void memory_write(Memory& mem, const std::vector<double>& instance,
                  const Tensor& form, const std::vector<double>& logit_grad,
                  double lr);

}  // namespace trimf
