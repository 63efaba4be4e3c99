// SPDX-License-Identifier: Apache-2.0

#include "trimf/memory.hpp"

#include "trimf/errors.hpp"

namespace trimf {

Memory init_memory(MemoryKind kind, std::vector<std::string> category_names,
                   size_t h_slot, uint64_t seed) {
    if (category_names.empty() || h_slot == 0)
        throw_contract("memory needs at least one category and slot dim >= 1");
    Rng rng(seed);
    Memory mem;
    mem.kind = kind;
    mem.slots = Tensor::randn(category_names.size(), h_slot, rng, 0.0, 0.02,
                              /*requires_grad=*/true);
    mem.category_names = std::move(category_names);
    return mem;
}

Tensor read_normal(const Tensor& query, const Tensor& slots, const Tensor& form,
                   Tensor* attention_out) {
    if (query.cols() != form.rows() || form.cols() != slots.cols())
        throw_dim("read_normal shape mismatch: query " +
                  std::to_string(query.cols()) + ", form " +
                  std::to_string(form.rows()) + "x" +
                  std::to_string(form.cols()) + ", slot " +
                  std::to_string(slots.cols()));
    Tensor scores = matmul(matmul(query, form), transpose(slots));
    Tensor attn = softmax_rows(scores);
    if (attention_out) *attention_out = attn;
    return matmul(attn, slots);
}

InverseRead read_inverse(const Tensor& seq, const Tensor& slots,
                         const Tensor& form) {
    if (seq.rows() == 0) throw_contract("read_inverse on an empty sequence");
    if (seq.cols() != form.rows() || form.cols() != slots.cols())
        throw_dim("read_inverse shape mismatch");
    // slot-wise softmax over positions, then summed over slots
    Tensor scores = matmul(slots, transpose(matmul(seq, form)));  // n_cat x m
    Tensor attn = softmax_rows(scores);
    Tensor weights = transpose(reduce(ReduceKind::Sum, attn, 0));  // m x 1
    InverseRead out;
    out.weights = weights;
    out.scaled_seq = scale_rows(seq, weights);
    return out;
}

void memory_write(Memory& mem, const std::vector<double>& instance,
                  const Tensor& form, const std::vector<double>& logit_grad,
                  double lr) {
    if (lr <= 0.0) throw_contract("memory write needs lr > 0");
    if (instance.size() != form.rows())
        throw_dim("memory write instance length mismatch");
    if (logit_grad.size() != mem.slot_count())
        throw_dim("memory write logit_grad length mismatch");
    size_t h = mem.slot_size();
    // projection = instance * W, 1 x h_slot
    std::vector<double> proj(h, 0.0);
    const auto& w = form.values();
    for (size_t i = 0; i < instance.size(); ++i) {
        double vi = instance[i];
        if (vi == 0.0) continue;
        for (size_t j = 0; j < h; ++j) proj[j] += vi * w[i * h + j];
    }
    auto& slots = mem.slots.mutable_values();
    for (size_t c = 0; c < mem.slot_count(); ++c) {
        double g = logit_grad[c];
        if (g == 0.0) continue;
        for (size_t j = 0; j < h; ++j) slots[c * h + j] -= proj[j] * g * lr;
    }
}

}  // namespace trimf
