// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "trimf/encoder.hpp"
#include "trimf/memory.hpp"

namespace trimf {

struct MfaConfig {
    bool subword_level = true;
    bool word_level = true;
    bool entity_memory = true;
    bool relation_memory = true;
};

// One bilinear form per (level, memory) pairing.
struct MfaForms {
    Parameter subword_entity;    // h x h_me
    Parameter subword_relation;  // h x h_mr
    Parameter word_entity;
    Parameter word_relation;

    void collect(std::vector<Parameter*>& out) {
        out.push_back(&subword_entity);
        out.push_back(&subword_relation);
        out.push_back(&word_entity);
        out.push_back(&word_relation);
    }
};

MfaForms init_mfa_forms(size_t h, size_t h_me, size_t h_mr, uint64_t seed);

// One captured inverse-read weight vector, for the attention dump.
struct AttentionTrace {
    std::string level;   // "subword" | "word"
    std::string memory;  // "entity" | "relation"
    std::vector<double> weights;
};

// Single memory flow: the inverse-read scaled sequence.
Tensor mfa_single(const Tensor& seq, const Tensor& slots, const Tensor& form,
                  std::vector<double>* weights_out = nullptr);

// Mean of the enabled single-memory flows; identity when none enabled.
Tensor mfa_multi(const Tensor& seq, const Tensor& entity_slots,
                 const Tensor& relation_slots, const Tensor& entity_form,
                 const Tensor& relation_form, bool use_entity, bool use_relation,
                 const std::string& level,
                 std::vector<AttentionTrace>* traces = nullptr);

struct MultilevelOut {
    Tensor e_d_bar;  // m x h
    Tensor e_w_bar;  // n x h
};

// Subword-level flow, f_w pooling, then word-level flow. Slots passed per
// level so the caller can detach them under gradient-flow ablations.
MultilevelOut apply_multilevel(
    const Tensor& e_d, const SubwordDecomposition& sub,
    const Tensor& subword_entity_slots, const Tensor& subword_relation_slots,
    const Tensor& word_entity_slots, const Tensor& word_relation_slots,
    const MfaForms& forms, const MfaConfig& cfg,
    std::vector<AttentionTrace>* traces = nullptr);

}  // namespace trimf
