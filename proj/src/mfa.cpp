// SPDX-License-Identifier: Apache-2.0

#include "trimf/mfa.hpp"

#include <cmath>

#include "trimf/errors.hpp"

namespace trimf {

MfaForms init_mfa_forms(size_t h, size_t h_me, size_t h_mr, uint64_t seed) {
    Rng rng(seed);
    double std_e = 1.0 / std::sqrt(double(h));
    auto mk = [&](const char* name, size_t cols) {
        return Parameter{std::string("mfa.") + name, "mfa",
                         Tensor::randn(h, cols, rng, 0.0, std_e, true)};
    };
    return MfaForms{mk("subword_entity", h_me), mk("subword_relation", h_mr),
                    mk("word_entity", h_me), mk("word_relation", h_mr)};
}

Tensor mfa_single(const Tensor& seq, const Tensor& slots, const Tensor& form,
                  std::vector<double>* weights_out) {
    InverseRead r = read_inverse(seq, slots, form);
    if (weights_out) *weights_out = r.weights.values();
    return r.scaled_seq;
}

Tensor mfa_multi(const Tensor& seq, const Tensor& entity_slots,
                 const Tensor& relation_slots, const Tensor& entity_form,
                 const Tensor& relation_form, bool use_entity, bool use_relation,
                 const std::string& level,
                 std::vector<AttentionTrace>* traces) {
    if (!use_entity && !use_relation) return seq;
    Tensor out;
    int enabled = 0;
    auto run = [&](const Tensor& slots, const Tensor& form,
                   const char* memory) {
        std::vector<double> weights;
        Tensor flow = mfa_single(seq, slots, form,
                                 traces ? &weights : nullptr);
        if (traces) traces->push_back({level, memory, std::move(weights)});
        out = enabled == 0 ? flow : add(out, flow);
        ++enabled;
    };
    if (use_relation) run(relation_slots, relation_form, "relation");
    if (use_entity) run(entity_slots, entity_form, "entity");
    return enabled == 2 ? scale(out, 0.5) : out;
}

MultilevelOut apply_multilevel(
    const Tensor& e_d, const SubwordDecomposition& sub,
    const Tensor& subword_entity_slots, const Tensor& subword_relation_slots,
    const Tensor& word_entity_slots, const Tensor& word_relation_slots,
    const MfaForms& forms, const MfaConfig& cfg,
    std::vector<AttentionTrace>* traces) {
    MultilevelOut out;
    out.e_d_bar =
        cfg.subword_level
            ? mfa_multi(e_d, subword_entity_slots, subword_relation_slots,
                        forms.subword_entity.tensor,
                        forms.subword_relation.tensor, cfg.entity_memory,
                        cfg.relation_memory, "subword", traces)
            : e_d;
    Tensor e_w = pool_words(out.e_d_bar, sub.spans_over_subwords());
    out.e_w_bar =
        cfg.word_level
            ? mfa_multi(e_w, word_entity_slots, word_relation_slots,
                        forms.word_entity.tensor, forms.word_relation.tensor,
                        cfg.entity_memory, cfg.relation_memory, "word", traces)
            : e_w;
    return out;
}

}  // namespace trimf
