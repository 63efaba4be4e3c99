// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace trimf {

// Every hyperparameter and ablation switch. JSON keys mirror field names;
// unknown keys are hard errors.
struct TrainConfig {
    // schedule
    int64_t stage1_epochs = 18;
    int64_t stage2_epochs = 12;
    int64_t batch_size = 8;
    double peak_lr = 5e-5;
    double warmup_fraction = 0.1;
    double dropout = 0.5;

    // sizes
    int64_t hidden = 64;
    int64_t encoder_layers = 2;
    int64_t encoder_heads = 4;
    int64_t memory_slot_size = 64;
    int64_t width_embed_dim = 25;
    int64_t max_span_size = 10;
    int64_t vocab_size = 2000;
    int64_t semantic_sample_k = 4;

    // candidates and decoding
    int64_t neg_entity_count = 100;
    int64_t neg_relation_count = 100;
    double relation_threshold = 0.5;

    // ablation switches
    bool mfa_subword_level = true;
    bool mfa_word_level = true;
    bool mfa_entity_memory = true;
    bool mfa_relation_memory = true;
    bool enable_trigger_sensor = true;
    std::string fusion_mode = "weighted";

    // stage-2 gradient flow into memory slots
    bool trigger_sensor_grad = true;
    bool subword_mfa_grad = true;
    bool word_mfa_grad = true;

    uint64_t seed = 42;

    void validate() const;
};

// Parse a flat-key JSON object; unknown keys raise a config error naming
// the key.
TrainConfig parse_config_json(const std::string& text);
TrainConfig load_config(const std::string& path);
std::string config_to_json(const TrainConfig& cfg);

}  // namespace trimf
