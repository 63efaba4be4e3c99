// SPDX-License-Identifier: Apache-2.0

#include "trimf/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "trimf/errors.hpp"
#include "trimf/graph.hpp"

namespace trimf {

using ordered_json = nlohmann::ordered_json;

void TrainConfig::validate() const {
    if (stage1_epochs < 0 || stage2_epochs < 0)
        throw_config("stage epochs must be >= 0");
    if (batch_size <= 0) throw_config("batch_size must be positive");
    if (peak_lr <= 0) throw_config("peak_lr must be positive");
    if (warmup_fraction <= 0 || warmup_fraction >= 1)
        throw_config("warmup_fraction must lie in (0, 1)");
    if (dropout < 0 || dropout >= 1) throw_config("dropout must lie in [0, 1)");
    if (relation_threshold < 0 || relation_threshold > 1)
        throw_config("relation_threshold must lie in [0, 1]");
    if (neg_entity_count < 0 || neg_relation_count < 0)
        throw_config("negative-sample counts must be >= 0");
    if (hidden <= 0 || memory_slot_size <= 0 || width_embed_dim <= 0 ||
        max_span_size <= 0 || vocab_size <= 0 || encoder_layers <= 0 ||
        encoder_heads <= 0 || semantic_sample_k <= 0)
        throw_config("size parameters must be positive");
    if (hidden % encoder_heads != 0)
        throw_config("hidden must be divisible by encoder_heads");
    fusion_mode_from_string(fusion_mode);  // throws on bad value
    // levels enabled with no memories (or vice versa) is a valid ablation:
    // the memory flow simply bypasses
}

TrainConfig parse_config_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw_config(std::string("config JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw_config("config must be a JSON object");
    TrainConfig cfg;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "stage1_epochs") cfg.stage1_epochs = value.get<int64_t>();
            else if (key == "stage2_epochs") cfg.stage2_epochs = value.get<int64_t>();
            else if (key == "batch_size") cfg.batch_size = value.get<int64_t>();
            else if (key == "peak_lr") cfg.peak_lr = value.get<double>();
            else if (key == "warmup_fraction") cfg.warmup_fraction = value.get<double>();
            else if (key == "dropout") cfg.dropout = value.get<double>();
            else if (key == "hidden") cfg.hidden = value.get<int64_t>();
            else if (key == "encoder_layers") cfg.encoder_layers = value.get<int64_t>();
            else if (key == "encoder_heads") cfg.encoder_heads = value.get<int64_t>();
            else if (key == "memory_slot_size") cfg.memory_slot_size = value.get<int64_t>();
            else if (key == "width_embed_dim") cfg.width_embed_dim = value.get<int64_t>();
            else if (key == "max_span_size") cfg.max_span_size = value.get<int64_t>();
            else if (key == "vocab_size") cfg.vocab_size = value.get<int64_t>();
            else if (key == "semantic_sample_k") cfg.semantic_sample_k = value.get<int64_t>();
            else if (key == "neg_entity_count") cfg.neg_entity_count = value.get<int64_t>();
            else if (key == "neg_relation_count") cfg.neg_relation_count = value.get<int64_t>();
            else if (key == "relation_threshold") cfg.relation_threshold = value.get<double>();
            else if (key == "mfa_subword_level") cfg.mfa_subword_level = value.get<bool>();
            else if (key == "mfa_word_level") cfg.mfa_word_level = value.get<bool>();
            else if (key == "mfa_entity_memory") cfg.mfa_entity_memory = value.get<bool>();
            else if (key == "mfa_relation_memory") cfg.mfa_relation_memory = value.get<bool>();
            else if (key == "enable_trigger_sensor") cfg.enable_trigger_sensor = value.get<bool>();
            else if (key == "fusion_mode") cfg.fusion_mode = value.get<std::string>();
            else if (key == "trigger_sensor_grad") cfg.trigger_sensor_grad = value.get<bool>();
            else if (key == "subword_mfa_grad") cfg.subword_mfa_grad = value.get<bool>();
            else if (key == "word_mfa_grad") cfg.word_mfa_grad = value.get<bool>();
            else if (key == "seed") cfg.seed = value.get<uint64_t>();
            else throw_config("unknown config key: " + key);
        }
    } catch (const nlohmann::json::exception& e) {
        throw_config(std::string("config value error: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

TrainConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str());
}

std::string config_to_json(const TrainConfig& cfg) {
    ordered_json j;
    j["stage1_epochs"] = cfg.stage1_epochs;
    j["stage2_epochs"] = cfg.stage2_epochs;
    j["batch_size"] = cfg.batch_size;
    j["peak_lr"] = cfg.peak_lr;
    j["warmup_fraction"] = cfg.warmup_fraction;
    j["dropout"] = cfg.dropout;
    j["hidden"] = cfg.hidden;
    j["encoder_layers"] = cfg.encoder_layers;
    j["encoder_heads"] = cfg.encoder_heads;
    j["memory_slot_size"] = cfg.memory_slot_size;
    j["width_embed_dim"] = cfg.width_embed_dim;
    j["max_span_size"] = cfg.max_span_size;
    j["vocab_size"] = cfg.vocab_size;
    j["semantic_sample_k"] = cfg.semantic_sample_k;
    j["neg_entity_count"] = cfg.neg_entity_count;
    j["neg_relation_count"] = cfg.neg_relation_count;
    j["relation_threshold"] = cfg.relation_threshold;
    j["mfa_subword_level"] = cfg.mfa_subword_level;
    j["mfa_word_level"] = cfg.mfa_word_level;
    j["mfa_entity_memory"] = cfg.mfa_entity_memory;
    j["mfa_relation_memory"] = cfg.mfa_relation_memory;
    j["enable_trigger_sensor"] = cfg.enable_trigger_sensor;
    j["fusion_mode"] = cfg.fusion_mode;
    j["trigger_sensor_grad"] = cfg.trigger_sensor_grad;
    j["subword_mfa_grad"] = cfg.subword_mfa_grad;
    j["word_mfa_grad"] = cfg.word_mfa_grad;
    j["seed"] = cfg.seed;
    return j.dump(2);
}

}  // namespace trimf
