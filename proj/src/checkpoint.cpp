// SPDX-License-Identifier: Apache-2.0

#include "trimf/checkpoint.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "trimf/errors.hpp"

namespace trimf {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kFormatVersion = 1;

ordered_json tensor_json(const Tensor& t) {
    ordered_json j;
    j["rows"] = t.rows();
    j["cols"] = t.cols();
    j["values"] = t.values();
    return j;
}

Tensor tensor_from(const ordered_json& j, bool requires_grad) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
        !j.contains("values"))
        throw_compat("malformed tensor record in checkpoint");
    size_t r = j.at("rows").get<size_t>();
    size_t c = j.at("cols").get<size_t>();
    std::vector<double> v = j.at("values").get<std::vector<double>>();
    if (v.size() != r * c) throw_compat("tensor value count mismatch");
    return Tensor::from(r, c, std::move(v), requires_grad);
}

}  // namespace

std::string model_to_json(const Model& model) {
    ordered_json j;
    j["format_version"] = kFormatVersion;
    j["config"] = ordered_json::parse(config_to_json(model.cfg));
    j["subword_vocab"] = model.vocab.pieces();
    j["entity_types"] = model.entity_types;
    j["relation_types"] = model.relation_types;
    j["dependency_labels"] = model.dependency_labels;

    std::vector<Parameter*> params = const_cast<Model&>(model).parameters();
    std::sort(params.begin(), params.end(),
              [](const Parameter* a, const Parameter* b) {
                  return a->name < b->name;
              });
    ordered_json pj = ordered_json::object();
    for (const Parameter* p : params) {
        ordered_json e = tensor_json(p->tensor);
        e["group"] = p->group;
        pj[p->name] = std::move(e);
    }
    j["parameters"] = std::move(pj);

    ordered_json em;
    em["categories"] = model.entity_memory.category_names;
    em["slots"] = tensor_json(model.entity_memory.slots);
    j["entity_memory"] = std::move(em);
    ordered_json rm;
    rm["categories"] = model.relation_memory.category_names;
    rm["slots"] = tensor_json(model.relation_memory.slots);
    j["relation_memory"] = std::move(rm);
    return j.dump(2) + "\n";
}

Model model_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw_compat(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    if (!j.contains("format_version") ||
        j.at("format_version").get<int>() != kFormatVersion)
        throw_compat("unsupported checkpoint format version");
    for (const char* key :
         {"config", "subword_vocab", "entity_types", "relation_types",
          "dependency_labels", "parameters", "entity_memory",
          "relation_memory"})
        if (!j.contains(key))
            throw_compat(std::string("checkpoint missing field: ") + key);

    Model m;
    m.cfg = parse_config_json(j.at("config").dump());
    m.vocab = SubwordVocab(j.at("subword_vocab").get<std::vector<std::string>>());
    m.entity_types = j.at("entity_types").get<std::vector<std::string>>();
    m.relation_types = j.at("relation_types").get<std::vector<std::string>>();
    m.dependency_labels =
        j.at("dependency_labels").get<std::vector<std::string>>();

    // build the skeleton with matching shapes, then overwrite values by name
    const TrainConfig& cfg = m.cfg;
    size_t h = size_t(cfg.hidden);
    size_t h_mem = size_t(cfg.memory_slot_size);
    m.encoder = init_encoder(m.vocab.size(), h, size_t(cfg.encoder_layers),
                             size_t(cfg.encoder_heads), derive_seed(cfg.seed, "encoder"));
    m.mfa_forms = init_mfa_forms(h, h_mem, h_mem, derive_seed(cfg.seed, "mfa"));
    m.graph = init_graph_params(h, std::max<size_t>(1, m.dependency_labels.size()),
                                derive_seed(cfg.seed, "graph"));
    m.span_trigger = init_span_trigger_params(
        h, m.h_s(), h_mem, size_t(cfg.max_span_size), size_t(cfg.width_embed_dim),
        derive_seed(cfg.seed, "span_trigger"));
    m.entity_classifier = {"classifier.entity", "classifier",
                           Tensor::zeros(m.h_s(), h_mem, true)};
    m.relation_classifier = {"classifier.relation", "classifier",
                             Tensor::zeros(m.h_r(), h_mem, true)};

    const ordered_json& pj = j.at("parameters");
    std::map<std::string, bool> consumed;
    for (auto it = pj.begin(); it != pj.end(); ++it) consumed[it.key()] = false;
    for (Parameter* p : m.parameters()) {
        auto it = pj.find(p->name);
        if (it == pj.end())
            throw_compat("checkpoint missing parameter: " + p->name);
        Tensor t = tensor_from(*it, true);
        if (t.rows() != p->tensor.rows() || t.cols() != p->tensor.cols())
            throw_compat("parameter shape mismatch: " + p->name);
        p->tensor = t;
        consumed[p->name] = true;
    }
    for (const auto& [name, used] : consumed)
        if (!used) throw_compat("checkpoint has unknown parameter: " + name);

    const ordered_json& em = j.at("entity_memory");
    m.entity_memory.kind = MemoryKind::Entity;
    m.entity_memory.category_names =
        em.at("categories").get<std::vector<std::string>>();
    m.entity_memory.slots = tensor_from(em.at("slots"), true);
    const ordered_json& rm = j.at("relation_memory");
    m.relation_memory.kind = MemoryKind::Relation;
    m.relation_memory.category_names =
        rm.at("categories").get<std::vector<std::string>>();
    m.relation_memory.slots = tensor_from(rm.at("slots"), true);
    if (m.entity_memory.category_names.size() != m.entity_types.size() + 1 ||
        m.relation_memory.category_names.size() != m.relation_types.size())
        throw_compat("memory category lists disagree with type vocabularies");
    return m;
}

void save_model(const Model& model, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw_io("cannot open checkpoint for writing: " + path);
    f << model_to_json(model);
    if (!f) throw_io("failed writing checkpoint: " + path);
}

Model load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw_io("cannot open checkpoint: " + path);
    std::string text((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
    return model_from_json(text);
}

}  // namespace trimf
