// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include <json.hpp>

#include "trimf/checkpoint.hpp"
#include "trimf/errors.hpp"

using namespace trimf;

namespace {

Model small_model() {
    TrainConfig cfg;
    cfg.hidden = 8;
    cfg.encoder_layers = 1;
    cfg.encoder_heads = 2;
    cfg.memory_slot_size = 8;
    cfg.width_embed_dim = 4;
    cfg.max_span_size = 3;
    cfg.vocab_size = 40;
    Corpus corpus = generate_synthetic(SynthSpec{8, 2, 1, 1, 3});
    return init_model(cfg, corpus);
}

}  // namespace

TEST_CASE("serialization is canonical") {
    Model m = small_model();
    std::string first = model_to_json(m);
    Model back = model_from_json(first);
    std::string second = model_to_json(back);
    CHECK(first == second);
}

TEST_CASE("round trip preserves predictions") {
    Model m = small_model();
    Corpus corpus = generate_synthetic(SynthSpec{8, 2, 1, 1, 3});
    Model back = model_from_json(model_to_json(m));
    for (size_t i = 0; i < 3; ++i) {
        PreparedSentence a = prepare_sentence(corpus.sentences[i], m);
        PreparedSentence b = prepare_sentence(corpus.sentences[i], back);
        Prediction pa = predict(m, a, 0.4);
        Prediction pb = predict(back, b, 0.4);
        REQUIRE(pa.entities.size() == pb.entities.size());
        for (size_t j = 0; j < pa.entities.size(); ++j) {
            CHECK(pa.entities[j].span == pb.entities[j].span);
            CHECK(pa.entities[j].type == pb.entities[j].type);
            CHECK(pa.entities[j].probability == pb.entities[j].probability);
        }
        REQUIRE(pa.relations.size() == pb.relations.size());
        for (size_t j = 0; j < pa.relations.size(); ++j) {
            CHECK(pa.relations[j].type == pb.relations[j].type);
            CHECK(pa.relations[j].probability == pb.relations[j].probability);
        }
    }
}

TEST_CASE("file save and load") {
    Model m = small_model();
    const char* path = "./checkpoint_test.json";
    save_model(m, path);
    Model back = load_model(path);
    CHECK(model_to_json(back) == model_to_json(m));
    std::remove(path);
    CHECK_THROWS_AS(load_model("./no_such_checkpoint.json"), Error);
}

TEST_CASE("incompatible checkpoints are rejected") {
    Model m = small_model();
    auto j = nlohmann::ordered_json::parse(model_to_json(m));

    auto bad_version = j;
    bad_version["format_version"] = 999;
    try {
        model_from_json(bad_version.dump());
        FAIL("expected compat error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Compat);
    }

    auto missing = j;
    missing["parameters"].erase("classifier.entity");
    CHECK_THROWS_AS(model_from_json(missing.dump()), Error);

    auto wrong_shape = j;
    wrong_shape["parameters"]["classifier.entity"]["rows"] = 3;
    CHECK_THROWS_AS(model_from_json(wrong_shape.dump()), Error);

    auto unknown_key = j;
    unknown_key["config"]["not_a_real_option"] = 1;
    try {
        model_from_json(unknown_key.dump());
        FAIL("expected config error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        CHECK(std::string(e.what()).find("not_a_real_option") !=
              std::string::npos);
    }
}
