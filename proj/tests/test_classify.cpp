// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "trimf/model.hpp"

using namespace trimf;
using trimf::testing::random_tensor;

namespace {

Corpus tiny_corpus() {
    Corpus c;
    c.entity_types = {"Per", "Loc"};
    c.relation_types = {"Visits", "Likes"};
    c.dependency_labels = {"dep"};
    Sentence s;
    s.tokens = {"alice", "visited", "paris", "today"};
    s.deps = {{-1, "dep"}, {0, "dep"}, {1, "dep"}, {1, "dep"}};
    s.entities = {{"Per", 0, 1}, {"Loc", 2, 3}};
    s.relations = {{"Visits", 0, 1}};
    c.sentences.push_back(s);
    return c;
}

TrainConfig tiny_cfg() {
    TrainConfig cfg;
    cfg.hidden = 8;
    cfg.encoder_layers = 1;
    cfg.encoder_heads = 2;
    cfg.memory_slot_size = 8;
    cfg.width_embed_dim = 4;
    cfg.max_span_size = 3;
    cfg.vocab_size = 30;
    cfg.neg_entity_count = 5;
    cfg.neg_relation_count = 5;
    cfg.semantic_sample_k = 2;
    return cfg;
}

Model tiny_model() { return init_model(tiny_cfg(), tiny_corpus()); }

}  // namespace

TEST_CASE("entity probabilities over identical slots are uniform") {
    Model m = tiny_model();
    size_t cats = m.entity_types.size() + 1;
    std::vector<double> flat;
    for (size_t c = 0; c < cats; ++c)
        for (size_t j = 0; j < size_t(m.cfg.memory_slot_size); ++j)
            flat.push_back(m.entity_memory.slots.at(0, j));
    m.entity_memory.slots =
        Tensor::from(cats, size_t(m.cfg.memory_slot_size), flat);
    Rng rng(1);
    Tensor enc = random_tensor(1, m.h_s(), rng, false);
    Tensor p = entity_probs(m, enc);
    REQUIRE(p.cols() == cats);
    double s = 0.0;
    for (size_t c = 0; c < cats; ++c) {
        CHECK(p.at(0, c) == doctest::Approx(1.0 / double(cats)).epsilon(1e-9));
        s += p.at(0, c);
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("entity argmax follows the aligned slot") {
    Model m = tiny_model();
    size_t cats = m.entity_types.size() + 1;
    size_t d = size_t(m.cfg.memory_slot_size);
    // orthogonal unit slots
    std::vector<double> slots(cats * d, 0.0);
    for (size_t c = 0; c < cats; ++c) slots[c * d + c] = 1.0;
    m.entity_memory.slots = Tensor::from(cats, d, slots);
    for (size_t k = 0; k < cats; ++k) {
        // classifier maps the first input coordinate onto slot k's axis
        std::vector<double> w(m.h_s() * d, 0.0);
        w[k] = 10.0;
        m.entity_classifier.tensor = Tensor::from(m.h_s(), d, w);
        std::vector<double> e(m.h_s(), 0.0);
        e[0] = 1.0;
        Tensor p = entity_probs(m, Tensor::from(1, m.h_s(), e));
        size_t argmax = 0;
        for (size_t c = 1; c < cats; ++c)
            if (p.at(0, c) > p.at(0, argmax)) argmax = c;
        CHECK(argmax == k);
    }
}

TEST_CASE("relation probabilities are independent sigmoids") {
    Model m = tiny_model();
    m.relation_classifier.tensor =
        Tensor::zeros(m.h_r(), size_t(m.cfg.memory_slot_size), true);
    Rng rng(2);
    Tensor pair = random_tensor(1, m.h_r(), rng, false);
    Tensor p = relation_probs(m, pair);
    REQUIRE(p.cols() == m.relation_types.size());
    for (size_t c = 0; c < m.relation_types.size(); ++c)
        CHECK(p.at(0, c) == doctest::Approx(0.5).epsilon(1e-12));

    // perturbing one category's slot leaves the other's probability alone
    Model m2 = tiny_model();
    Tensor before = relation_probs(m2, pair);
    size_t d = size_t(m2.cfg.memory_slot_size);
    std::vector<double> flat = m2.relation_memory.slots.values();
    for (size_t j = 0; j < d; ++j) flat[1 * d + j] += 3.0;
    m2.relation_memory.slots = Tensor::from(2, d, flat);
    Tensor after = relation_probs(m2, pair);
    CHECK(after.at(0, 0) == doctest::Approx(before.at(0, 0)).epsilon(1e-12));
    CHECK(after.at(0, 1) != doctest::Approx(before.at(0, 1)).epsilon(1e-12));
}

TEST_CASE("joint loss closed forms at zero classifier weights") {
    Model m = tiny_model();
    size_t d = size_t(m.cfg.memory_slot_size);
    m.entity_classifier.tensor = Tensor::zeros(m.h_s(), d, true);
    m.relation_classifier.tensor = Tensor::zeros(m.h_r(), d, true);
    Rng rng(3);
    SentenceLossParts parts;
    parts.span_encodings = {random_tensor(1, m.h_s(), rng, false),
                            random_tensor(1, m.h_s(), rng, false)};
    parts.span_labels = {0, m.none_index()};
    parts.pair_encodings = {random_tensor(1, m.h_r(), rng, false)};
    parts.pair_targets = {{1, 0}};
    Rng drop(4);
    double loss = joint_loss(m, {parts}, drop, false).item();
    CHECK(loss == doctest::Approx(std::log(3.0) + std::log(2.0)).epsilon(1e-9));

    // entity-only batch
    SentenceLossParts ents = parts;
    ents.pair_encodings.clear();
    ents.pair_targets.clear();
    CHECK(joint_loss(m, {ents}, drop, false).item() ==
          doctest::Approx(std::log(3.0)).epsilon(1e-9));
}

TEST_CASE("negative sampling keeps gold and excludes it from negatives") {
    Model m = tiny_model();
    Corpus c = tiny_corpus();

    Model gold_only = tiny_model();
    gold_only.cfg.neg_entity_count = 0;
    gold_only.cfg.neg_relation_count = 0;
    Rng r0(5);
    Candidates g = sample_negatives(gold_only, c.sentences[0], r0);
    REQUIRE(g.spans.size() == 2);
    CHECK(g.spans[0].span == Span{0, 1});
    CHECK(g.spans[0].label == 0);
    CHECK(g.spans[1].span == Span{2, 3});
    CHECK(g.spans[1].label == 1);
    REQUIRE(g.pairs.size() == 1);
    CHECK(g.pairs[0].head == Span{0, 1});
    CHECK(g.pairs[0].tail == Span{2, 3});
    CHECK(g.pairs[0].targets == std::vector<char>{1, 0});

    Rng r1(6);
    Candidates full = sample_negatives(m, c.sentences[0], r1);
    CHECK(full.spans.size() > 2);
    for (const auto& cand : full.spans)
        if (!(cand.span == Span{0, 1}) && !(cand.span == Span{2, 3}))
            CHECK(cand.label == m.none_index());
    for (size_t i = 1; i < full.pairs.size(); ++i)
        CHECK(full.pairs[i].targets == std::vector<char>(2, 0));

    // seeded determinism
    Rng r2(6);
    Candidates again = sample_negatives(m, c.sentences[0], r2);
    REQUIRE(again.spans.size() == full.spans.size());
    for (size_t i = 0; i < full.spans.size(); ++i) {
        CHECK(again.spans[i].span == full.spans[i].span);
        CHECK(again.spans[i].label == full.spans[i].label);
    }
}

TEST_CASE("slot gradient flow follows the ablation switches") {
    Corpus c = tiny_corpus();
    auto grad_norm = [&](bool allow) {
        TrainConfig cfg = tiny_cfg();
        cfg.trigger_sensor_grad = allow;
        cfg.subword_mfa_grad = allow;
        cfg.word_mfa_grad = allow;
        Model m = init_model(cfg, c);
        PreparedSentence ps = prepare_sentence(c.sentences[0], m);
        Rng rng(7);
        Candidates cands = sample_negatives(m, c.sentences[0], rng);
        PipelineOptions opt;
        opt.stage2 = true;
        opt.train_mode = false;
        SentenceLossParts parts = forward_candidates(m, ps, cands, opt);
        Rng drop(8);
        Tensor loss = joint_loss(m, {parts}, drop, false);
        m.entity_memory.slots.zero_grad();
        m.relation_memory.slots.zero_grad();
        loss.backward();
        double norm = 0.0;
        for (const Tensor* t :
             {&m.entity_memory.slots, &m.relation_memory.slots})
            if (t->has_grad())
                for (double gv : t->grad()) norm += gv * gv;
        return norm;
    };
    CHECK(grad_norm(false) == 0.0);
    CHECK(grad_norm(true) > 0.0);
}

TEST_CASE("stage-one parameter groups exclude memory flow and trigger") {
    Model m = tiny_model();
    auto stage1 = m.parameters_for_groups({"classifier", "graph", "encoder"});
    CHECK(!stage1.empty());
    for (const Parameter* p : stage1) {
        CHECK(p->group != "mfa");
        CHECK(p->group != "trigger");
    }
    CHECK(stage1.size() < m.parameters().size());
}

TEST_CASE("prediction respects the relation threshold") {
    Corpus c = tiny_corpus();
    Model m = tiny_model();
    PreparedSentence ps = prepare_sentence(c.sentences[0], m);
    Prediction high = predict(m, ps, 2.0);
    CHECK(high.relations.empty());
    Prediction low = predict(m, ps, 0.0);
    // with a zero threshold every ordered pair of predicted entities fires
    // for every relation type
    size_t n_ents = low.entities.size();
    size_t expect = 0;
    for (size_t i = 0; i < n_ents; ++i)
        for (size_t j = 0; j < n_ents; ++j)
            if (i != j &&
                !low.entities[i].span.overlaps(low.entities[j].span))
                expect += m.relation_types.size();
    CHECK(low.relations.size() == expect);
}
