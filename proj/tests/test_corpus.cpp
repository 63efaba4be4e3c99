// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "trimf/errors.hpp"
#include "trimf/eval.hpp"
#include "trimf/corpus.hpp"

using namespace trimf;

TEST_CASE("empty corpus is valid and round-trips") {
    Corpus c;
    c.entity_types = {"Per"};
    c.relation_types = {"Rel"};
    c.dependency_labels = {"dep"};
    CHECK_NOTHROW(validate_corpus(c));
    Corpus back = parse_corpus_json(corpus_to_json(c));
    CHECK(back.sentences.empty());
    CHECK(back.entity_types == c.entity_types);
}

TEST_CASE("validation names the offending sentence and field") {
    Corpus c;
    c.entity_types = {"Per"};
    c.relation_types = {"Rel"};
    c.dependency_labels = {"dep"};
    Sentence s;
    s.tokens = {"a", "b"};
    s.deps = {{-1, "dep"}, {0, "dep"}};
    s.entities = {{"Per", 0, 1}};
    s.relations = {{"Rel", 0, 7}};  // tail index out of range
    c.sentences = {s};
    try {
        validate_corpus(c);
        FAIL("expected validation error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Corpus);
        std::string msg = e.what();
        CHECK(msg.find("0") != std::string::npos);  // sentence index
        CHECK(msg.find("relation") != std::string::npos);
    }
}

TEST_CASE("malformed JSON is a corpus error") {
    CHECK_THROWS_AS(parse_corpus_json("{not json"), Error);
}

TEST_CASE("full round-trip preserves structure") {
    Corpus c = generate_synthetic(SynthSpec{});
    Corpus back = parse_corpus_json(corpus_to_json(c));
    REQUIRE(back.sentences.size() == c.sentences.size());
    CHECK(back.entity_types == c.entity_types);
    CHECK(back.relation_types == c.relation_types);
    CHECK(back.dependency_labels == c.dependency_labels);
    for (size_t i = 0; i < c.sentences.size(); ++i) {
        const Sentence& a = c.sentences[i];
        const Sentence& b = back.sentences[i];
        CHECK(a.tokens == b.tokens);
        REQUIRE(a.entities.size() == b.entities.size());
        for (size_t j = 0; j < a.entities.size(); ++j) {
            CHECK(a.entities[j].type == b.entities[j].type);
            CHECK(a.entities[j].begin == b.entities[j].begin);
            CHECK(a.entities[j].end == b.entities[j].end);
        }
        REQUIRE(a.relations.size() == b.relations.size());
        for (size_t j = 0; j < a.relations.size(); ++j) {
            CHECK(a.relations[j].type == b.relations[j].type);
            CHECK(a.relations[j].head == b.relations[j].head);
            CHECK(a.relations[j].tail == b.relations[j].tail);
        }
        REQUIRE(a.deps.size() == b.deps.size());
        for (size_t j = 0; j < a.deps.size(); ++j) {
            CHECK(a.deps[j].head == b.deps[j].head);
            CHECK(a.deps[j].label == b.deps[j].label);
        }
    }
}

TEST_CASE("synthetic generation is deterministic and plants triggers") {
    SynthSpec spec;
    Corpus a = generate_synthetic(spec);
    Corpus b = generate_synthetic(spec);
    REQUIRE(a.sentences.size() == spec.n_sentences);
    REQUIRE(a.sentences.size() == b.sentences.size());
    for (size_t i = 0; i < a.sentences.size(); ++i)
        CHECK(a.sentences[i].tokens == b.sentences[i].tokens);
    CHECK(a.entity_types.size() == spec.n_entity_types);
    CHECK(a.relation_types.size() == spec.n_relation_types);
    CHECK_NOTHROW(validate_corpus(a));

    auto lexicon = synthetic_trigger_lexicon(spec);
    REQUIRE(lexicon.size() == spec.n_relation_types);
    for (const Sentence& s : a.sentences)
        for (const RelationMention& r : s.relations) {
            size_t rel = size_t(std::find(a.relation_types.begin(),
                                          a.relation_types.end(), r.type) -
                                a.relation_types.begin());
            REQUIRE(rel < lexicon.size());
            size_t hits = 0;
            for (const std::string& tok : s.tokens)
                hits += std::count(lexicon[rel].begin(), lexicon[rel].end(),
                                   tok) > 0;
            CHECK(hits == 1);
        }

    Corpus other = generate_synthetic(SynthSpec{20, 3, 2, 2, 2});
    CHECK(other.sentences.size() == 20);
}

namespace {

Sentence gold_sentence() {
    Sentence s;
    s.tokens = {"a", "b", "c", "d", "e", "f"};
    s.deps.assign(6, DepToken{-1, "dep"});
    for (size_t i = 1; i < 6; ++i) s.deps[i] = {0, "dep"};
    s.entities = {{"T", 0, 1}, {"T", 1, 2}, {"T", 2, 3}, {"T", 3, 4}};
    return s;
}

}  // namespace

TEST_CASE("exact predictions score 1 everywhere") {
    Sentence s = gold_sentence();
    s.relations = {{"R", 0, 1}};
    SentencePrediction p;
    p.entities = s.entities;
    p.relations = {{"R", s.entities[0], s.entities[1], 0.9}};
    EvalReport rep = score({s}, {p}, EvalRegime::Strict, Averaging::Micro,
                           {"T"}, {"R"});
    CHECK(rep.entity.f1 == doctest::Approx(1.0));
    CHECK(rep.relation.f1 == doctest::Approx(1.0));
    CHECK(rep.entity.precision == doctest::Approx(1.0));
    CHECK(rep.relation.recall == doctest::Approx(1.0));
}

TEST_CASE("entity counting closed form") {
    // 4 gold, 3 predicted, 2 correct -> P=2/3, R=1/2, F1=4/7
    Sentence s = gold_sentence();
    SentencePrediction p;
    p.entities = {{"T", 0, 1}, {"T", 1, 2}, {"T", 4, 5}};
    EvalReport rep = score({s}, {p}, EvalRegime::Strict, Averaging::Micro,
                           {"T"}, {});
    CHECK(rep.entity.gold == 4);
    CHECK(rep.entity.predicted == 3);
    CHECK(rep.entity.correct == 2);
    CHECK(rep.entity.precision == doctest::Approx(2.0 / 3.0));
    CHECK(rep.entity.recall == doctest::Approx(0.5));
    CHECK(rep.entity.f1 == doctest::Approx(4.0 / 7.0));
}

TEST_CASE("boundary regime ignores endpoint entity labels") {
    Sentence s;
    s.tokens = {"a", "b", "c"};
    s.deps = {{-1, "dep"}, {0, "dep"}, {0, "dep"}};
    s.entities = {{"T1", 0, 1}, {"T2", 2, 3}};
    s.relations = {{"R", 0, 1}};
    SentencePrediction p;
    // right spans and relation type, wrong head entity label
    p.entities = {{"T2", 0, 1}, {"T2", 2, 3}};
    p.relations = {{"R", {"T2", 0, 1}, {"T2", 2, 3}, 0.9}};
    EvalReport strict = score({s}, {p}, EvalRegime::Strict, Averaging::Micro,
                              {"T1", "T2"}, {"R"});
    EvalReport boundary = score({s}, {p}, EvalRegime::Boundary,
                                Averaging::Micro, {"T1", "T2"}, {"R"});
    CHECK(strict.relation.correct == 0);
    CHECK(boundary.relation.correct == 1);
    CHECK(boundary.relation.f1 >= strict.relation.f1);
    CHECK(boundary.relation.f1 == doctest::Approx(1.0));
}

TEST_CASE("empty predictions score zero, not NaN") {
    Sentence s = gold_sentence();
    SentencePrediction p;
    EvalReport rep = score({s}, {p}, EvalRegime::Strict, Averaging::Micro,
                           {"T"}, {});
    CHECK(rep.entity.precision == 0.0);
    CHECK(rep.entity.recall == 0.0);
    CHECK(rep.entity.f1 == 0.0);
}

TEST_CASE("macro over a single type equals micro") {
    Sentence s = gold_sentence();
    SentencePrediction p;
    p.entities = {{"T", 0, 1}, {"T", 4, 5}};
    EvalReport micro = score({s}, {p}, EvalRegime::Strict, Averaging::Micro,
                             {"T"}, {});
    EvalReport macro = score({s}, {p}, EvalRegime::Strict, Averaging::Macro,
                             {"T"}, {});
    CHECK(micro.entity.f1 == doctest::Approx(macro.entity.f1).epsilon(1e-12));
}

TEST_CASE("misaligned sentence lists are rejected") {
    Sentence s = gold_sentence();
    try {
        score({s}, {}, EvalRegime::Strict, Averaging::Micro, {"T"}, {});
        FAIL("expected contract error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Contract);
    }
}
