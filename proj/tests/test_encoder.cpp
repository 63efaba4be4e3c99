// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "helpers.hpp"
#include "trimf/encoder.hpp"
#include "trimf/errors.hpp"

using namespace trimf;
using trimf::testing::max_rel_grad_error;

TEST_CASE("tokenize single-piece word") {
    SubwordVocab vocab({"[CLS]", "[UNK]", "cat"});
    SubwordDecomposition d = tokenize({"cat"}, vocab);
    REQUIRE(d.subword_ids.size() == 2);
    CHECK(d.subword_ids[0] == SubwordVocab::kCls);
    CHECK(d.subword_texts[1] == "cat");
    REQUIRE(d.word_spans.size() == 1);
    CHECK(d.word_spans[0].first == 1);
    CHECK(d.word_spans[0].second == 2);
}

TEST_CASE("tokenize falls back to 3-character chunks") {
    SubwordVocab vocab({"[CLS]", "[UNK]"});
    SubwordDecomposition d = tokenize({"kennedy"}, vocab);
    REQUIRE(d.subword_texts.size() == 4);
    CHECK(d.subword_texts[1] == "ken");
    CHECK(d.subword_texts[2] == "ned");
    CHECK(d.subword_texts[3] == "y");
    CHECK(d.word_spans[0].first == 1);
    CHECK(d.word_spans[0].second == 4);
}

TEST_CASE("tokenize is deterministic and lowercases") {
    SubwordVocab vocab = SubwordVocab::build({"hello", "world", "worlds"});
    SubwordDecomposition a = tokenize({"Hello", "worlds"}, vocab);
    SubwordDecomposition b = tokenize({"hello", "WORLDS"}, vocab);
    CHECK(a.subword_ids == b.subword_ids);
}

TEST_CASE("tokenize rejects empty words") {
    SubwordVocab vocab({"[CLS]", "[UNK]"});
    try {
        tokenize({"ok", ""}, vocab);
        FAIL("expected corpus error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Corpus);
    }
}

TEST_CASE("word spans cover all subword positions") {
    SubwordVocab vocab = SubwordVocab::build({"entity", "relation", "memory"});
    SubwordDecomposition d =
        tokenize({"entity", "relations", "memory", "xyz"}, vocab);
    size_t covered = 0;
    size_t expect_begin = 1;
    for (auto [b, e] : d.word_spans) {
        CHECK(b == expect_begin);  // contiguous, non-overlapping
        CHECK(e > b);
        covered += e - b;
        expect_begin = e;
    }
    CHECK(covered == d.subword_count());
}

TEST_CASE("vocab save/load round trip") {
    SubwordVocab vocab = SubwordVocab::build({"alpha", "beta", "gamma"});
    std::string path = "./vocab_roundtrip.txt";
    vocab.save(path);
    SubwordVocab loaded = SubwordVocab::load(path);
    std::remove(path.c_str());
    CHECK(loaded.pieces() == vocab.pieces());
}

TEST_CASE("encode output shapes") {
    SubwordVocab vocab = SubwordVocab::build({"alpha", "beta"});
    EncoderParams params = init_encoder(vocab.size(), 16, 2, 4, 5);
    SubwordDecomposition d = tokenize({"alpha", "beta", "unseen"}, vocab);
    Encoded out = encode(d, params);
    CHECK(out.e_d.rows() == d.subword_count());
    CHECK(out.e_d.cols() == 16);
    CHECK(out.e_cls.rows() == 1);
    CHECK(out.e_cls.cols() == 16);
}

TEST_CASE("position encodings break permutation symmetry") {
    SubwordVocab vocab({"[CLS]", "[UNK]", "aa", "bb"});
    EncoderParams params = init_encoder(vocab.size(), 16, 1, 2, 6);
    Encoded ab = encode(tokenize({"aa", "bb"}, vocab), params);
    Encoded ba = encode(tokenize({"bb", "aa"}, vocab), params);
    // row 0 of ab is "aa" at position 1; row 1 of ba is "aa" at position 2
    double diff = 0.0;
    for (size_t j = 0; j < 16; ++j)
        diff = std::max(diff, std::fabs(ab.e_d.at(0, j) - ba.e_d.at(1, j)));
    CHECK(diff > 1e-8);
}

TEST_CASE("encode is deterministic") {
    SubwordVocab vocab = SubwordVocab::build({"one", "two", "three"});
    EncoderParams params = init_encoder(vocab.size(), 16, 2, 2, 7);
    Encoded a = encode(tokenize({"one", "two"}, vocab), params);
    Encoded b = encode(tokenize({"one", "two"}, vocab), params);
    CHECK(trimf::testing::max_abs_diff(a.e_d, b.e_d) == 0.0);
}

TEST_CASE("pool_words definitional cases") {
    Tensor e = Tensor::from(3, 2, {1, 0, 0, 2, 5, -1});
    Tensor single = pool_words(e, {{0, 1}, {1, 2}, {2, 3}});
    CHECK(trimf::testing::max_abs_diff(single, e) == 0.0);
    Tensor merged = pool_words(e, {{0, 2}, {2, 3}});
    CHECK(merged.at(0, 0) == 1);
    CHECK(merged.at(0, 1) == 2);
    CHECK(merged.at(1, 0) == 5);
    CHECK(merged.at(1, 1) == -1);
}

TEST_CASE("pool_words depends only on rows inside the span") {
    Rng rng(8);
    Tensor e = trimf::testing::random_tensor(4, 3, rng, false);
    Tensor base = pool_words(e, {{0, 2}, {2, 4}});
    std::vector<double> vals = e.values();
    vals[3 * 3 + 1] += 10.0;  // perturb a row of word 1
    Tensor pert = pool_words(Tensor::from(4, 3, std::move(vals)), {{0, 2}, {2, 4}});
    for (size_t j = 0; j < 3; ++j)
        CHECK(pert.at(0, j) == base.at(0, j));  // word 0 untouched
}

TEST_CASE("gradients flow through a full encode") {
    SubwordVocab vocab({"[CLS]", "[UNK]", "ab", "cd"});
    EncoderParams params = init_encoder(vocab.size(), 8, 1, 2, 9);
    SubwordDecomposition d = tokenize({"ab", "cd"}, vocab);
    auto loss = [&] {
        Encoded out = encode(d, params);
        return sum_all(mul(out.e_d, out.e_d));
    };
    CHECK(max_rel_grad_error(params.embeddings.tensor, loss) < 1e-4);
    CHECK(max_rel_grad_error(params.attn_layers[0].wq.tensor, loss) < 1e-4);
    CHECK(max_rel_grad_error(params.attn_layers[0].ff1.tensor, loss) < 1e-4);
}
