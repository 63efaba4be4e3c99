// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "trimf/optim.hpp"
#include "trimf/tensor.hpp"

namespace trimf {

// Corpus-built subword vocabulary: greedy longest-match pieces plus the
// reserved sentence token and unknown piece.
class SubwordVocab {
public:
    static constexpr int kCls = 0;
    static constexpr int kUnk = 1;

    SubwordVocab();
    explicit SubwordVocab(std::vector<std::string> pieces);

    // Top `max_pieces` substrings of length 2..6 by frequency over the
    // lowercased corpus words.
    static SubwordVocab build(const std::vector<std::string>& words,
                              size_t max_pieces = 2000);

    int lookup(const std::string& piece) const;  // kUnk when absent
    size_t size() const { return pieces_.size(); }
    const std::string& piece(size_t id) const { return pieces_[id]; }
    const std::vector<std::string>& pieces() const { return pieces_; }

    // One subword per line, rank order = id order (reserved tokens included).
    void save(const std::string& path) const;
    static SubwordVocab load(const std::string& path);

private:
    std::vector<std::string> pieces_;
    std::unordered_map<std::string, int> index_;
    void reindex();
};

struct SubwordDecomposition {
    std::vector<int> subword_ids;  // position 0 is the sentence token
    std::vector<std::string> subword_texts;
    // per-word half-open [begin, end) over subword positions, 1-based
    std::vector<std::pair<size_t, size_t>> word_spans;

    size_t subword_count() const { return subword_ids.size() - 1; }
    size_t word_count() const { return word_spans.size(); }

    // spans re-indexed over E^d rows (sentence token dropped)
    std::vector<std::pair<size_t, size_t>> spans_over_subwords() const {
        std::vector<std::pair<size_t, size_t>> out;
        out.reserve(word_spans.size());
        for (auto [b, e] : word_spans) out.emplace_back(b - 1, e - 1);
        return out;
    }
};

// Deterministic greedy longest-match, falling back to fixed 3-character
// chunks; input is lowercased.
SubwordDecomposition tokenize(const std::vector<std::string>& words,
                              const SubwordVocab& vocab);

// Small trainable stand-in for a pre-trained transformer.
struct EncoderParams {
    size_t hidden = 64;
    size_t layers = 2;
    size_t heads = 4;
    Parameter embeddings;  // vocab x h
    struct Layer {
        Parameter wq, wk, wv, wo;  // h x h
        Parameter ff1;             // h x 2h
        Parameter ff2;             // 2h x h
    };
    std::vector<Layer> attn_layers;

    void collect(std::vector<Parameter*>& out);
};

EncoderParams init_encoder(size_t vocab_size, size_t hidden, size_t layers,
                           size_t heads, uint64_t seed);

struct Encoded {
    Tensor e_d;    // m x h, subword rows (sentence token excluded)
    Tensor e_cls;  // 1 x h
};

Encoded encode(const SubwordDecomposition& sub, const EncoderParams& params);

// Per-word max over its subword rows (f_w).
Tensor pool_words(const Tensor& e,
                  const std::vector<std::pair<size_t, size_t>>& word_spans);

}  // namespace trimf
