// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "trimf/memory.hpp"
#include "trimf/optim.hpp"
#include "trimf/tensor.hpp"

namespace trimf {

// Half-open word-index interval.
struct Span {
    size_t begin = 0;
    size_t end = 0;

    size_t width() const { return end - begin; }
    bool operator==(const Span& o) const {
        return begin == o.begin && end == o.end;
    }
    bool operator<(const Span& o) const {
        return begin != o.begin ? begin < o.begin : end < o.end;
    }
    bool overlaps(const Span& o) const {
        return begin < o.end && o.begin < end;
    }
};

// All spans of width 1..min(max_width, n), ordered by (begin, end).
std::vector<Span> enumerate_spans(size_t n, size_t max_width);

struct SpanTriggerParams {
    Parameter width_embeddings;  // (max_width + 1) x width_dim
    Parameter pair_read_form;    // h_s x h_mr   (group trigger)
    Parameter trigger_proj;      // h_mr x h     (dimension bridge)

    void collect(std::vector<Parameter*>& out) {
        out.push_back(&width_embeddings);
        out.push_back(&pair_read_form);
        out.push_back(&trigger_proj);
    }
};

SpanTriggerParams init_span_trigger_params(size_t h, size_t h_s, size_t h_mr,
                                           size_t max_width, size_t width_dim,
                                           uint64_t seed);

// f_s: max over span rows of E^g, concatenated with the width embedding.
Tensor encode_span(const Span& s, const Tensor& e_g,
                   const Tensor& width_embeddings);

// Max over strictly-between word rows; zero vector when the gap is empty.
Tensor local_context(const Span& a, const Span& b, const Tensor& e_g);

// Mean of the two normal reads of head and tail over relation memory.
Tensor pair_relation_read(const Tensor& head_enc, const Tensor& tail_enc,
                          const Tensor& relation_slots, const Tensor& form);

struct TriggerAttendOut {
    Tensor g_trigger;  // 1 x h
    Tensor weights;    // 1 x n, sums to 1
};

// Softmax similarity of the (projected) pair relation representation with
// each word, then the weighted word average.
TriggerAttendOut trigger_attend(const Tensor& m_r, const Tensor& e_g,
                                const Tensor& trigger_proj);

// f_r: ordered concatenation [head, tail, g_local, g_trigger].
Tensor build_pair(const Tensor& head_enc, const Tensor& tail_enc,
                  const Tensor& g_local, const Tensor& g_trigger);

struct TriggerRanking {
    struct Item {
        std::string word;
        double score;
    };
    std::vector<Item> items;  // scores non-increasing
};

// Top-k words by weight, entity-surface words and stopwords removed. Ties
// break toward the earlier position.
TriggerRanking extract_triggers(const std::vector<double>& weights,
                                const std::vector<std::string>& words,
                                size_t k, const std::set<std::string>& stopwords,
                                const std::set<size_t>& entity_word_indices);

// Shipped list of English function words; override with a file of one word
// per line.
const std::set<std::string>& default_stopwords();
std::set<std::string> load_stopwords(const std::string& path);

}  // namespace trimf
