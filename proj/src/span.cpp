// SPDX-License-Identifier: Apache-2.0

#include "trimf/span.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "trimf/errors.hpp"

namespace trimf {

std::vector<Span> enumerate_spans(size_t n, size_t max_width) {
    if (n == 0) throw_contract("enumerate_spans needs n >= 1");
    std::vector<Span> out;
    for (size_t begin = 0; begin < n; ++begin)
        for (size_t end = begin + 1; end <= std::min(n, begin + max_width);
             ++end)
            out.push_back({begin, end});
    return out;
}

SpanTriggerParams init_span_trigger_params(size_t h, size_t h_s, size_t h_mr,
                                           size_t max_width, size_t width_dim,
                                           uint64_t seed) {
    Rng rng(seed);
    SpanTriggerParams p;
    p.width_embeddings = {"span.width_embeddings", "classifier",
                          Tensor::randn(max_width + 1, width_dim, rng, 0.0,
                                        0.02, true)};
    p.pair_read_form = {"trigger.pair_read_form", "trigger",
                        Tensor::randn(h_s, h_mr, rng, 0.0,
                                      1.0 / std::sqrt(double(h_s)), true)};
    p.trigger_proj = {"trigger.proj", "trigger",
                      Tensor::randn(h_mr, h, rng, 0.0,
                                    1.0 / std::sqrt(double(h_mr)), true)};
    return p;
}

Tensor encode_span(const Span& s, const Tensor& e_g,
                   const Tensor& width_embeddings) {
    if (s.begin >= s.end || s.end > e_g.rows())
        throw_contract("span out of range");
    if (s.width() >= width_embeddings.rows())
        throw_contract("span wider than the width-embedding table");
    Tensor pooled = reduce(ReduceKind::Max, slice_rows(e_g, s.begin, s.end), 0);
    Tensor width = slice_rows(width_embeddings, s.width(), s.width() + 1);
    return concat_cols({pooled, width});
}

Tensor local_context(const Span& a, const Span& b, const Tensor& e_g) {
    if (a.overlaps(b)) throw_contract("local_context needs disjoint spans");
    size_t gap_begin = std::min(a.end, b.end);
    size_t gap_end = std::max(a.begin, b.begin);
    if (gap_begin >= gap_end) return Tensor::zeros(1, e_g.cols());
    return reduce(ReduceKind::Max, slice_rows(e_g, gap_begin, gap_end), 0);
}

Tensor pair_relation_read(const Tensor& head_enc, const Tensor& tail_enc,
                          const Tensor& relation_slots, const Tensor& form) {
    Tensor head_read = read_normal(head_enc, relation_slots, form);
    Tensor tail_read = read_normal(tail_enc, relation_slots, form);
    return scale(add(head_read, tail_read), 0.5);
}

TriggerAttendOut trigger_attend(const Tensor& m_r, const Tensor& e_g,
                                const Tensor& trigger_proj) {
    Tensor query = matmul(m_r, trigger_proj);  // 1 x h
    TriggerAttendOut out;
    out.weights = softmax_rows(matmul(query, transpose(e_g)));  // 1 x n
    out.g_trigger = matmul(out.weights, e_g);
    return out;
}

Tensor build_pair(const Tensor& head_enc, const Tensor& tail_enc,
                  const Tensor& g_local, const Tensor& g_trigger) {
    return concat_cols({head_enc, tail_enc, g_local, g_trigger});
}

TriggerRanking extract_triggers(const std::vector<double>& weights,
                                const std::vector<std::string>& words,
                                size_t k, const std::set<std::string>& stopwords,
                                const std::set<size_t>& entity_word_indices) {
    if (weights.size() != words.size())
        throw_contract("trigger weights do not align with words");
    std::vector<size_t> order(words.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return weights[a] > weights[b];
    });
    TriggerRanking out;
    for (size_t i : order) {
        if (out.items.size() >= k) break;
        if (entity_word_indices.count(i)) continue;
        std::string lower = words[i];
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (stopwords.count(lower)) continue;
        out.items.push_back({words[i], weights[i]});
    }
    return out;
}

const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> kStopwords = {
        "a", "about", "above", "after", "again", "against", "all", "am", "an",
        "and", "any", "are", "as", "at", "be", "because", "been", "before",
        "being", "below", "between", "both", "but", "by", "can", "cannot",
        "could", "did", "do", "does", "doing", "down", "during", "each",
        "few", "for", "from", "further", "had", "has", "have", "having", "he",
        "her", "here", "hers", "herself", "him", "himself", "his", "how", "i",
        "if", "in", "into", "is", "it", "its", "itself", "just", "me", "more",
        "most", "my", "myself", "no", "nor", "not", "now", "of", "off", "on",
        "once", "only", "or", "other", "our", "ours", "ourselves", "out",
        "over", "own", "same", "she", "should", "so", "some", "such", "than",
        "that", "the", "their", "theirs", "them", "themselves", "then",
        "there", "these", "they", "this", "those", "through", "to", "too",
        "under", "until", "up", "very", "was", "we", "were", "what", "when",
        "where", "which", "while", "who", "whom", "why", "will", "with",
        "would", "you", "your", "yours", "yourself", "yourselves"};
    return kStopwords;
}

std::set<std::string> load_stopwords(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot read stopword file: " + path);
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.insert(line);
    }
    return out;
}

}  // namespace trimf
