// SPDX-License-Identifier: Apache-2.0

#include "trimf/encoder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>

#include "trimf/errors.hpp"

namespace trimf {

namespace {

constexpr size_t kMinPiece = 2;
constexpr size_t kMaxPiece = 6;

std::string lowercase(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

SubwordVocab::SubwordVocab() : pieces_{"[CLS]", "[UNK]"} { reindex(); }

SubwordVocab::SubwordVocab(std::vector<std::string> pieces)
    : pieces_(std::move(pieces)) {
    if (pieces_.size() < 2 || pieces_[0] != "[CLS]" || pieces_[1] != "[UNK]")
        throw_corpus("vocabulary must start with [CLS] and [UNK]");
    reindex();
}

void SubwordVocab::reindex() {
    index_.clear();
    for (size_t i = 0; i < pieces_.size(); ++i) index_[pieces_[i]] = int(i);
}

SubwordVocab SubwordVocab::build(const std::vector<std::string>& words,
                                 size_t max_pieces) {
    // frequency of substrings, stable tie-break by first appearance
    std::unordered_map<std::string, std::pair<size_t, size_t>> freq;  // count, first
    size_t order = 0;
    for (const auto& raw : words) {
        std::string w = lowercase(raw);
        for (size_t len = kMinPiece; len <= kMaxPiece; ++len) {
            if (w.size() < len) break;
            for (size_t i = 0; i + len <= w.size(); ++i) {
                auto [it, inserted] =
                    freq.try_emplace(w.substr(i, len), 0, order++);
                ++it->second.first;
            }
        }
    }
    std::vector<std::pair<std::string, std::pair<size_t, size_t>>> ranked(
        freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.first != b.second.first)
            return a.second.first > b.second.first;
        return a.second.second < b.second.second;
    });
    std::vector<std::string> pieces{"[CLS]", "[UNK]"};
    for (const auto& [piece, _] : ranked) {
        if (pieces.size() >= max_pieces + 2) break;
        pieces.push_back(piece);
    }
    return SubwordVocab(std::move(pieces));
}

int SubwordVocab::lookup(const std::string& piece) const {
    auto it = index_.find(piece);
    return it == index_.end() ? kUnk : it->second;
}

void SubwordVocab::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_io("cannot write vocabulary file: " + path);
    for (const auto& p : pieces_) out << p << "\n";
}

SubwordVocab SubwordVocab::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot read vocabulary file: " + path);
    std::vector<std::string> pieces;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) pieces.push_back(line);
    }
    return SubwordVocab(std::move(pieces));
}

SubwordDecomposition tokenize(const std::vector<std::string>& words,
                              const SubwordVocab& vocab) {
    SubwordDecomposition out;
    out.subword_ids.push_back(SubwordVocab::kCls);
    out.subword_texts.push_back("[CLS]");
    for (const auto& raw : words) {
        std::string w = lowercase(raw);
        // trim ASCII whitespace
        while (!w.empty() && std::isspace(static_cast<unsigned char>(w.front())))
            w.erase(w.begin());
        while (!w.empty() && std::isspace(static_cast<unsigned char>(w.back())))
            w.pop_back();
        if (w.empty()) throw_corpus("empty word in input sentence");
        size_t begin = out.subword_ids.size();
        size_t pos = 0;
        while (pos < w.size()) {
            // greedy longest match up to kMaxPiece characters
            size_t best_len = 0;
            int best_id = SubwordVocab::kUnk;
            size_t max_len = std::min(kMaxPiece, w.size() - pos);
            for (size_t len = max_len; len >= 1; --len) {
                auto id = vocab.lookup(w.substr(pos, len));
                if (id != SubwordVocab::kUnk) {
                    best_len = len;
                    best_id = id;
                    break;
                }
            }
            if (best_len == 0) {
                // fixed 3-character chunk fallback
                best_len = std::min<size_t>(3, w.size() - pos);
                best_id = vocab.lookup(w.substr(pos, best_len));
            }
            out.subword_ids.push_back(best_id);
            out.subword_texts.push_back(w.substr(pos, best_len));
            pos += best_len;
        }
        out.word_spans.emplace_back(begin, out.subword_ids.size());
    }
    return out;
}

void EncoderParams::collect(std::vector<Parameter*>& out) {
    out.push_back(&embeddings);
    for (auto& layer : attn_layers) {
        out.push_back(&layer.wq);
        out.push_back(&layer.wk);
        out.push_back(&layer.wv);
        out.push_back(&layer.wo);
        out.push_back(&layer.ff1);
        out.push_back(&layer.ff2);
    }
}

EncoderParams init_encoder(size_t vocab_size, size_t hidden, size_t layers,
                           size_t heads, uint64_t seed) {
    if (hidden % heads != 0)
        throw_config("encoder hidden size must be divisible by head count");
    Rng rng(seed);
    EncoderParams p;
    p.hidden = hidden;
    p.layers = layers;
    p.heads = heads;
    double proj_std = 1.0 / std::sqrt(double(hidden));
    p.embeddings = {"encoder.embeddings", "encoder",
                    Tensor::randn(vocab_size, hidden, rng, 0.0, 0.02, true)};
    for (size_t l = 0; l < layers; ++l) {
        std::string base = "encoder.layer" + std::to_string(l) + ".";
        auto mk = [&](const std::string& name, size_t r, size_t c) {
            return Parameter{base + name, "encoder",
                             Tensor::randn(r, c, rng, 0.0, proj_std, true)};
        };
        EncoderParams::Layer layer{
            mk("wq", hidden, hidden), mk("wk", hidden, hidden),
            mk("wv", hidden, hidden), mk("wo", hidden, hidden),
            mk("ff1", hidden, 2 * hidden), mk("ff2", 2 * hidden, hidden)};
        p.attn_layers.push_back(std::move(layer));
    }
    return p;
}

namespace {

Tensor sinusoidal_positions(size_t count, size_t hidden) {
    std::vector<double> v(count * hidden);
    for (size_t pos = 0; pos < count; ++pos)
        for (size_t i = 0; i < hidden; ++i) {
            double rate = std::pow(10000.0, -double(2 * (i / 2)) / double(hidden));
            double angle = double(pos) * rate;
            v[pos * hidden + i] = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    return Tensor::from(count, hidden, std::move(v));
}

}  // namespace

Encoded encode(const SubwordDecomposition& sub, const EncoderParams& params) {
    for (int id : sub.subword_ids)
        if (id < 0 || size_t(id) >= params.embeddings.tensor.rows())
            throw_contract("subword id out of embedding range");
    size_t h = params.hidden;
    size_t heads = params.heads;
    size_t dh = h / heads;
    std::vector<size_t> ids(sub.subword_ids.begin(), sub.subword_ids.end());
    Tensor x = add(gather_rows(params.embeddings.tensor, ids),
                   sinusoidal_positions(ids.size(), h));
    double inv_sqrt_dh = 1.0 / std::sqrt(double(dh));
    for (const auto& layer : params.attn_layers) {
        Tensor q = matmul(x, layer.wq.tensor);
        Tensor k = matmul(x, layer.wk.tensor);
        Tensor v = matmul(x, layer.wv.tensor);
        std::vector<Tensor> head_outs;
        for (size_t hd = 0; hd < heads; ++hd) {
            Tensor qh = slice_cols(q, hd * dh, (hd + 1) * dh);
            Tensor kh = slice_cols(k, hd * dh, (hd + 1) * dh);
            Tensor vh = slice_cols(v, hd * dh, (hd + 1) * dh);
            Tensor attn =
                softmax_rows(scale(matmul(qh, transpose(kh)), inv_sqrt_dh));
            head_outs.push_back(matmul(attn, vh));
        }
        x = add(x, matmul(concat_cols(head_outs), layer.wo.tensor));
        x = add(x, matmul(leaky_relu(matmul(x, layer.ff1.tensor)),
                          layer.ff2.tensor));
    }
    Encoded out;
    out.e_cls = slice_rows(x, 0, 1);
    out.e_d = slice_rows(x, 1, ids.size());
    return out;
}

Tensor pool_words(const Tensor& e,
                  const std::vector<std::pair<size_t, size_t>>& word_spans) {
    std::vector<Tensor> rows;
    rows.reserve(word_spans.size());
    for (auto [b, end] : word_spans) {
        if (b >= end || end > e.rows())
            throw_contract("word span out of range in pool_words");
        rows.push_back(reduce(ReduceKind::Max, slice_rows(e, b, end), 0));
    }
    return concat_rows(rows);
}

}  // namespace trimf
