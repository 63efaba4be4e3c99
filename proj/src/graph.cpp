// SPDX-License-Identifier: Apache-2.0

#include "trimf/graph.hpp"

#include <algorithm>
#include <cmath>

#include "trimf/errors.hpp"

namespace trimf {

FusionMode fusion_mode_from_string(const std::string& s) {
    if (s == "weighted") return FusionMode::Weighted;
    if (s == "mean") return FusionMode::Mean;
    if (s == "sum") return FusionMode::Sum;
    if (s == "max") return FusionMode::Max;
    if (s == "semantic_only") return FusionMode::SemanticOnly;
    if (s == "syntactic_only") return FusionMode::SyntacticOnly;
    if (s == "none") return FusionMode::None;
    throw_config("unknown fusion mode: " + s);
}

std::string fusion_mode_to_string(FusionMode m) {
    switch (m) {
        case FusionMode::Weighted: return "weighted";
        case FusionMode::Mean: return "mean";
        case FusionMode::Sum: return "sum";
        case FusionMode::Max: return "max";
        case FusionMode::SemanticOnly: return "semantic_only";
        case FusionMode::SyntacticOnly: return "syntactic_only";
        case FusionMode::None: return "none";
    }
    throw_contract("bad fusion mode");
}

GraphParams init_graph_params(size_t h, size_t label_count, uint64_t seed) {
    Rng rng(seed);
    double std_w = 1.0 / std::sqrt(double(h));
    GraphParams p;
    p.h = h;
    p.label_count = label_count;
    for (size_t r = 0; r < 2 * label_count; ++r)
        p.relation_weights.push_back(
            {"graph.rel" + std::to_string(r), "graph",
             Tensor::randn(h, h, rng, 0.0, std_w, true)});
    p.self_weight = {"graph.self", "graph",
                     Tensor::randn(h, h, rng, 0.0, std_w, true)};
    p.sem_proj = {"graph.sem_proj", "graph",
                  Tensor::randn(h, h, rng, 0.0, std_w, true)};
    p.fusion = {"graph.fusion", "graph",
                Tensor::randn(h, h, rng, 0.0, std_w, true)};
    return p;
}

Tensor rgcn_layer(const Tensor& h, const DependencyGraph& g,
                  const GraphParams& params) {
    size_t n = h.rows();
    if (g.n != n) throw_dim("rgcn node count does not match encoding rows");
    size_t rel_count = 2 * params.label_count;
    // per-relation normalized adjacency, A_r[i][j] = 1/c_{i,r} for j in N_i^r
    std::vector<std::vector<double>> adj(rel_count,
                                         std::vector<double>(n * n, 0.0));
    std::vector<std::vector<size_t>> degree(rel_count,
                                            std::vector<size_t>(n, 0));
    for (const auto& e : g.edges) {
        if (e.label >= params.label_count)
            throw_corpus("dependency label index " + std::to_string(e.label) +
                         " outside the label vocabulary");
        if (e.head >= n || e.dependent >= n)
            throw_corpus("dependency edge endpoint out of range");
        // forward: dependent receives from head; inverse: head from dependent
        adj[e.label][e.dependent * n + e.head] += 1.0;
        ++degree[e.label][e.dependent];
        adj[e.label + params.label_count][e.head * n + e.dependent] += 1.0;
        ++degree[e.label + params.label_count][e.head];
    }
    Tensor acc = matmul(h, params.self_weight.tensor);
    for (size_t r = 0; r < rel_count; ++r) {
        bool any = false;
        for (size_t i = 0; i < n && !any; ++i) any = degree[r][i] > 0;
        if (!any) continue;
        for (size_t i = 0; i < n; ++i)
            if (degree[r][i] > 0)
                for (size_t j = 0; j < n; ++j)
                    adj[r][i * n + j] /= double(degree[r][i]);
        Tensor a = Tensor::from(n, n, adj[r]);
        acc = add(acc, matmul(a, matmul(h, params.relation_weights[r].tensor)));
    }
    return leaky_relu(acc);
}

SemanticAdjacency semantic_adjacency(const Tensor& h, const GraphParams& params,
                                     size_t sample_k, Rng& rng,
                                     bool train_mode) {
    size_t n = h.rows();
    if (n == 0) throw_contract("semantic_adjacency on empty node set");
    Tensor z = leaky_relu(matmul(h, params.sem_proj.tensor));
    Tensor scores = matmul(z, transpose(z));  // n x n
    SemanticAdjacency out;
    out.kept.resize(n);
    // -inf mask over dropped entries; self always kept
    std::vector<double> mask(n * n, 0.0);
    constexpr double kNegInf = -1e30;
    for (size_t i = 0; i < n; ++i) {
        std::vector<size_t> others;
        for (size_t j = 0; j < n; ++j)
            if (j != i) others.push_back(j);
        if (train_mode && others.size() > sample_k) {
            auto picks = rng.sample_without_replacement(others.size(), sample_k);
            std::vector<size_t> chosen;
            for (size_t p : picks) chosen.push_back(others[p]);
            std::sort(chosen.begin(), chosen.end());
            others = std::move(chosen);
        }
        out.kept[i] = others;
        std::vector<char> keep(n, 0);
        keep[i] = 1;
        for (size_t j : others) keep[j] = 1;
        for (size_t j = 0; j < n; ++j)
            if (!keep[j]) mask[i * n + j] = kNegInf;
    }
    out.weights = softmax_rows(add(scores, Tensor::from(n, n, std::move(mask))));
    return out;
}

Tensor semantic_layer(const Tensor& h, const SemanticAdjacency& adj,
                      const GraphParams& params) {
    // H~_i = sum_j alpha_ij * (W~ H)_j, with alpha zero outside kept sets
    return matmul(adj.weights, matmul(h, params.sem_proj.tensor));
}

Tensor weighted_fuse(const Tensor& h_sem, const Tensor& h_syn,
                     const Tensor& e_cls, const GraphParams& params,
                     FusionMode mode, Tensor* pair_weights_out) {
    switch (mode) {
        case FusionMode::Mean:
            return scale(add(h_sem, h_syn), 0.5);
        case FusionMode::Sum:
            return add(h_sem, h_syn);
        case FusionMode::Max:
            return emax(h_sem, h_syn);
        case FusionMode::SemanticOnly:
            return h_sem;
        case FusionMode::SyntacticOnly:
            return h_syn;
        case FusionMode::None:
            throw_contract("weighted_fuse called with mode none");
        case FusionMode::Weighted:
            break;
    }
    if (h_sem.rows() != h_syn.rows() || h_sem.cols() != h_syn.cols())
        throw_dim("fusion inputs must share a shape");
    Tensor q = matmul(e_cls, params.fusion.tensor);  // 1 x h
    Tensor s_sem = matmul(q, transpose(h_sem));      // 1 x n
    Tensor s_syn = matmul(q, transpose(h_syn));
    // per-node softmax over the (semantic, syntactic) score pair
    Tensor pair = softmax_rows(
        concat_cols({transpose(s_sem), transpose(s_syn)}));  // n x 2
    if (pair_weights_out) *pair_weights_out = pair;
    Tensor w_sem = slice_cols(pair, 0, 1);
    Tensor w_syn = slice_cols(pair, 1, 2);
    return add(scale_rows(h_sem, w_sem), scale_rows(h_syn, w_syn));
}

Tensor project_words(const Tensor& h_fused, const Tensor& e_w_bar) {
    if (h_fused.rows() != e_w_bar.rows() || h_fused.cols() != e_w_bar.cols())
        throw_dim("project_words shape mismatch");
    return scale(add(h_fused, e_w_bar), 0.5);
}

Tensor graph_fusion(const Tensor& e_w_bar, const Tensor& e_cls,
                    const DependencyGraph& g, const GraphParams& params,
                    FusionMode mode, size_t sample_k, Rng& rng,
                    bool train_mode) {
    if (mode == FusionMode::None) return e_w_bar;
    Tensor h_syn, h_sem;
    if (mode != FusionMode::SemanticOnly)
        h_syn = rgcn_layer(e_w_bar, g, params);
    if (mode != FusionMode::SyntacticOnly) {
        SemanticAdjacency adj =
            semantic_adjacency(e_w_bar, params, sample_k, rng, train_mode);
        h_sem = semantic_layer(e_w_bar, adj, params);
    }
    Tensor fused;
    if (mode == FusionMode::SemanticOnly)
        fused = h_sem;
    else if (mode == FusionMode::SyntacticOnly)
        fused = h_syn;
    else
        fused = weighted_fuse(h_sem, h_syn, e_cls, params, mode);
    return project_words(fused, e_w_bar);
}

}  // namespace trimf
