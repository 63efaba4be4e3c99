// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trimf/optim.hpp"
#include "trimf/rng.hpp"
#include "trimf/tensor.hpp"

namespace trimf {

// Typed dependency edges over the words of one sentence. Directed edges are
// used both forward and as typed inverse relations, so the effective
// relation vocabulary is twice the label count.
struct DependencyGraph {
    struct Edge {
        size_t head;
        size_t dependent;
        size_t label;  // index into the corpus dependency-label vocabulary
    };
    size_t n = 0;  // word count
    std::vector<Edge> edges;
};

enum class FusionMode {
    Weighted,
    Mean,
    Sum,
    Max,
    SemanticOnly,
    SyntacticOnly,
    None,
};

FusionMode fusion_mode_from_string(const std::string& s);
std::string fusion_mode_to_string(FusionMode m);

struct GraphParams {
    size_t h = 0;
    size_t label_count = 0;  // dependency label vocabulary size
    std::vector<Parameter> relation_weights;  // 2 * label_count, each h x h
    Parameter self_weight;  // h x h
    Parameter sem_proj;     // h x h
    Parameter fusion;       // h x h

    void collect(std::vector<Parameter*>& out) {
        for (auto& w : relation_weights) out.push_back(&w);
        out.push_back(&self_weight);
        out.push_back(&sem_proj);
        out.push_back(&fusion);
    }
};

GraphParams init_graph_params(size_t h, size_t label_count, uint64_t seed);

// Relational graph convolution with mean-normalized typed neighbor sums.
Tensor rgcn_layer(const Tensor& h, const DependencyGraph& g,
                  const GraphParams& params);

// Kept-neighbor structure of the semantic graph: per node the softmax over
// its sampled (or full) neighborhood including self.
struct SemanticAdjacency {
    Tensor weights;                         // n x n, masked-softmax rows
    std::vector<std::vector<size_t>> kept;  // neighbor indices per node (self excluded)
};

SemanticAdjacency semantic_adjacency(const Tensor& h, const GraphParams& params,
                                     size_t sample_k, Rng& rng, bool train_mode);

Tensor semantic_layer(const Tensor& h, const SemanticAdjacency& adj,
                      const GraphParams& params);

Tensor weighted_fuse(const Tensor& h_sem, const Tensor& h_syn,
                     const Tensor& e_cls, const GraphParams& params,
                     FusionMode mode, Tensor* pair_weights_out = nullptr);

// Elementwise average of the fused node representations and the word
// encodings (residual-style).
Tensor project_words(const Tensor& h_fused, const Tensor& e_w_bar);

// Whole module: mode None bypasses everything and returns e_w_bar.
Tensor graph_fusion(const Tensor& e_w_bar, const Tensor& e_cls,
                    const DependencyGraph& g, const GraphParams& params,
                    FusionMode mode, size_t sample_k, Rng& rng, bool train_mode);

}  // namespace trimf
