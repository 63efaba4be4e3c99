// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trimf/config.hpp"
#include "trimf/corpus.hpp"
#include "trimf/encoder.hpp"
#include "trimf/eval.hpp"
#include "trimf/graph.hpp"
#include "trimf/memory.hpp"
#include "trimf/mfa.hpp"
#include "trimf/span.hpp"

namespace trimf {

// Complete TriMF model state.
struct Model {
    TrainConfig cfg;
    SubwordVocab vocab;
    std::vector<std::string> entity_types;     // without None
    std::vector<std::string> relation_types;
    std::vector<std::string> dependency_labels;

    EncoderParams encoder;
    MfaForms mfa_forms;
    GraphParams graph;
    SpanTriggerParams span_trigger;
    Parameter entity_classifier;    // h_s x h_me
    Parameter relation_classifier;  // h_r x h_mr
    Memory entity_memory;           // rows: entity_types + None
    Memory relation_memory;         // rows: relation_types

    size_t h() const { return size_t(cfg.hidden); }
    size_t h_s() const { return h() + size_t(cfg.width_embed_dim); }
    size_t h_r() const { return 2 * h_s() + 2 * h(); }
    size_t none_index() const { return entity_types.size(); }

    std::vector<Parameter*> parameters();
    std::vector<Parameter*> parameters_for_groups(
        const std::set<std::string>& groups);
};

Model init_model(const TrainConfig& cfg, const Corpus& corpus);

// Tokenization and dependency graph, computed once per sentence.
struct PreparedSentence {
    const Sentence* sentence = nullptr;
    SubwordDecomposition sub;
    DependencyGraph dep;
};

PreparedSentence prepare_sentence(const Sentence& s, const Model& model);

struct PipelineOptions {
    bool stage2 = true;      // MFA and trigger sensor active (subject to cfg)
    bool train_mode = false; // dropout and semantic-edge sampling
    Rng* rng = nullptr;      // required in train mode
    std::vector<AttentionTrace>* traces = nullptr;
};

struct PipelineOut {
    Tensor e_g;    // n x h, word representations entering span encoding
    Tensor e_cls;  // 1 x h
};

PipelineOut run_pipeline(const Model& model, const PreparedSentence& ps,
                         const PipelineOptions& opt);

// --- classification ---

// softmax over bilinear scores against every entity slot, None included
Tensor entity_probs(const Model& model, const Tensor& span_enc);
Tensor entity_scores(const Model& model, const Tensor& span_enc);
// independent sigmoid per relation category
Tensor relation_probs(const Model& model, const Tensor& pair_enc);
Tensor relation_scores(const Model& model, const Tensor& pair_enc);

// Relation-side features for one ordered, non-overlapping span pair.
struct PairFeatures {
    Tensor encoding;                     // 1 x h_r
    std::optional<Tensor> trigger_weights;  // 1 x n when trigger sensor ran
};

PairFeatures build_pair_features(const Model& model, const Tensor& e_g,
                                 const Span& head, const Span& tail,
                                 const Tensor& head_enc, const Tensor& tail_enc,
                                 bool stage2);

// --- candidates ---

struct EntityCandidate {
    Span span;
    size_t label;  // index into entity categories, None = entity_types.size()
};

struct PairCandidate {
    Span head;
    Span tail;
    std::vector<char> targets;  // per relation type
};

struct Candidates {
    std::vector<EntityCandidate> spans;
    std::vector<PairCandidate> pairs;
};

// Gold spans and pairs plus seeded uniform negatives; negatives never
// coincide with gold items.
Candidates sample_negatives(const Model& model, const Sentence& s,
                            Rng& rng);

// --- loss ---

struct SentenceLossParts {
    std::vector<Tensor> span_encodings;      // aligned with candidates.spans
    std::vector<size_t> span_labels;
    std::vector<Tensor> pair_encodings;      // aligned with candidates.pairs
    std::vector<std::vector<char>> pair_targets;
};

SentenceLossParts forward_candidates(const Model& model,
                                     const PreparedSentence& ps,
                                     const Candidates& cands,
                                     const PipelineOptions& opt);

// mean entity cross-entropy + mean relation binary cross-entropy
Tensor joint_loss(const Model& model, const std::vector<SentenceLossParts>& batch,
                  Rng& dropout_rng, bool train_mode);

// --- prediction ---

struct Prediction {
    struct Entity {
        Span span;
        std::string type;
        double probability;
    };
    struct Relation {
        Span head;
        Span tail;
        std::string type;
        double probability;
        std::vector<double> trigger_weights;  // per word, empty when sensor off
    };
    std::vector<Entity> entities;
    std::vector<Relation> relations;
};

Prediction predict(const Model& model, const PreparedSentence& ps,
                   double threshold, bool stage2 = true);

SentencePrediction to_sentence_prediction(const Prediction& p);

}  // namespace trimf
