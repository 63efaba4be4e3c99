// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace trimf {

struct EntityMention {
    std::string type;
    size_t begin = 0;  // half-open word indices
    size_t end = 0;
};

struct RelationMention {
    std::string type;
    size_t head = 0;  // indices into the sentence's entity list
    size_t tail = 0;
};

struct DepToken {
    int head = -1;  // word index, -1 for the root
    std::string label;
};

struct Sentence {
    std::vector<std::string> tokens;
    std::vector<EntityMention> entities;
    std::vector<RelationMention> relations;
    std::vector<DepToken> deps;
};

struct Corpus {
    std::vector<Sentence> sentences;
    std::vector<std::string> entity_types;
    std::vector<std::string> relation_types;
    std::vector<std::string> dependency_labels;
};

// JSON file: {entity_types, relation_types, dependency_labels,
// sentences: [{tokens, entities, relations, deps}]}. Validates every
// invariant and reports all violations at once.
Corpus load_corpus(const std::string& path);
Corpus parse_corpus_json(const std::string& text);
std::string corpus_to_json(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::string& path);
void validate_corpus(const Corpus& corpus);

struct SynthSpec {
    size_t n_sentences = 50;
    size_t n_entity_types = 3;
    size_t n_relation_types = 2;
    size_t triggers_per_relation = 2;
    uint64_t seed = 1;
};

// Template sentences where every relation instance co-occurs with exactly
// one planted trigger word from its relation's lexicon; left-headed
// dependency parses; complete gold annotations.
Corpus generate_synthetic(const SynthSpec& spec);

// The trigger lexicon the generator plants, for test verification.
std::vector<std::vector<std::string>> synthetic_trigger_lexicon(
    const SynthSpec& spec);

}  // namespace trimf
