// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "trimf/corpus.hpp"

namespace trimf {

// A sentence's predictions in gold-comparable form.
struct SentencePrediction {
    std::vector<EntityMention> entities;
    // relations resolved to spans so they can be scored without entity lists
    struct Relation {
        std::string type;
        EntityMention head;
        EntityMention tail;
        double probability = 0.0;
    };
    std::vector<Relation> relations;
};

enum class EvalRegime { Strict, Boundary };
enum class Averaging { Micro, Macro };

struct PrfScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    size_t gold = 0;
    size_t predicted = 0;
    size_t correct = 0;
};

struct EvalReport {
    EvalRegime regime = EvalRegime::Strict;
    Averaging averaging = Averaging::Micro;
    std::vector<std::pair<std::string, PrfScores>> entity_by_type;
    std::vector<std::pair<std::string, PrfScores>> relation_by_type;
    PrfScores entity;
    PrfScores relation;
};

// Entity correct iff span+label match. Relation strict-correct iff type,
// both endpoint spans, and endpoint labels match; boundary drops endpoint
// labels.
EvalReport score(const std::vector<Sentence>& gold,
                 const std::vector<SentencePrediction>& predicted,
                 EvalRegime regime, Averaging averaging,
                 const std::vector<std::string>& entity_types,
                 const std::vector<std::string>& relation_types);

std::string report_to_json(const EvalReport& report);
std::string report_to_table(const EvalReport& report);

}  // namespace trimf
