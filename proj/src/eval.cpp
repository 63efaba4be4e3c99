// SPDX-License-Identifier: Apache-2.0

#include "trimf/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "trimf/errors.hpp"

namespace trimf {

namespace {

struct Counts {
    size_t gold = 0, predicted = 0, correct = 0;
};

PrfScores to_prf(const Counts& c) {
    PrfScores s;
    s.gold = c.gold;
    s.predicted = c.predicted;
    s.correct = c.correct;
    s.precision = c.predicted == 0 ? 0.0 : double(c.correct) / double(c.predicted);
    s.recall = c.gold == 0 ? 0.0 : double(c.correct) / double(c.gold);
    s.f1 = (s.precision + s.recall) == 0.0
               ? 0.0
               : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

// match keys: entities as (type, begin, end); relations per regime
std::string entity_key(const EntityMention& e, bool with_type) {
    std::string k = std::to_string(e.begin) + ":" + std::to_string(e.end);
    if (with_type) k += ":" + e.type;
    return k;
}

}  // namespace

EvalReport score(const std::vector<Sentence>& gold,
                 const std::vector<SentencePrediction>& predicted,
                 EvalRegime regime, Averaging averaging,
                 const std::vector<std::string>& entity_types,
                 const std::vector<std::string>& relation_types) {
    if (gold.size() != predicted.size())
        throw_contract("score: gold and predicted sentence counts differ");
    bool strict = regime == EvalRegime::Strict;
    std::map<std::string, Counts> ent_counts, rel_counts;
    for (const auto& t : entity_types) ent_counts[t];
    for (const auto& t : relation_types) rel_counts[t];

    for (size_t si = 0; si < gold.size(); ++si) {
        // entities: multiset match on (span, type)
        std::multiset<std::string> gold_ents;
        for (const auto& e : gold[si].entities) {
            ent_counts[e.type].gold++;
            gold_ents.insert(entity_key(e, true));
        }
        for (const auto& e : predicted[si].entities) {
            ent_counts[e.type].predicted++;
            auto it = gold_ents.find(entity_key(e, true));
            if (it != gold_ents.end()) {
                ent_counts[e.type].correct++;
                gold_ents.erase(it);
            }
        }
        // relations: endpoint labels only under strict
        auto rel_key = [&](const std::string& type, const EntityMention& h,
                           const EntityMention& t) {
            return type + "|" + entity_key(h, strict) + "|" +
                   entity_key(t, strict);
        };
        std::multiset<std::string> gold_rels;
        for (const auto& r : gold[si].relations) {
            const auto& h = gold[si].entities.at(r.head);
            const auto& t = gold[si].entities.at(r.tail);
            rel_counts[r.type].gold++;
            gold_rels.insert(rel_key(r.type, h, t));
        }
        for (const auto& r : predicted[si].relations) {
            rel_counts[r.type].predicted++;
            auto it = gold_rels.find(rel_key(r.type, r.head, r.tail));
            if (it != gold_rels.end()) {
                rel_counts[r.type].correct++;
                gold_rels.erase(it);
            }
        }
    }

    EvalReport report;
    report.regime = regime;
    report.averaging = averaging;
    auto aggregate = [&](const std::map<std::string, Counts>& by_type,
                         std::vector<std::pair<std::string, PrfScores>>& out_types,
                         PrfScores& out_total) {
        Counts total;
        double p_sum = 0, r_sum = 0, f_sum = 0;
        for (const auto& [type, c] : by_type) {
            out_types.emplace_back(type, to_prf(c));
            total.gold += c.gold;
            total.predicted += c.predicted;
            total.correct += c.correct;
            p_sum += out_types.back().second.precision;
            r_sum += out_types.back().second.recall;
            f_sum += out_types.back().second.f1;
        }
        if (averaging == Averaging::Micro || by_type.empty()) {
            out_total = to_prf(total);
        } else {
            out_total.gold = total.gold;
            out_total.predicted = total.predicted;
            out_total.correct = total.correct;
            out_total.precision = p_sum / double(by_type.size());
            out_total.recall = r_sum / double(by_type.size());
            out_total.f1 = f_sum / double(by_type.size());
        }
    };
    aggregate(ent_counts, report.entity_by_type, report.entity);
    aggregate(rel_counts, report.relation_by_type, report.relation);
    return report;
}

std::string report_to_json(const EvalReport& report) {
    using ordered_json = nlohmann::ordered_json;
    auto prf = [](const PrfScores& s) {
        return ordered_json{{"precision", s.precision}, {"recall", s.recall},
                            {"f1", s.f1},             {"gold", s.gold},
                            {"predicted", s.predicted}, {"correct", s.correct}};
    };
    ordered_json j;
    j["regime"] = report.regime == EvalRegime::Strict ? "strict" : "boundary";
    j["averaging"] = report.averaging == Averaging::Micro ? "micro" : "macro";
    j["entity"] = prf(report.entity);
    j["relation"] = prf(report.relation);
    j["entity_by_type"] = ordered_json::object();
    for (const auto& [type, s] : report.entity_by_type)
        j["entity_by_type"][type] = prf(s);
    j["relation_by_type"] = ordered_json::object();
    for (const auto& [type, s] : report.relation_by_type)
        j["relation_by_type"][type] = prf(s);
    return j.dump(2);
}

std::string report_to_table(const EvalReport& report) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    out << "regime="
        << (report.regime == EvalRegime::Strict ? "strict" : "boundary")
        << " averaging="
        << (report.averaging == Averaging::Micro ? "micro" : "macro") << "\n";
    auto row = [&](const std::string& name, const PrfScores& s) {
        out << "  " << std::left << std::setw(24) << name << std::right
            << " P=" << s.precision << " R=" << s.recall << " F1=" << s.f1
            << "  (gold=" << s.gold << " pred=" << s.predicted
            << " correct=" << s.correct << ")\n";
    };
    out << "entities:\n";
    for (const auto& [type, s] : report.entity_by_type) row(type, s);
    row("ALL", report.entity);
    out << "relations:\n";
    for (const auto& [type, s] : report.relation_by_type) row(type, s);
    row("ALL", report.relation);
    return out.str();
}

}  // namespace trimf
