// SPDX-License-Identifier: Apache-2.0

#include "trimf/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "trimf/errors.hpp"
#include "trimf/rng.hpp"

namespace trimf {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void validate_corpus(const Corpus& corpus) {
    std::vector<std::string> violations;
    auto note = [&](size_t sent, const std::string& field,
                    const std::string& msg) {
        violations.push_back("sentence " + std::to_string(sent) + ", " + field +
                             ": " + msg);
    };
    auto in_vocab = [](const std::vector<std::string>& vocab,
                       const std::string& item) {
        return std::find(vocab.begin(), vocab.end(), item) != vocab.end();
    };
    for (size_t si = 0; si < corpus.sentences.size(); ++si) {
        const Sentence& s = corpus.sentences[si];
        size_t n = s.tokens.size();
        if (n == 0) {
            note(si, "tokens", "sentence has no tokens");
            continue;
        }
        for (size_t ti = 0; ti < n; ++ti)
            if (s.tokens[ti].empty())
                note(si, "tokens", "token " + std::to_string(ti) + " is empty");
        for (size_t ei = 0; ei < s.entities.size(); ++ei) {
            const auto& e = s.entities[ei];
            if (e.begin >= e.end || e.end > n)
                note(si, "entities",
                     "entity " + std::to_string(ei) + " span [" +
                         std::to_string(e.begin) + "," + std::to_string(e.end) +
                         ") out of bounds for " + std::to_string(n) + " tokens");
            if (!in_vocab(corpus.entity_types, e.type))
                note(si, "entities",
                     "entity type '" + e.type + "' not in entity_types");
        }
        for (size_t ri = 0; ri < s.relations.size(); ++ri) {
            const auto& r = s.relations[ri];
            if (r.head >= s.entities.size() || r.tail >= s.entities.size())
                note(si, "relations",
                     "relation " + std::to_string(ri) +
                         " references entity index out of range");
            if (!in_vocab(corpus.relation_types, r.type))
                note(si, "relations",
                     "relation type '" + r.type + "' not in relation_types");
        }
        if (s.deps.size() != n) {
            note(si, "deps", "need one dependency entry per token");
        } else {
            size_t roots = 0;
            for (size_t ti = 0; ti < n; ++ti) {
                const auto& d = s.deps[ti];
                if (d.head == -1) {
                    ++roots;
                } else if (d.head < 0 || size_t(d.head) >= n) {
                    note(si, "deps",
                         "token " + std::to_string(ti) + " head out of range");
                } else if (size_t(d.head) == ti) {
                    note(si, "deps",
                         "token " + std::to_string(ti) + " is its own head");
                }
                if (d.head != -1 &&
                    !in_vocab(corpus.dependency_labels, d.label))
                    note(si, "deps", "label '" + d.label +
                                          "' not in dependency_labels");
            }
            if (roots != 1)
                note(si, "deps",
                     "expected exactly one root, found " + std::to_string(roots));
        }
    }
    if (!violations.empty()) {
        std::string msg = "corpus validation failed:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw_corpus(msg);
    }
}

Corpus parse_corpus_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw_corpus(std::string("corpus JSON parse error: ") + e.what());
    }
    Corpus corpus;
    try {
        corpus.entity_types =
            j.at("entity_types").get<std::vector<std::string>>();
        corpus.relation_types =
            j.at("relation_types").get<std::vector<std::string>>();
        corpus.dependency_labels =
            j.at("dependency_labels").get<std::vector<std::string>>();
        for (const auto& js : j.at("sentences")) {
            Sentence s;
            s.tokens = js.at("tokens").get<std::vector<std::string>>();
            for (const auto& je : js.at("entities"))
                s.entities.push_back({je.at("type").get<std::string>(),
                                      je.at("begin").get<size_t>(),
                                      je.at("end").get<size_t>()});
            for (const auto& jr : js.at("relations"))
                s.relations.push_back({jr.at("type").get<std::string>(),
                                       jr.at("head").get<size_t>(),
                                       jr.at("tail").get<size_t>()});
            for (const auto& jd : js.at("deps"))
                s.deps.push_back({jd.at("head").get<int>(),
                                  jd.value("label", std::string())});
            corpus.sentences.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw_corpus(std::string("corpus JSON structure error: ") + e.what());
    }
    validate_corpus(corpus);
    return corpus;
}

Corpus load_corpus(const std::string& path) {
    return parse_corpus_json(read_file(path));
}

std::string corpus_to_json(const Corpus& corpus) {
    ordered_json j;
    j["entity_types"] = corpus.entity_types;
    j["relation_types"] = corpus.relation_types;
    j["dependency_labels"] = corpus.dependency_labels;
    j["sentences"] = ordered_json::array();
    for (const auto& s : corpus.sentences) {
        ordered_json js;
        js["tokens"] = s.tokens;
        js["entities"] = ordered_json::array();
        for (const auto& e : s.entities)
            js["entities"].push_back(
                {{"type", e.type}, {"begin", e.begin}, {"end", e.end}});
        js["relations"] = ordered_json::array();
        for (const auto& r : s.relations)
            js["relations"].push_back(
                {{"type", r.type}, {"head", r.head}, {"tail", r.tail}});
        js["deps"] = ordered_json::array();
        for (const auto& d : s.deps)
            js["deps"].push_back({{"head", d.head}, {"label", d.label}});
        j["sentences"].push_back(std::move(js));
    }
    return j.dump(2) + "\n";
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_io("cannot write corpus file: " + path);
    out << corpus_to_json(corpus);
}

namespace {

// consonant-vowel syllables keep generated words tokenizer-friendly
std::string syllable(size_t i) {
    static const char* kConsonants = "bdfgklmnprstvz";
    static const char* kVowels = "aeiou";
    std::string s;
    s += kConsonants[i % 14];
    s += kVowels[(i / 14) % 5];
    return s;
}

std::string entity_name(size_t type, size_t idx) {
    // type-unique leading syllable so categories are separable
    return syllable(type * 5 + 1) + syllable(7 + idx * 3) + syllable(idx);
}

std::string trigger_word(size_t relation, size_t idx) {
    static const std::vector<std::vector<std::string>> kPools = {
        {"attacks", "strikes", "raids"},
        {"visits", "tours", "enters"},
        {"founds", "builds", "launches"},
        {"guides", "leads", "trains"},
    };
    if (relation < kPools.size() && idx < kPools[relation].size())
        return kPools[relation][idx];
    return "trig" + syllable(relation) + syllable(idx);
}

}  // namespace

std::vector<std::vector<std::string>> synthetic_trigger_lexicon(
    const SynthSpec& spec) {
    std::vector<std::vector<std::string>> lex(spec.n_relation_types);
    for (size_t r = 0; r < spec.n_relation_types; ++r)
        for (size_t t = 0; t < spec.triggers_per_relation; ++t)
            lex[r].push_back(trigger_word(r, t));
    return lex;
}

Corpus generate_synthetic(const SynthSpec& spec) {
    if (spec.n_entity_types == 0 || spec.n_relation_types == 0 ||
        spec.triggers_per_relation == 0)
        throw_contract("synthetic spec needs >=1 entity type, relation type, "
                       "and trigger per relation");
    Rng rng(spec.seed);
    Corpus corpus;
    for (size_t t = 0; t < spec.n_entity_types; ++t)
        corpus.entity_types.push_back("Ent" + std::to_string(t));
    for (size_t r = 0; r < spec.n_relation_types; ++r)
        corpus.relation_types.push_back("Rel" + std::to_string(r));
    corpus.dependency_labels = {"dep"};
    auto lexicon = synthetic_trigger_lexicon(spec);
    constexpr size_t kNamesPerType = 4;
    // mostly stopword fillers so that planted triggers dominate rankings
    const std::vector<std::string> stop_fillers = {"the", "of", "in", "near"};
    const std::vector<std::string> open_fillers = {"report", "today"};

    for (size_t si = 0; si < spec.n_sentences; ++si) {
        Sentence s;
        bool with_relation = si % 5 != 4;
        auto add_entity = [&](size_t type) {
            size_t idx = rng.index(kNamesPerType);
            size_t begin = s.tokens.size();
            s.tokens.push_back(entity_name(type, idx));
            if (rng.uniform() < 0.25)
                s.tokens.push_back(entity_name(type, idx) + syllable(idx + 2));
            s.entities.push_back(
                {corpus.entity_types[type], begin, s.tokens.size()});
        };
        s.tokens.push_back(stop_fillers[rng.index(stop_fillers.size())]);
        if (with_relation) {
            size_t rel = si % spec.n_relation_types;
            size_t head_type = rel % spec.n_entity_types;
            size_t tail_type = (rel + 1) % spec.n_entity_types;
            add_entity(head_type);
            s.tokens.push_back(lexicon[rel][rng.index(lexicon[rel].size())]);
            add_entity(tail_type);
            s.relations.push_back({corpus.relation_types[rel], 0, 1});
        } else {
            add_entity(rng.index(spec.n_entity_types));
            s.tokens.push_back(stop_fillers[rng.index(stop_fillers.size())]);
            add_entity(rng.index(spec.n_entity_types));
        }
        s.tokens.push_back(open_fillers[rng.index(open_fillers.size())]);
        // trivially correct left-headed parse
        for (size_t ti = 0; ti < s.tokens.size(); ++ti)
            s.deps.push_back({ti == 0 ? -1 : int(ti - 1), "dep"});
        s.deps[0].label.clear();
        corpus.sentences.push_back(std::move(s));
    }
    validate_corpus(corpus);
    return corpus;
}

}  // namespace trimf
