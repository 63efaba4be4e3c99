// SPDX-License-Identifier: Apache-2.0

#include "trimf.h"

#include <cstring>
#include <set>
#include <string>

#include <json.hpp>

#include "trimf/checkpoint.hpp"
#include "trimf/errors.hpp"
#include "trimf/eval.hpp"
#include "trimf/model.hpp"
#include "trimf/span.hpp"
#include "trimf/train.hpp"

using ordered_json = nlohmann::ordered_json;

struct trimf_corpus {
    trimf::Corpus c;
};

struct trimf_model {
    trimf::Model m;
};

namespace {

thread_local std::string g_last_error = "no error";

int code_for(trimf::ErrorKind kind) {
    switch (kind) {
        case trimf::ErrorKind::Contract: return TRIMF_ERR_CONTRACT;
        case trimf::ErrorKind::Dimension: return TRIMF_ERR_DIMENSION;
        case trimf::ErrorKind::Config: return TRIMF_ERR_CONFIG;
        case trimf::ErrorKind::Corpus: return TRIMF_ERR_CORPUS;
        case trimf::ErrorKind::Compat: return TRIMF_ERR_COMPAT;
        case trimf::ErrorKind::Io: return TRIMF_ERR_IO;
    }
    return TRIMF_ERR_INTERNAL;
}

template <typename F>
int guarded(F&& f) {
    try {
        f();
        return TRIMF_OK;
    } catch (const trimf::Error& e) {
        g_last_error = e.what();
        return code_for(e.kind());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TRIMF_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return TRIMF_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require(bool cond, const char* msg) {
    if (!cond) trimf::throw_contract(msg);
}

// The model must know every label the corpus uses.
void check_compat(const trimf::Model& m, const trimf::Corpus& c) {
    auto covered = [](const std::vector<std::string>& have,
                      const std::vector<std::string>& want,
                      const char* what) {
        std::set<std::string> s(have.begin(), have.end());
        for (const auto& w : want)
            if (!s.count(w))
                trimf::throw_compat(std::string("corpus uses ") + what + " '" +
                                    w + "' unknown to the checkpoint");
    };
    covered(m.entity_types, c.entity_types, "entity type");
    covered(m.relation_types, c.relation_types, "relation type");
    covered(m.dependency_labels, c.dependency_labels, "dependency label");
}

ordered_json entity_json(const trimf::Prediction::Entity& e) {
    ordered_json j;
    j["type"] = e.type;
    j["begin"] = e.span.begin;
    j["end"] = e.span.end;
    j["probability"] = e.probability;
    return j;
}

ordered_json span_json(const trimf::Span& s) {
    ordered_json j;
    j["begin"] = s.begin;
    j["end"] = s.end;
    return j;
}

}  // namespace

extern "C" {

const char* trimf_last_error(void) { return g_last_error.c_str(); }

void trimf_string_free(char* s) { delete[] s; }

int trimf_corpus_load(const char* path, trimf_corpus** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new trimf_corpus{trimf::load_corpus(path)};
    });
}

int trimf_corpus_from_json(const char* text, trimf_corpus** out) {
    return guarded([&] {
        require(text && out, "null argument");
        *out = new trimf_corpus{trimf::parse_corpus_json(text)};
    });
}

int trimf_corpus_synth(const char* spec_json, trimf_corpus** out) {
    return guarded([&] {
        require(out, "null argument");
        trimf::SynthSpec spec;
        if (spec_json && *spec_json) {
            ordered_json j;
            try {
                j = ordered_json::parse(spec_json);
            } catch (const std::exception& e) {
                trimf::throw_config(std::string("bad synth spec: ") + e.what());
            }
            for (auto it = j.begin(); it != j.end(); ++it) {
                const std::string& k = it.key();
                if (k == "n_sentences") spec.n_sentences = it->get<size_t>();
                else if (k == "n_entity_types") spec.n_entity_types = it->get<size_t>();
                else if (k == "n_relation_types") spec.n_relation_types = it->get<size_t>();
                else if (k == "triggers_per_relation")
                    spec.triggers_per_relation = it->get<size_t>();
                else if (k == "seed") spec.seed = it->get<uint64_t>();
                else trimf::throw_config("unknown synth spec key: " + k);
            }
        }
        *out = new trimf_corpus{trimf::generate_synthetic(spec)};
    });
}

int trimf_corpus_save(const trimf_corpus* corpus, const char* path) {
    return guarded([&] {
        require(corpus && path, "null argument");
        trimf::save_corpus(corpus->c, path);
    });
}

int trimf_corpus_to_json(const trimf_corpus* corpus, char** out_json) {
    return guarded([&] {
        require(corpus && out_json, "null argument");
        *out_json = dup_string(trimf::corpus_to_json(corpus->c));
    });
}

int trimf_corpus_sentence_count(const trimf_corpus* corpus, size_t* out) {
    return guarded([&] {
        require(corpus && out, "null argument");
        *out = corpus->c.sentences.size();
    });
}

void trimf_corpus_free(trimf_corpus* corpus) { delete corpus; }

int trimf_train(const char* config_json, const trimf_corpus* corpus,
                trimf_model** out_model, char** metrics_json) {
    return guarded([&] {
        require(corpus && out_model, "null argument");
        trimf::TrainConfig cfg;
        if (config_json && *config_json)
            cfg = trimf::parse_config_json(config_json);
        auto model = new trimf_model{trimf::init_model(cfg, corpus->c)};
        trimf::TrainResult res;
        try {
            res = trimf::train_two_stage(model->m, corpus->c);
        } catch (...) {
            delete model;
            throw;
        }
        if (metrics_json) {
            ordered_json arr = ordered_json::array();
            for (const auto& em : res.history) {
                ordered_json j;
                j["epoch"] = em.epoch;
                j["stage"] = em.stage;
                j["mean_loss"] = em.mean_loss;
                j["last_lr"] = em.last_lr;
                arr.push_back(std::move(j));
            }
            *metrics_json = dup_string(arr.dump(2) + "\n");
        }
        *out_model = model;
    });
}

int trimf_model_save(const trimf_model* model, const char* path) {
    return guarded([&] {
        require(model && path, "null argument");
        trimf::save_model(model->m, path);
    });
}

int trimf_model_load(const char* path, trimf_model** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new trimf_model{trimf::load_model(path)};
    });
}

int trimf_model_config(const trimf_model* model, char** out_json) {
    return guarded([&] {
        require(model && out_json, "null argument");
        *out_json = dup_string(trimf::config_to_json(model->m.cfg));
    });
}

void trimf_model_free(trimf_model* model) { delete model; }

int trimf_evaluate(const trimf_model* model, const trimf_corpus* corpus,
                   const char* regime, const char* averaging, double threshold,
                   char** report_json) {
    return guarded([&] {
        require(model && corpus && regime && averaging && report_json,
                "null argument");
        check_compat(model->m, corpus->c);
        trimf::EvalRegime reg;
        std::string r = regime;
        if (r == "strict") reg = trimf::EvalRegime::Strict;
        else if (r == "boundary") reg = trimf::EvalRegime::Boundary;
        else trimf::throw_config("unknown regime: " + r);
        trimf::Averaging avg;
        std::string a = averaging;
        if (a == "micro") avg = trimf::Averaging::Micro;
        else if (a == "macro") avg = trimf::Averaging::Macro;
        else trimf::throw_config("unknown averaging: " + a);

        std::vector<trimf::SentencePrediction> preds;
        preds.reserve(corpus->c.sentences.size());
        for (const trimf::Sentence& s : corpus->c.sentences) {
            trimf::PreparedSentence ps = trimf::prepare_sentence(s, model->m);
            preds.push_back(trimf::to_sentence_prediction(
                trimf::predict(model->m, ps, threshold)));
        }
        trimf::EvalReport rep =
            trimf::score(corpus->c.sentences, preds, reg, avg,
                         model->m.entity_types, model->m.relation_types);
        *report_json = dup_string(trimf::report_to_json(rep));
    });
}

int trimf_predict(const trimf_model* model, const trimf_corpus* corpus,
                  double threshold, char** predictions_json) {
    return guarded([&] {
        require(model && corpus && predictions_json, "null argument");
        check_compat(model->m, corpus->c);
        ordered_json arr = ordered_json::array();
        for (const trimf::Sentence& s : corpus->c.sentences) {
            trimf::PreparedSentence ps = trimf::prepare_sentence(s, model->m);
            trimf::Prediction p =
                trimf::predict(model->m, ps, threshold);
            ordered_json j;
            j["tokens"] = s.tokens;
            ordered_json ents = ordered_json::array();
            for (const auto& e : p.entities) ents.push_back(entity_json(e));
            j["entities"] = std::move(ents);
            ordered_json rels = ordered_json::array();
            for (const auto& r : p.relations) {
                ordered_json rj;
                rj["type"] = r.type;
                rj["head"] = span_json(r.head);
                rj["tail"] = span_json(r.tail);
                rj["probability"] = r.probability;
                rels.push_back(std::move(rj));
            }
            j["relations"] = std::move(rels);
            arr.push_back(std::move(j));
        }
        *predictions_json = dup_string(arr.dump(2) + "\n");
    });
}

int trimf_triggers(const trimf_model* model, const trimf_corpus* corpus,
                   double threshold, size_t k, const char* stopwords_path,
                   char** triggers_json) {
    return guarded([&] {
        require(model && corpus && triggers_json, "null argument");
        check_compat(model->m, corpus->c);
        std::set<std::string> stopwords = stopwords_path
                                              ? trimf::load_stopwords(stopwords_path)
                                              : trimf::default_stopwords();
        ordered_json arr = ordered_json::array();
        for (const trimf::Sentence& s : corpus->c.sentences) {
            trimf::PreparedSentence ps = trimf::prepare_sentence(s, model->m);
            trimf::Prediction p = trimf::predict(model->m, ps, threshold);
            std::set<size_t> entity_words;
            for (const auto& e : p.entities)
                for (size_t w = e.span.begin; w < e.span.end; ++w)
                    entity_words.insert(w);
            ordered_json j;
            j["tokens"] = s.tokens;
            ordered_json rels = ordered_json::array();
            for (const auto& r : p.relations) {
                if (r.trigger_weights.empty()) continue;
                trimf::TriggerRanking ranking = trimf::extract_triggers(
                    r.trigger_weights, s.tokens, k, stopwords, entity_words);
                ordered_json rj;
                rj["type"] = r.type;
                rj["head"] = span_json(r.head);
                rj["tail"] = span_json(r.tail);
                ordered_json items = ordered_json::array();
                for (const auto& item : ranking.items) {
                    ordered_json ij;
                    ij["word"] = item.word;
                    ij["score"] = item.score;
                    items.push_back(std::move(ij));
                }
                rj["triggers"] = std::move(items);
                rels.push_back(std::move(rj));
            }
            j["relations"] = std::move(rels);
            arr.push_back(std::move(j));
        }
        *triggers_json = dup_string(arr.dump(2) + "\n");
    });
}

int trimf_dump_attention(const trimf_model* model, const trimf_corpus* corpus,
                         char** attention_json) {
    return guarded([&] {
        require(model && corpus && attention_json, "null argument");
        check_compat(model->m, corpus->c);
        ordered_json arr = ordered_json::array();
        for (const trimf::Sentence& s : corpus->c.sentences) {
            trimf::PreparedSentence ps = trimf::prepare_sentence(s, model->m);
            std::vector<trimf::AttentionTrace> traces;
            trimf::PipelineOptions opt;
            opt.stage2 = true;
            opt.train_mode = false;
            opt.traces = &traces;
            trimf::run_pipeline(model->m, ps, opt);

            // entity mask over word positions, expanded to subwords
            std::vector<bool> word_is_entity(s.tokens.size(), false);
            for (const auto& e : s.entities)
                for (size_t w = e.begin; w < e.end && w < s.tokens.size(); ++w)
                    word_is_entity[w] = true;
            auto spans = ps.sub.spans_over_subwords();
            std::vector<bool> sub_is_entity(ps.sub.subword_count(), false);
            for (size_t w = 0; w < spans.size(); ++w)
                if (word_is_entity[w])
                    for (size_t i = spans[w].first; i < spans[w].second; ++i)
                        sub_is_entity[i] = true;
            std::vector<std::string> sub_texts(
                ps.sub.subword_texts.begin() + 1, ps.sub.subword_texts.end());

            ordered_json j;
            j["tokens"] = s.tokens;
            j["subwords"] = sub_texts;
            ordered_json tj = ordered_json::array();
            for (const auto& t : traces) {
                const std::vector<bool>& mask =
                    t.level == "word" ? word_is_entity : sub_is_entity;
                ordered_json e;
                e["level"] = t.level;
                e["memory"] = t.memory;
                e["weights"] = t.weights;
                std::vector<double> masked(t.weights.size(), 0.0);
                double total = 0.0;
                for (size_t i = 0; i < t.weights.size(); ++i)
                    if (i >= mask.size() || !mask[i]) total += t.weights[i];
                for (size_t i = 0; i < t.weights.size(); ++i)
                    if ((i >= mask.size() || !mask[i]) && total > 0.0)
                        masked[i] = t.weights[i] / total;
                e["masked_weights"] = masked;
                tj.push_back(std::move(e));
            }
            j["traces"] = std::move(tj);
            arr.push_back(std::move(j));
        }
        *attention_json = dup_string(arr.dump(2) + "\n");
    });
}

}  // extern "C"
