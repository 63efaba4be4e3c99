/* SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the TriMF joint entity/relation extraction library.
 * All functions return a status code; details of the last failure are
 * available from trimf_last_error(). Strings returned through out-params
 * are heap-allocated and must be released with trimf_string_free().
 */
#ifndef TRIMF_H
#define TRIMF_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct trimf_model trimf_model;
typedef struct trimf_corpus trimf_corpus;

enum trimf_status {
    TRIMF_OK = 0,
    TRIMF_ERR_CONTRACT = 1,  /* caller violated a precondition */
    TRIMF_ERR_DIMENSION = 2, /* tensor shape mismatch */
    TRIMF_ERR_CONFIG = 3,    /* bad configuration value or unknown key */
    TRIMF_ERR_CORPUS = 4,    /* malformed or invalid corpus/input text */
    TRIMF_ERR_COMPAT = 5,    /* checkpoint/corpus/version incompatibility */
    TRIMF_ERR_IO = 6,        /* file system failure */
    TRIMF_ERR_INTERNAL = 7   /* unexpected failure */
};

/* Message for the most recent failure on this thread; never NULL. */
const char* trimf_last_error(void);
void trimf_string_free(char* s);

/* ---- corpus ---- */
int trimf_corpus_load(const char* path, trimf_corpus** out);
int trimf_corpus_from_json(const char* text, trimf_corpus** out);
/* spec_json keys: n_sentences, n_entity_types, n_relation_types,
 * triggers_per_relation, seed (all optional). */
int trimf_corpus_synth(const char* spec_json, trimf_corpus** out);
int trimf_corpus_save(const trimf_corpus* corpus, const char* path);
int trimf_corpus_to_json(const trimf_corpus* corpus, char** out_json);
int trimf_corpus_sentence_count(const trimf_corpus* corpus, size_t* out);
void trimf_corpus_free(trimf_corpus* corpus);

/* ---- training ---- */
/* Trains a fresh model on the corpus. config_json uses flat keys mirroring
 * the configuration struct; unknown keys fail with TRIMF_ERR_CONFIG.
 * metrics_json (optional) receives the per-epoch history. */
int trimf_train(const char* config_json, const trimf_corpus* corpus,
                trimf_model** out_model, char** metrics_json);

/* ---- model ---- */
int trimf_model_save(const trimf_model* model, const char* path);
int trimf_model_load(const char* path, trimf_model** out);
int trimf_model_config(const trimf_model* model, char** out_json);
void trimf_model_free(trimf_model* model);

/* ---- inference ---- */
/* regime: "strict" | "boundary"; averaging: "micro" | "macro". */
int trimf_evaluate(const trimf_model* model, const trimf_corpus* corpus,
                   const char* regime, const char* averaging, double threshold,
                   char** report_json);
int trimf_predict(const trimf_model* model, const trimf_corpus* corpus,
                  double threshold, char** predictions_json);
/* Top-k trigger words per predicted relation. stopwords_path may be NULL to
 * use the built-in list. */
int trimf_triggers(const trimf_model* model, const trimf_corpus* corpus,
                   double threshold, size_t k, const char* stopwords_path,
                   char** triggers_json);
/* Memory-flow attention weights per sentence, raw and entity-masked. */
int trimf_dump_attention(const trimf_model* model, const trimf_corpus* corpus,
                         char** attention_json);

#ifdef __cplusplus
}
#endif

#endif /* TRIMF_H */
