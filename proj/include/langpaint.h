/* Copyright (c) 2026 langpaint contributors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API for the langpaint shared library.
 *
 * Conventions:
 *   - Every fallible call returns lp_status; LP_OK is 0. On failure
 *     lp_last_error() returns a thread-local description of what went wrong.
 *   - Objects are opaque handles created by the library and released with the
 *     matching *_free function. Output handle/string parameters are written
 *     only on LP_OK.
 *   - Strings returned through char** are heap-allocated; release them with
 *     lp_string_free.
 *   - JSON configuration payloads follow the schemas described in the README.
 */

#ifndef LANGPAINT_H
#define LANGPAINT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LP_API __declspec(dllexport)
#else
#define LP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lp_status {
  LP_OK = 0,
  LP_ERR_INVALID_ARGUMENT = 1,
  LP_ERR_IO = 2,
  LP_ERR_FORMAT = 3,
  LP_ERR_PARSE = 4,
  LP_ERR_INCOMPATIBLE = 5,
  LP_ERR_VALIDATION = 6,
  LP_ERR_INTERNAL = 7
} lp_status;

typedef struct lp_checkpoint lp_checkpoint;
typedef struct lp_corpus lp_corpus;
typedef struct lp_model lp_model;       /* a LangPAINT run directory */
typedef struct lp_ensemble lp_ensemble; /* an ensemble directory */

/* ---- library ---- */

LP_API const char* lp_version(void);
LP_API uint32_t lp_checkpoint_format_version(void);
/* Message from the most recent failing call on this thread ("" if none). */
LP_API const char* lp_last_error(void);
LP_API void lp_string_free(char* s);

/* ---- checkpoints ---- */

LP_API lp_status lp_checkpoint_load(const char* path, lp_checkpoint** out);
LP_API lp_status lp_checkpoint_save(const lp_checkpoint* ckpt, const char* path);
LP_API void lp_checkpoint_free(lp_checkpoint* ckpt);

/* Elementwise alpha*a + (1-alpha)*b in float32; alpha in [0, 1]. */
LP_API lp_status lp_checkpoint_interpolate(const lp_checkpoint* a, const lp_checkpoint* b,
                                           double alpha, lp_checkpoint** out);
/* Content hash over meta plus tensors. */
LP_API lp_status lp_checkpoint_digest(const lp_checkpoint* ckpt, char** out_hex);
/* Content hash over tensors only (names, shapes, raw float bytes). */
LP_API lp_status lp_checkpoint_tensor_digest(const lp_checkpoint* ckpt, char** out_hex);
LP_API lp_status lp_checkpoint_meta_json(const lp_checkpoint* ckpt, char** out_json);
LP_API lp_status lp_checkpoint_tensor_count(const lp_checkpoint* ckpt, size_t* out);

/* ---- corpora ---- */

/* format: "csv", "tsv", or NULL to infer from the file extension. */
LP_API lp_status lp_corpus_load(const char* path, const char* format, lp_corpus** out);
LP_API lp_status lp_corpus_save(const lp_corpus* corpus, const char* path, const char* format);
LP_API void lp_corpus_free(lp_corpus* corpus);
LP_API lp_status lp_corpus_size(const lp_corpus* corpus, size_t* out);
/* Row access; any of the outputs may be NULL when not needed. */
LP_API lp_status lp_corpus_example(const lp_corpus* corpus, size_t index, char** out_text,
                                   char** out_label, char** out_language);
LP_API lp_status lp_corpus_filter_language(const lp_corpus* corpus, const char* language,
                                           lp_corpus** out);

/* Synthetic corpora from a JSON spec; returns the train and test draws. */
LP_API lp_status lp_corpus_generate(const char* synth_spec_json, lp_corpus** out_train,
                                    lp_corpus** out_test);

/* Cross-corpus duplicate removal (train loses all overlapping texts, dev
 * keeps the first occurrence). out_removed counts dropped examples. */
LP_API lp_status lp_corpus_dedup(const lp_corpus* train, const lp_corpus* dev,
                                 lp_corpus** out_train, lp_corpus** out_dev, size_t* out_removed);

/* strata_key: "label" or "language-label". out_parts must hold n_fractions
 * slots. */
LP_API lp_status lp_corpus_split(const lp_corpus* corpus, const double* fractions,
                                 size_t n_fractions, const char* strata_key, uint64_t seed,
                                 lp_corpus** out_parts);

/* k-fold partition; out_train and out_val must each hold k slots. */
LP_API lp_status lp_corpus_folds(const lp_corpus* corpus, size_t k, const char* strata_key,
                                 uint64_t seed, lp_corpus** out_train, lp_corpus** out_val);

/* ---- training and merging ---- */

LP_API lp_status lp_train_multilingual(const lp_corpus* train, const lp_corpus* val,
                                       const char* config_json, lp_checkpoint** out_ckpt,
                                       char** out_history_json);

LP_API lp_status lp_finetune(const lp_checkpoint* ml, const char* language,
                             const lp_corpus* train, const lp_corpus* val,
                             const char* config_json, lp_checkpoint** out_ckpt,
                             char** out_history_json);

/* Sweeps the config's alpha grid; out_sweep_json reports the curve, the
 * chosen alpha and its digest. out_merged (optional, may be NULL) receives
 * the merged checkpoint at the chosen alpha. */
LP_API lp_status lp_alpha_sweep(const lp_checkpoint* ls, const lp_checkpoint* ml,
                                const lp_corpus* val, const char* config_json,
                                char** out_sweep_json, lp_checkpoint** out_merged);

/* Full LangPAINT procedure; writes ml.ckpt, per-language ls/merged
 * checkpoints, sweep CSVs and manifest.json into out_dir. */
LP_API lp_status lp_run(const lp_corpus* train, const lp_corpus* val, const char* config_json,
                        const char* out_dir);

LP_API lp_status lp_model_load(const char* run_dir, lp_model** out);
LP_API void lp_model_free(lp_model* model);
LP_API lp_status lp_model_info_json(const lp_model* model, char** out_json);
LP_API lp_status lp_model_label_name(const lp_model* model, uint32_t label, char** out_name);

/* Predicts via the language's merged checkpoint (fallback policy applies to
 * unknown languages). probs may be NULL to query the class count through
 * out_n; otherwise cap must be at least the class count. */
LP_API lp_status lp_model_predict(const lp_model* model, const char* text, const char* language,
                                  uint32_t* out_label, double* probs, size_t cap, size_t* out_n);

/* ---- ensembling ---- */

LP_API lp_status lp_ensemble_build(const lp_corpus* corpus, const char* config_json, size_t k,
                                   const char* out_dir);
LP_API lp_status lp_ensemble_load(const char* dir, lp_ensemble** out);
LP_API void lp_ensemble_free(lp_ensemble* ens);
LP_API lp_status lp_ensemble_info_json(const lp_ensemble* ens, char** out_json);
LP_API lp_status lp_ensemble_label_name(const lp_ensemble* ens, uint32_t label, char** out_name);

/* Summed (not renormalized) member probabilities; argmax label. */
LP_API lp_status lp_ensemble_predict(const lp_ensemble* ens, const char* text,
                                     const char* language, uint32_t* out_label, double* probs,
                                     size_t cap, size_t* out_n);

/* ---- evaluation ---- */

LP_API lp_status lp_evaluate_model(const lp_model* model, const lp_corpus* corpus,
                                   char** out_report_json);
LP_API lp_status lp_evaluate_ensemble(const lp_ensemble* ens, const lp_corpus* corpus,
                                      char** out_report_json);

/* ---- experiments and reports ---- */

LP_API lp_status lp_run_experiment(const char* experiment_spec_json, const char* out_dir);
LP_API lp_status lp_aggregate_experiment(const char* experiment_dir, const char* out_dir);
LP_API lp_status lp_aggregate_eval_reports(const char* const* report_paths, size_t n,
                                           const char* out_dir);

/* ---- filesystem helpers (manifest plumbing for clients) ---- */

LP_API lp_status lp_file_sha256(const char* path, char** out_hex);
LP_API lp_status lp_write_file_atomic(const char* path, const char* content);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LANGPAINT_H */
