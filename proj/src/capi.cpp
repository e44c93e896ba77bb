// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0
//
// extern "C" surface over the C++ core. Handles own their C++ values; every
// entry point catches, records the message thread-locally and maps the error
// code.

#include "langpaint.h"

#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "common.hpp"
#include "data.hpp"
#include "ensemble.hpp"
#include "experiments.hpp"
#include "model.hpp"
#include "pipeline.hpp"
#include "support.hpp"
#include "tensorstore.hpp"

using namespace langpaint;

struct lp_checkpoint {
  Checkpoint value;
};
struct lp_corpus {
  Corpus value;
};
struct lp_model {
  LangPaintModel value;
};
struct lp_ensemble {
  EnsembleModel value;
};

namespace {

thread_local std::string g_last_error;

lp_status status_for(ErrCode code) {
  switch (code) {
    case ErrCode::InvalidArgument: return LP_ERR_INVALID_ARGUMENT;
    case ErrCode::Io: return LP_ERR_IO;
    case ErrCode::Format: return LP_ERR_FORMAT;
    case ErrCode::Parse: return LP_ERR_PARSE;
    case ErrCode::Incompatible: return LP_ERR_INCOMPATIBLE;
    case ErrCode::Validation: return LP_ERR_VALIDATION;
    case ErrCode::Internal: break;
  }
  return LP_ERR_INTERNAL;
}

template <typename Fn>
lp_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return LP_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_for(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LP_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return LP_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

lp_status require(bool ok, const char* what) {
  if (ok) return LP_OK;
  g_last_error = std::string("null argument: ") + what;
  return LP_ERR_INVALID_ARGUMENT;
}

CorpusFormat parse_format(const char* format, const char* path) {
  if (format == nullptr) return corpus_format_for(path);
  const std::string f = format;
  if (f == "csv") return CorpusFormat::Csv;
  if (f == "tsv") return CorpusFormat::Tsv;
  raise(ErrCode::InvalidArgument, "unknown corpus format '" + f + "' (use csv or tsv)");
}

nlohmann::json history_json(const TrainHistory& history) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const EpochStats& e : history.epochs) {
    epochs.push_back({{"train_loss", e.train_loss}, {"val_metric", e.val_metric}});
  }
  return {{"epochs", std::move(epochs)},
          {"best_epoch", history.best_epoch},
          {"stopped_epoch", history.stopped_epoch}};
}

lp_status predict_into(const Prediction& p, const std::vector<std::string>& label_names,
                       uint32_t* out_label, double* probs, size_t cap, size_t* out_n) {
  (void)label_names;
  if (out_n) *out_n = p.probs.size();
  if (probs == nullptr) {
    if (out_label) *out_label = p.label;
    return LP_OK;
  }
  if (cap < p.probs.size()) {
    raise(ErrCode::InvalidArgument, "probability buffer too small: need " +
                                        std::to_string(p.probs.size()) + " slots");
  }
  for (size_t i = 0; i < p.probs.size(); ++i) probs[i] = p.probs[i];
  if (out_label) *out_label = p.label;
  return LP_OK;
}

std::string label_name_of(const std::vector<std::string>& names, uint32_t label) {
  if (label >= names.size()) {
    raise(ErrCode::InvalidArgument, "label index " + std::to_string(label) + " out of range");
  }
  return names[label];
}

}  // namespace

extern "C" {

const char* lp_version(void) { return kArtifactVersion; }

uint32_t lp_checkpoint_format_version(void) { return kCheckpointFormatVersion; }

const char* lp_last_error(void) { return g_last_error.c_str(); }

void lp_string_free(char* s) { delete[] s; }

/* ---- checkpoints ---- */

lp_status lp_checkpoint_load(const char* path, lp_checkpoint** out) {
  if (lp_status s = require(path && out, "path/out"); s != LP_OK) return s;
  return guarded([&] { *out = new lp_checkpoint{load_checkpoint(path)}; });
}

lp_status lp_checkpoint_save(const lp_checkpoint* ckpt, const char* path) {
  if (lp_status s = require(ckpt && path, "ckpt/path"); s != LP_OK) return s;
  return guarded([&] { save_checkpoint(ckpt->value, path); });
}

void lp_checkpoint_free(lp_checkpoint* ckpt) { delete ckpt; }

lp_status lp_checkpoint_interpolate(const lp_checkpoint* a, const lp_checkpoint* b, double alpha,
                                    lp_checkpoint** out) {
  if (lp_status s = require(a && b && out, "a/b/out"); s != LP_OK) return s;
  return guarded([&] { *out = new lp_checkpoint{interpolate(a->value, b->value, alpha)}; });
}

lp_status lp_checkpoint_digest(const lp_checkpoint* ckpt, char** out_hex) {
  if (lp_status s = require(ckpt && out_hex, "ckpt/out"); s != LP_OK) return s;
  return guarded([&] { *out_hex = dup_string(digest(ckpt->value)); });
}

lp_status lp_checkpoint_tensor_digest(const lp_checkpoint* ckpt, char** out_hex) {
  if (lp_status s = require(ckpt && out_hex, "ckpt/out"); s != LP_OK) return s;
  return guarded([&] { *out_hex = dup_string(tensor_digest(ckpt->value)); });
}

lp_status lp_checkpoint_meta_json(const lp_checkpoint* ckpt, char** out_json) {
  if (lp_status s = require(ckpt && out_json, "ckpt/out"); s != LP_OK) return s;
  return guarded([&] { *out_json = dup_string(nlohmann::json(ckpt->value.meta()).dump()); });
}

lp_status lp_checkpoint_tensor_count(const lp_checkpoint* ckpt, size_t* out) {
  if (lp_status s = require(ckpt && out, "ckpt/out"); s != LP_OK) return s;
  *out = ckpt->value.size();
  return LP_OK;
}

/* ---- corpora ---- */

lp_status lp_corpus_load(const char* path, const char* format, lp_corpus** out) {
  if (lp_status s = require(path && out, "path/out"); s != LP_OK) return s;
  return guarded([&] { *out = new lp_corpus{load_corpus(path, parse_format(format, path))}; });
}

lp_status lp_corpus_save(const lp_corpus* corpus, const char* path, const char* format) {
  if (lp_status s = require(corpus && path, "corpus/path"); s != LP_OK) return s;
  return guarded([&] { save_corpus(corpus->value, path, parse_format(format, path)); });
}

void lp_corpus_free(lp_corpus* corpus) { delete corpus; }

lp_status lp_corpus_size(const lp_corpus* corpus, size_t* out) {
  if (lp_status s = require(corpus && out, "corpus/out"); s != LP_OK) return s;
  *out = corpus->value.size();
  return LP_OK;
}

lp_status lp_corpus_example(const lp_corpus* corpus, size_t index, char** out_text,
                            char** out_label, char** out_language) {
  if (lp_status s = require(corpus != nullptr, "corpus"); s != LP_OK) return s;
  return guarded([&] {
    if (index >= corpus->value.size()) {
      raise(ErrCode::InvalidArgument, "example index " + std::to_string(index) + " out of range");
    }
    const Example& ex = corpus->value.examples()[index];
    if (out_text) *out_text = dup_string(ex.text);
    if (out_label) *out_label = dup_string(corpus->value.label_names()[ex.label]);
    if (out_language) *out_language = dup_string(ex.language);
  });
}

lp_status lp_corpus_filter_language(const lp_corpus* corpus, const char* language,
                                    lp_corpus** out) {
  if (lp_status s = require(corpus && language && out, "corpus/language/out"); s != LP_OK)
    return s;
  return guarded([&] { *out = new lp_corpus{corpus->value.filter_language(language)}; });
}

lp_status lp_corpus_generate(const char* synth_spec_json, lp_corpus** out_train,
                             lp_corpus** out_test) {
  if (lp_status s = require(synth_spec_json && out_train && out_test, "spec/out"); s != LP_OK)
    return s;
  return guarded([&] {
    SynthCorpora corpora = generate(SynthSpec::from_json_text(synth_spec_json));
    *out_train = new lp_corpus{std::move(corpora.train)};
    *out_test = new lp_corpus{std::move(corpora.test)};
  });
}

lp_status lp_corpus_dedup(const lp_corpus* train, const lp_corpus* dev, lp_corpus** out_train,
                          lp_corpus** out_dev, size_t* out_removed) {
  if (lp_status s = require(train && dev && out_train && out_dev, "train/dev/out"); s != LP_OK)
    return s;
  return guarded([&] {
    DedupResult result = dedup(train->value, dev->value);
    *out_train = new lp_corpus{std::move(result.train)};
    *out_dev = new lp_corpus{std::move(result.dev)};
    if (out_removed) *out_removed = result.removed;
  });
}

lp_status lp_corpus_split(const lp_corpus* corpus, const double* fractions, size_t n_fractions,
                          const char* strata_key, uint64_t seed, lp_corpus** out_parts) {
  if (lp_status s = require(corpus && fractions && n_fractions > 0 && out_parts, "corpus/fractions/out");
      s != LP_OK)
    return s;
  return guarded([&] {
    const StrataKey key =
        strata_key ? strata_key_from_string(strata_key) : StrataKey::LanguageLabel;
    auto parts = stratified_split(corpus->value,
                                  std::vector<double>(fractions, fractions + n_fractions), key,
                                  seed);
    for (size_t i = 0; i < parts.size(); ++i) out_parts[i] = new lp_corpus{std::move(parts[i])};
  });
}

lp_status lp_corpus_folds(const lp_corpus* corpus, size_t k, const char* strata_key,
                          uint64_t seed, lp_corpus** out_train, lp_corpus** out_val) {
  if (lp_status s = require(corpus && out_train && out_val, "corpus/out"); s != LP_OK) return s;
  return guarded([&] {
    const StrataKey key =
        strata_key ? strata_key_from_string(strata_key) : StrataKey::LanguageLabel;
    FoldSet set = stratified_folds(corpus->value, k, 1.0 / double(k), key, seed);
    for (size_t i = 0; i < set.folds.size(); ++i) {
      out_train[i] = new lp_corpus{std::move(set.folds[i].train)};
      out_val[i] = new lp_corpus{std::move(set.folds[i].val)};
    }
  });
}

/* ---- training and merging ---- */

lp_status lp_train_multilingual(const lp_corpus* train, const lp_corpus* val,
                                const char* config_json, lp_checkpoint** out_ckpt,
                                char** out_history_json) {
  if (lp_status s = require(train && val && config_json && out_ckpt, "train/val/config/out");
      s != LP_OK)
    return s;
  return guarded([&] {
    PipelineConfig cfg = PipelineConfig::from_json_text(config_json);
    TrainResult result = train_multilingual(train->value, val->value, cfg);
    if (out_history_json) *out_history_json = dup_string(history_json(result.history).dump(2));
    *out_ckpt = new lp_checkpoint{std::move(result.ckpt)};
  });
}

lp_status lp_finetune(const lp_checkpoint* ml, const char* language, const lp_corpus* train,
                      const lp_corpus* val, const char* config_json, lp_checkpoint** out_ckpt,
                      char** out_history_json) {
  if (lp_status s = require(ml && language && train && val && config_json && out_ckpt,
                            "ml/language/train/val/config/out");
      s != LP_OK)
    return s;
  return guarded([&] {
    PipelineConfig cfg = PipelineConfig::from_json_text(config_json);
    TrainResult result = finetune_language(ml->value, language, train->value, val->value, cfg);
    if (out_history_json) *out_history_json = dup_string(history_json(result.history).dump(2));
    *out_ckpt = new lp_checkpoint{std::move(result.ckpt)};
  });
}

lp_status lp_alpha_sweep(const lp_checkpoint* ls, const lp_checkpoint* ml, const lp_corpus* val,
                         const char* config_json, char** out_sweep_json,
                         lp_checkpoint** out_merged) {
  if (lp_status s = require(ls && ml && val && config_json && out_sweep_json,
                            "ls/ml/val/config/out");
      s != LP_OK)
    return s;
  return guarded([&] {
    PipelineConfig cfg = PipelineConfig::from_json_text(config_json);
    SweepOutput sweep = alpha_sweep(ls->value, ml->value, val->value, cfg.alpha_grid, cfg);
    nlohmann::json grid = nlohmann::json::array();
    for (const SweepPoint& p : sweep.result.grid) {
      grid.push_back({{"alpha", p.alpha}, {"val_f1", p.val_f1}});
    }
    nlohmann::json j{{"language", sweep.result.language},
                     {"chosen_alpha", sweep.result.chosen_alpha},
                     {"chosen_digest", sweep.result.chosen_digest},
                     {"grid", std::move(grid)}};
    *out_sweep_json = dup_string(j.dump(2));
    if (out_merged) *out_merged = new lp_checkpoint{std::move(sweep.merged)};
  });
}

lp_status lp_run(const lp_corpus* train, const lp_corpus* val, const char* config_json,
                 const char* out_dir) {
  if (lp_status s = require(train && val && config_json && out_dir, "train/val/config/out_dir");
      s != LP_OK)
    return s;
  return guarded([&] {
    PipelineConfig cfg = PipelineConfig::from_json_text(config_json);
    LangPaintModel model = run_langpaint(train->value, val->value, cfg);
    save_run_dir(model, out_dir);
  });
}

lp_status lp_model_load(const char* run_dir, lp_model** out) {
  if (lp_status s = require(run_dir && out, "run_dir/out"); s != LP_OK) return s;
  return guarded([&] { *out = new lp_model{load_run_dir(run_dir)}; });
}

void lp_model_free(lp_model* model) { delete model; }

lp_status lp_model_info_json(const lp_model* model, char** out_json) {
  if (lp_status s = require(model && out_json, "model/out"); s != LP_OK) return s;
  return guarded([&] {
    nlohmann::json chosen;
    for (const auto& [language, arm] : model->value.per_language) {
      chosen[language] = arm.sweep.chosen_alpha;
    }
    nlohmann::json j{{"label_names", model->value.label_names},
                     {"languages", model->value.config.languages},
                     {"chosen_alpha", std::move(chosen)},
                     {"config", nlohmann::json::parse(model->value.config.to_json_text())}};
    *out_json = dup_string(j.dump(2));
  });
}

lp_status lp_model_label_name(const lp_model* model, uint32_t label, char** out_name) {
  if (lp_status s = require(model && out_name, "model/out"); s != LP_OK) return s;
  return guarded(
      [&] { *out_name = dup_string(label_name_of(model->value.label_names, label)); });
}

lp_status lp_model_predict(const lp_model* model, const char* text, const char* language,
                           uint32_t* out_label, double* probs, size_t cap, size_t* out_n) {
  if (lp_status s = require(model && text && language, "model/text/language"); s != LP_OK)
    return s;
  return guarded([&] {
    Prediction p = infer(model->value, text, language);
    predict_into(p, model->value.label_names, out_label, probs, cap, out_n);
  });
}

/* ---- ensembling ---- */

lp_status lp_ensemble_build(const lp_corpus* corpus, const char* config_json, size_t k,
                            const char* out_dir) {
  if (lp_status s = require(corpus && config_json && out_dir, "corpus/config/out_dir");
      s != LP_OK)
    return s;
  return guarded([&] {
    PipelineConfig cfg = PipelineConfig::from_json_text(config_json);
    EnsembleModel ens = build_ensemble(corpus->value, cfg, k);
    save_ensemble_dir(ens, out_dir);
  });
}

lp_status lp_ensemble_load(const char* dir, lp_ensemble** out) {
  if (lp_status s = require(dir && out, "dir/out"); s != LP_OK) return s;
  return guarded([&] { *out = new lp_ensemble{load_ensemble_dir(dir)}; });
}

void lp_ensemble_free(lp_ensemble* ens) { delete ens; }

lp_status lp_ensemble_info_json(const lp_ensemble* ens, char** out_json) {
  if (lp_status s = require(ens && out_json, "ensemble/out"); s != LP_OK) return s;
  return guarded([&] {
    nlohmann::json j{{"k", ens->value.members.size()},
                     {"label_names", ens->value.label_names},
                     {"fold_seeds", ens->value.fold_seeds},
                     {"config", nlohmann::json::parse(ens->value.config.to_json_text())}};
    *out_json = dup_string(j.dump(2));
  });
}

lp_status lp_ensemble_label_name(const lp_ensemble* ens, uint32_t label, char** out_name) {
  if (lp_status s = require(ens && out_name, "ensemble/out"); s != LP_OK) return s;
  return guarded([&] { *out_name = dup_string(label_name_of(ens->value.label_names, label)); });
}

lp_status lp_ensemble_predict(const lp_ensemble* ens, const char* text, const char* language,
                              uint32_t* out_label, double* probs, size_t cap, size_t* out_n) {
  if (lp_status s = require(ens && text && language, "ensemble/text/language"); s != LP_OK)
    return s;
  return guarded([&] {
    Prediction p = ensemble_predict(ens->value, text, language);
    predict_into(p, ens->value.label_names, out_label, probs, cap, out_n);
  });
}

/* ---- evaluation ---- */

lp_status lp_evaluate_model(const lp_model* model, const lp_corpus* corpus,
                            char** out_report_json) {
  if (lp_status s = require(model && corpus && out_report_json, "model/corpus/out"); s != LP_OK)
    return s;
  return guarded([&] {
    const Corpus aligned = align_labels(corpus->value, model->value.label_names);
    EvalReport report = evaluate(
        [&](const std::string& text, const std::string& language) {
          return infer(model->value, text, language).label;
        },
        aligned);
    report.meta["model_kind"] = "run";
    report.meta["ml_digest"] = digest(model->value.ml);
    *out_report_json = dup_string(report.to_json_text());
  });
}

lp_status lp_evaluate_ensemble(const lp_ensemble* ens, const lp_corpus* corpus,
                               char** out_report_json) {
  if (lp_status s = require(ens && corpus && out_report_json, "ensemble/corpus/out"); s != LP_OK)
    return s;
  return guarded([&] {
    const Corpus aligned = align_labels(corpus->value, ens->value.label_names);
    EvalReport report = evaluate(
        [&](const std::string& text, const std::string& language) {
          return ensemble_predict(ens->value, text, language).label;
        },
        aligned);
    report.meta["model_kind"] = "ensemble";
    report.meta["members"] = std::to_string(ens->value.members.size());
    *out_report_json = dup_string(report.to_json_text());
  });
}

/* ---- experiments and reports ---- */

lp_status lp_run_experiment(const char* experiment_spec_json, const char* out_dir) {
  if (lp_status s = require(experiment_spec_json && out_dir, "spec/out_dir"); s != LP_OK)
    return s;
  return guarded([&] {
    run_experiment(ExperimentSpec::from_json_text(experiment_spec_json), out_dir);
  });
}

lp_status lp_aggregate_experiment(const char* experiment_dir, const char* out_dir) {
  if (lp_status s = require(experiment_dir && out_dir, "experiment_dir/out_dir"); s != LP_OK)
    return s;
  return guarded([&] { aggregate_experiment_dir(experiment_dir, out_dir); });
}

lp_status lp_aggregate_eval_reports(const char* const* report_paths, size_t n,
                                    const char* out_dir) {
  if (lp_status s = require(report_paths && n > 0 && out_dir, "report_paths/out_dir");
      s != LP_OK)
    return s;
  return guarded([&] {
    std::vector<std::filesystem::path> paths(report_paths, report_paths + n);
    aggregate_eval_reports(paths, out_dir);
  });
}

/* ---- filesystem helpers ---- */

lp_status lp_file_sha256(const char* path, char** out_hex) {
  if (lp_status s = require(path && out_hex, "path/out"); s != LP_OK) return s;
  return guarded([&] { *out_hex = dup_string(file_sha256(path)); });
}

lp_status lp_write_file_atomic(const char* path, const char* content) {
  if (lp_status s = require(path && content, "path/content"); s != LP_OK) return s;
  return guarded([&] { atomic_write_file(path, content); });
}

}  // extern "C"
