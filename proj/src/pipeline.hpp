// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0
//
// The LangPAINT procedure: train one multilingual model, fine-tune a
// specialist per language from its weights, sweep the interpolation
// coefficient per language on held-out validation data, and keep the merged
// checkpoint at the winning alpha for inference.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "model.hpp"

namespace langpaint {

enum class FallbackPolicy { UseMl, Error };
enum class MlMetric { MeanPerLanguage, PooledWeighted };

struct PipelineConfig {
  ModelConfig model;  // num_classes 0 = infer from corpus; seed 0 = derive
  TrainConfig train;
  std::vector<double> alpha_grid = default_alpha_grid();
  std::vector<std::string> languages;  // empty = discover from the corpus
  uint64_t seed = 1;
  FallbackPolicy fallback = FallbackPolicy::UseMl;
  MlMetric ml_metric = MlMetric::MeanPerLanguage;
  std::string ensemble_members = "merged";  // or "ls"
  int threads = 1;

  static std::vector<double> default_alpha_grid();
  static PipelineConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
  void validate() const;
};

// Grid must be strictly increasing within [0, 1] and contain both endpoints.
void validate_alpha_grid(const std::vector<double>& grid);

struct SweepPoint {
  double alpha = 0.0;
  double val_f1 = 0.0;
};

struct SweepResult {
  std::string language;
  std::vector<SweepPoint> grid;
  double chosen_alpha = 0.0;  // smallest alpha attaining the maximum
  std::string chosen_digest;
};

struct LanguageArm {
  Checkpoint ls;
  Checkpoint merged;
  SweepResult sweep;
  TrainHistory history;
};

struct LangPaintModel {
  Checkpoint ml;
  TrainHistory ml_history;
  std::map<std::string, LanguageArm> per_language;
  std::vector<std::string> label_names;
  PipelineConfig config;  // with model config resolved
};

// Support-weighted F1 of the checkpoint's predictions over the corpus.
double weighted_f1_on(const Checkpoint& ckpt, const Corpus& corpus, const ModelConfig& mcfg);

// Trains on all languages pooled; the stopping metric is the unweighted mean
// over languages of per-language weighted F1 (or pooled weighted F1 when
// configured). Every configured language must appear in both corpora.
TrainResult train_multilingual(const Corpus& train, const Corpus& val, const PipelineConfig& cfg);

// Continues training from the multilingual weights on one language's slice,
// stopping on that slice's weighted F1. Adam moments start fresh. The result
// records the language and the parent digest in its meta.
TrainResult finetune_language(const Checkpoint& ml, const std::string& language,
                              const Corpus& train_l, const Corpus& val_l,
                              const PipelineConfig& cfg);

struct SweepOutput {
  SweepResult result;
  Checkpoint merged;  // interpolate(ls, ml, chosen_alpha)
};

// Evaluates interpolate(ls, ml, alpha) on the validation slice for every grid
// alpha; ties choose the smallest alpha (closest to the multilingual model).
SweepOutput alpha_sweep(const Checkpoint& ls, const Checkpoint& ml, const Corpus& val_l,
                        const std::vector<double>& grid, const PipelineConfig& cfg);

LangPaintModel run_langpaint(const Corpus& train, const Corpus& val, const PipelineConfig& cfg);

enum class ArmKind { Merged, Ls, Ml };

struct Prediction {
  uint32_t label = 0;
  std::vector<double> probs;
};

// Routes to the language's merged checkpoint; unknown languages follow the
// fallback policy.
Prediction infer(const LangPaintModel& model, const std::string& text, const std::string& language);
Prediction infer_with(const LangPaintModel& model, const std::string& text,
                      const std::string& language, ArmKind kind);

// Run directory: ml.ckpt, <lang>.ls.ckpt, <lang>.merged.ckpt,
// <lang>.sweep.csv and manifest.json.
void save_run_dir(const LangPaintModel& model, const std::filesystem::path& dir);
LangPaintModel load_run_dir(const std::filesystem::path& dir);

std::string run_manifest_text(const LangPaintModel& model, const std::filesystem::path& dir);

}  // namespace langpaint
