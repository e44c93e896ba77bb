// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0
//
// Stratified k-fold ensembling: one LangPAINT model per fold, final
// prediction by argmax of the summed member probabilities.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pipeline.hpp"

namespace langpaint {

struct EnsembleModel {
  std::vector<LangPaintModel> members;  // one per fold
  std::vector<uint64_t> fold_seeds;
  PipelineConfig config;
  std::vector<std::string> label_names;
};

// Builds k stratified folds (language-label strata) and trains a fresh
// LangPAINT model on each. k == 1 degenerates to a single stratified 80-20
// split instead of folding.
EnsembleModel build_ensemble(const Corpus& corpus, const PipelineConfig& cfg, size_t k = 5);

// Sum of the members' probability vectors (not renormalized); the label is
// the argmax of the sum, ties toward the lowest class index. Members route
// through their merged checkpoints, or the pure language-specific ones when
// the config says ensemble_members = "ls".
Prediction ensemble_predict(const EnsembleModel& ens, const std::string& text,
                            const std::string& language);

void save_ensemble_dir(const EnsembleModel& ens, const std::filesystem::path& dir);
EnsembleModel load_ensemble_dir(const std::filesystem::path& dir);

}  // namespace langpaint
