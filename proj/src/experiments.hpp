// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment protocols over synthetic or user corpora, comparing three
// methods per language: L-S (the alpha=1 endpoint), M-L (alpha=0) and
// LangPAINT (the swept alpha). Protocol 1 resamples a train-validation split
// per run against a fixed test set; protocol 2 redraws data and an
// 80-10-10 split per run, which is where label-distribution shift between
// the train and test priors bites.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "data.hpp"
#include "pipeline.hpp"

namespace langpaint {

struct ExperimentSpec {
  std::string protocol;  // "exp1" | "exp2"
  size_t runs = 0;       // 0 = protocol default (5 for exp1, 10 for exp2)
  uint64_t seed = 1;
  std::optional<SynthSpec> synth;
  std::string train_path, dev_path, test_path;  // corpus mode
  PipelineConfig pipeline;
  // When set, the L-S column comes from per-language models trained from a
  // fresh random initialization instead of the alpha=1 endpoint.
  bool ls_from_scratch = false;

  static ExperimentSpec from_json_text(const std::string& text);
  std::string to_json_text() const;
  void validate() const;
  size_t effective_runs() const;
};

struct ExperimentResult {
  std::vector<std::string> languages;
  std::vector<std::string> methods;  // L-S, M-L, LangPAINT
  // per-run weighted F1 on the test part: language -> method -> run values
  std::map<std::string, std::map<std::string, std::vector<double>>> cells;
  // language -> per-run selected alpha
  std::map<std::string, std::vector<double>> chosen_alphas;
};

// Runs the protocol and writes runs.csv, comparison.csv, sweep_curves.csv,
// selected_alphas.csv, alpha_summary.csv, per-run run_<r>/ directories and
// manifest.json under out_dir.
ExperimentResult run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

// Recomputes comparison.csv, alpha_summary.csv and curve_means.csv in out_dir
// from an experiment directory's per-run artifacts.
void aggregate_experiment_dir(const std::filesystem::path& exp_dir,
                              const std::filesystem::path& out_dir);

// Aggregates standalone eval-report JSONs into report_summary.csv
// (language, metric, mean, std, runs).
void aggregate_eval_reports(const std::vector<std::filesystem::path>& report_paths,
                            const std::filesystem::path& out_dir);

}  // namespace langpaint
