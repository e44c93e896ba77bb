// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0
//
// Confusion-matrix evaluation: per-class, macro and support-weighted F1 with
// per-language breakdowns. Degenerate cases follow the usual conventions:
// 0/0 ratios are 0, zero-support classes are excluded from the weighted
// average, and macro averages over classes active in gold or predictions.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "data.hpp"

namespace langpaint {

class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(size_t num_classes) : c_(num_classes), counts_(num_classes * num_classes, 0) {}

  size_t num_classes() const { return c_; }
  int64_t at(size_t gold, size_t pred) const { return counts_[gold * c_ + pred]; }
  void record(size_t gold, size_t pred);

  int64_t row_sum(size_t gold) const;  // support of the gold class
  int64_t col_sum(size_t pred) const;
  int64_t total() const;

 private:
  size_t c_ = 0;
  std::vector<int64_t> counts_;
};

ConfusionMatrix confusion(const std::vector<uint32_t>& golds, const std::vector<uint32_t>& preds,
                          size_t num_classes);

struct F1Scores {
  std::vector<double> per_class;
  double macro = 0.0;
  double weighted = 0.0;
};

F1Scores f1_scores(const ConfusionMatrix& cm);

struct LanguageEval {
  size_t support = 0;
  std::vector<double> per_class_f1;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
};

struct EvalReport {
  std::vector<std::string> label_names;
  std::map<std::string, LanguageEval> per_language;
  LanguageEval overall;
  std::map<std::string, std::string> meta;

  std::string to_json_text() const;
  static EvalReport from_json_text(const std::string& text);
};

// Label prediction for one (text, language) pair; the model modules provide
// the closure.
using PredictFn = std::function<uint32_t(const std::string& text, const std::string& language)>;

// Evaluates per-language slices independently plus the pooled overall block.
EvalReport evaluate(const PredictFn& predict, const Corpus& corpus);

struct AggregateCell {
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation, 0 for a single run
  size_t runs = 0;
};

// Mean and sample standard deviation of weighted/macro F1 per language
// across runs. Keys are "<language>|weighted_f1" and "<language>|macro_f1",
// with "overall" for the pooled block.
std::map<std::string, AggregateCell> aggregate_reports(const std::vector<EvalReport>& reports);

double mean_of(const std::vector<double>& values);
double sample_std_dev(const std::vector<double>& values);

}  // namespace langpaint
