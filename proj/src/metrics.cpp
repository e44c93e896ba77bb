// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0

#include "metrics.hpp"

#include <cmath>

#include <json.hpp>

namespace langpaint {

void ConfusionMatrix::record(size_t gold, size_t pred) {
  if (gold >= c_ || pred >= c_) {
    raise(ErrCode::Validation, "label out of range for " + std::to_string(c_) + " classes");
  }
  counts_[gold * c_ + pred] += 1;
}

int64_t ConfusionMatrix::row_sum(size_t gold) const {
  int64_t sum = 0;
  for (size_t p = 0; p < c_; ++p) sum += at(gold, p);
  return sum;
}

int64_t ConfusionMatrix::col_sum(size_t pred) const {
  int64_t sum = 0;
  for (size_t g = 0; g < c_; ++g) sum += at(g, pred);
  return sum;
}

int64_t ConfusionMatrix::total() const {
  int64_t sum = 0;
  for (int64_t v : counts_) sum += v;
  return sum;
}

ConfusionMatrix confusion(const std::vector<uint32_t>& golds, const std::vector<uint32_t>& preds,
                          size_t num_classes) {
  if (golds.size() != preds.size()) {
    raise(ErrCode::Validation, "gold and prediction lists differ in length");
  }
  ConfusionMatrix cm(num_classes);
  for (size_t i = 0; i < golds.size(); ++i) cm.record(golds[i], preds[i]);
  return cm;
}

F1Scores f1_scores(const ConfusionMatrix& cm) {
  const size_t c = cm.num_classes();
  F1Scores out;
  out.per_class.assign(c, 0.0);

  double macro_sum = 0.0;
  size_t macro_count = 0;
  double weighted_sum = 0.0;
  int64_t weighted_support = 0;

  for (size_t i = 0; i < c; ++i) {
    const int64_t tp = cm.at(i, i);
    const int64_t support = cm.row_sum(i);
    const int64_t predicted = cm.col_sum(i);
    const double precision = predicted > 0 ? double(tp) / double(predicted) : 0.0;
    const double recall = support > 0 ? double(tp) / double(support) : 0.0;
    const double f1 =
        (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    out.per_class[i] = f1;
    if (support > 0 || predicted > 0) {
      macro_sum += f1;
      ++macro_count;
    }
    if (support > 0) {
      weighted_sum += double(support) * f1;
      weighted_support += support;
    }
  }
  out.macro = macro_count > 0 ? macro_sum / double(macro_count) : 0.0;
  out.weighted = weighted_support > 0 ? weighted_sum / double(weighted_support) : 0.0;
  return out;
}

namespace {

LanguageEval eval_from_confusion(const ConfusionMatrix& cm) {
  LanguageEval ev;
  ev.support = size_t(cm.total());
  F1Scores f1 = f1_scores(cm);
  ev.per_class_f1 = std::move(f1.per_class);
  ev.macro_f1 = f1.macro;
  ev.weighted_f1 = f1.weighted;
  int64_t correct = 0;
  for (size_t i = 0; i < cm.num_classes(); ++i) correct += cm.at(i, i);
  ev.accuracy = cm.total() > 0 ? double(correct) / double(cm.total()) : 0.0;
  return ev;
}

nlohmann::json eval_to_json(const LanguageEval& ev) {
  return {{"support", ev.support},
          {"per_class_f1", ev.per_class_f1},
          {"macro_f1", ev.macro_f1},
          {"weighted_f1", ev.weighted_f1},
          {"accuracy", ev.accuracy}};
}

LanguageEval eval_from_json(const nlohmann::json& j) {
  LanguageEval ev;
  ev.support = j.at("support").get<size_t>();
  ev.per_class_f1 = j.at("per_class_f1").get<std::vector<double>>();
  ev.macro_f1 = j.at("macro_f1").get<double>();
  ev.weighted_f1 = j.at("weighted_f1").get<double>();
  ev.accuracy = j.value("accuracy", 0.0);
  return ev;
}

}  // namespace

std::string EvalReport::to_json_text() const {
  nlohmann::json langs;
  for (const auto& [language, ev] : per_language) langs[language] = eval_to_json(ev);
  nlohmann::json j{{"label_names", label_names},
                   {"per_language", std::move(langs)},
                   {"overall", eval_to_json(overall)},
                   {"meta", meta}};
  return j.dump(2);
}

EvalReport EvalReport::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::Parse, std::string("eval report is not valid JSON: ") + e.what());
  }
  EvalReport report;
  try {
    report.label_names = j.at("label_names").get<std::vector<std::string>>();
    for (auto& [language, ev] : j.at("per_language").items()) {
      report.per_language[language] = eval_from_json(ev);
    }
    report.overall = eval_from_json(j.at("overall"));
    if (j.contains("meta")) {
      report.meta = j.at("meta").get<std::map<std::string, std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::Parse, std::string("malformed eval report: ") + e.what());
  }
  return report;
}

EvalReport evaluate(const PredictFn& predict, const Corpus& corpus) {
  const size_t c = corpus.num_classes();
  std::map<std::string, ConfusionMatrix> per_language;
  ConfusionMatrix overall(c);
  for (const Example& ex : corpus.examples()) {
    const uint32_t pred = predict(ex.text, ex.language);
    if (pred >= c) {
      raise(ErrCode::Validation, "prediction label out of the corpus vocabulary");
    }
    auto [it, inserted] = per_language.try_emplace(ex.language, c);
    it->second.record(ex.label, pred);
    overall.record(ex.label, pred);
  }

  EvalReport report;
  report.label_names = corpus.label_names();
  for (const auto& [language, cm] : per_language) {
    report.per_language[language] = eval_from_confusion(cm);
  }
  report.overall = eval_from_confusion(overall);
  return report;
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / double(values.size());
}

double sample_std_dev(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mean = mean_of(values);
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / double(values.size() - 1));
}

std::map<std::string, AggregateCell> aggregate_reports(const std::vector<EvalReport>& reports) {
  std::map<std::string, std::vector<double>> cells;
  for (const EvalReport& report : reports) {
    for (const auto& [language, ev] : report.per_language) {
      cells[language + "|weighted_f1"].push_back(ev.weighted_f1);
      cells[language + "|macro_f1"].push_back(ev.macro_f1);
    }
    cells["overall|weighted_f1"].push_back(report.overall.weighted_f1);
    cells["overall|macro_f1"].push_back(report.overall.macro_f1);
  }
  std::map<std::string, AggregateCell> out;
  for (const auto& [key, values] : cells) {
    out[key] = AggregateCell{mean_of(values), sample_std_dev(values), values.size()};
  }
  return out;
}

}  // namespace langpaint
