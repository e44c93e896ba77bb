// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0

#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "rng.hpp"
#include "support.hpp"

namespace langpaint {

namespace {

std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string format_f6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Canonical corpus order: languages sorted, original order kept within each.
// Training batches are built from this order, so outputs do not depend on how
// languages were interleaved in the input file.
Corpus sort_by_language(const Corpus& corpus) {
  Corpus out(corpus.label_names(), {});
  for (const std::string& language : corpus.languages()) {
    for (const Example& ex : corpus.examples()) {
      if (ex.language == language) out.add(ex);
    }
  }
  return out;
}

ModelConfig resolve_model_config(const PipelineConfig& cfg, const Corpus& train) {
  ModelConfig mcfg = cfg.model;
  if (mcfg.num_classes == 0) mcfg.num_classes = train.num_classes();
  if (mcfg.seed == 0) {
    Rng r = Rng::derive(cfg.seed, "model");
    mcfg.seed = r.next_u64();
  }
  mcfg.validate();
  return mcfg;
}

uint64_t finetune_seed(const PipelineConfig& cfg, const std::string& language) {
  Rng r = Rng::derive(cfg.seed, "finetune", fnv1a64(language));
  return r.next_u64();
}

nlohmann::json history_summary(const TrainHistory& history) {
  nlohmann::json j{{"epochs", history.epochs.size()},
                   {"best_epoch", history.best_epoch},
                   {"stopped_epoch", history.stopped_epoch}};
  if (!history.epochs.empty()) {
    j["final_train_loss"] = history.epochs.back().train_loss;
    if (history.best_epoch > 0) {
      j["best_val_metric"] = history.epochs[history.best_epoch - 1].val_metric;
    }
  }
  return j;
}

}  // namespace

std::vector<double> PipelineConfig::default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(double(i) / 10.0);
  return grid;
}

void validate_alpha_grid(const std::vector<double>& grid) {
  if (grid.size() < 2) raise(ErrCode::InvalidArgument, "alpha grid needs at least two values");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || grid[i] > 1.0) {
      raise(ErrCode::InvalidArgument, "alpha grid value " + format_g(grid[i]) + " not in [0, 1]");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      raise(ErrCode::InvalidArgument, "alpha grid must be strictly increasing");
    }
  }
  if (grid.front() != 0.0 || grid.back() != 1.0) {
    raise(ErrCode::InvalidArgument, "alpha grid must contain 0.0 and 1.0");
  }
}

void PipelineConfig::validate() const {
  validate_alpha_grid(alpha_grid);
  train.validate();
  if (ensemble_members != "merged" && ensemble_members != "ls") {
    raise(ErrCode::InvalidArgument, "ensemble_members must be 'merged' or 'ls'");
  }
  if (threads < 1) raise(ErrCode::InvalidArgument, "threads must be at least 1");
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::Parse, std::string("config is not valid JSON: ") + e.what());
  }
  PipelineConfig cfg;
  try {
    if (j.contains("model")) {
      const auto& m = j.at("model");
      cfg.model.hash_dim = m.value("hash_dim", cfg.model.hash_dim);
      cfg.model.num_classes = m.value("num_classes", size_t(0));
      if (m.contains("ngram_orders")) {
        cfg.model.ngram_orders.clear();
        for (int n : m.at("ngram_orders")) cfg.model.ngram_orders.insert(n);
      }
      cfg.model.seed = m.value("seed", uint64_t(0));
    } else {
      cfg.model.num_classes = 0;
      cfg.model.seed = 0;
    }
    if (j.contains("train")) {
      const auto& t = j.at("train");
      cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
      cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
      cfg.train.max_epochs = t.value("max_epochs", cfg.train.max_epochs);
      cfg.train.patience = t.value("patience", cfg.train.patience);
      cfg.train.min_delta = t.value("min_delta", cfg.train.min_delta);
    }
    if (j.contains("alpha_grid")) cfg.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
    if (j.contains("languages")) {
      cfg.languages = j.at("languages").get<std::vector<std::string>>();
    }
    cfg.seed = j.value("seed", cfg.seed);
    const std::string policy = j.value("fallback_language_policy", std::string("use-ml"));
    if (policy == "use-ml") cfg.fallback = FallbackPolicy::UseMl;
    else if (policy == "error") cfg.fallback = FallbackPolicy::Error;
    else raise(ErrCode::InvalidArgument, "fallback_language_policy must be 'use-ml' or 'error'");
    const std::string metric = j.value("ml_metric", std::string("mean-per-language"));
    if (metric == "mean-per-language") cfg.ml_metric = MlMetric::MeanPerLanguage;
    else if (metric == "pooled-weighted") cfg.ml_metric = MlMetric::PooledWeighted;
    else raise(ErrCode::InvalidArgument, "ml_metric must be 'mean-per-language' or 'pooled-weighted'");
    cfg.ensemble_members = j.value("ensemble_members", std::string("merged"));
    cfg.threads = j.value("threads", 1);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::Parse, std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string PipelineConfig::to_json_text() const {
  nlohmann::json j{
      {"model",
       {{"hash_dim", model.hash_dim},
        {"num_classes", model.num_classes},
        {"ngram_orders", model.ngram_orders},
        {"seed", model.seed}}},
      {"train",
       {{"batch_size", train.batch_size},
        {"learning_rate", train.learning_rate},
        {"max_epochs", train.max_epochs},
        {"patience", train.patience},
        {"min_delta", train.min_delta},
        {"optimizer", "adam"},
        {"loss", "cross-entropy"}}},
      {"alpha_grid", alpha_grid},
      {"languages", languages},
      {"seed", seed},
      {"fallback_language_policy", fallback == FallbackPolicy::UseMl ? "use-ml" : "error"},
      {"ml_metric",
       ml_metric == MlMetric::MeanPerLanguage ? "mean-per-language" : "pooled-weighted"},
      {"ensemble_members", ensemble_members},
      {"threads", threads}};
  return j.dump(2);
}

// Label names travel in checkpoint meta so corpora loaded from other files
// can be aligned onto the model's class indices.
std::vector<std::string> checkpoint_label_names(const Checkpoint& ckpt) {
  const std::string text = ckpt.meta_or("label_names", "");
  if (text.empty()) return {};
  try {
    return nlohmann::json::parse(text).get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception&) {
    return {};
  }
}

double weighted_f1_on(const Checkpoint& ckpt, const Corpus& corpus, const ModelConfig& mcfg) {
  const std::vector<std::string> vocab = checkpoint_label_names(ckpt);
  const Corpus aligned = vocab.empty() ? corpus : align_labels(corpus, vocab);
  ConfusionMatrix cm(aligned.num_classes());
  for (const Example& ex : aligned.examples()) {
    cm.record(ex.label, predict(ckpt, ex.text, mcfg));
  }
  return f1_scores(cm).weighted;
}

TrainResult train_multilingual(const Corpus& raw_train, const Corpus& raw_val,
                               const PipelineConfig& cfg) {
  const ModelConfig mcfg = resolve_model_config(cfg, raw_train);
  const Corpus train_set = sort_by_language(raw_train);
  const Corpus val_set = sort_by_language(align_labels(raw_val, train_set.label_names()));
  std::vector<std::string> languages = cfg.languages;
  if (languages.empty()) {
    std::set<std::string> all;
    for (const std::string& l : train_set.languages()) all.insert(l);
    for (const std::string& l : val_set.languages()) all.insert(l);
    languages.assign(all.begin(), all.end());
  }
  for (const std::string& language : languages) {
    const bool in_train = !train_set.filter_language(language).empty();
    const bool in_val = !val_set.filter_language(language).empty();
    if (!in_train || !in_val) {
      raise(ErrCode::Validation, "language '" + language + "' missing from the " +
                                     (in_train ? "validation" : "training") + " corpus");
    }
  }

  MetricFn metric;
  if (cfg.ml_metric == MlMetric::PooledWeighted) {
    metric = [mcfg](const Checkpoint& ckpt, const Corpus& val) {
      return weighted_f1_on(ckpt, val, mcfg);
    };
  } else {
    metric = [mcfg, languages](const Checkpoint& ckpt, const Corpus& val) {
      double sum = 0.0;
      for (const std::string& language : languages) {
        sum += weighted_f1_on(ckpt, val.filter_language(language), mcfg);
      }
      return sum / double(languages.size());
    };
  }

  Checkpoint init = init_model(mcfg);
  init.set_meta("label_names", nlohmann::json(train_set.label_names()).dump());
  TrainResult result = train(init, train_set, val_set, mcfg, cfg.train, metric);
  result.ckpt.set_meta("language", "multilingual");
  return result;
}

TrainResult finetune_language(const Checkpoint& ml, const std::string& language,
                              const Corpus& raw_train, const Corpus& raw_val,
                              const PipelineConfig& cfg) {
  if (raw_train.empty() || raw_val.empty()) {
    raise(ErrCode::Validation, "empty corpus for language '" + language + "'");
  }
  for (const Corpus* corpus : {&raw_train, &raw_val}) {
    for (const Example& ex : corpus->examples()) {
      if (ex.language != language) {
        raise(ErrCode::Validation, "corpus for language '" + language +
                                       "' contains an example tagged '" + ex.language + "'");
      }
    }
  }
  const std::vector<std::string> ml_vocab = checkpoint_label_names(ml);
  const Corpus train_l = ml_vocab.empty() ? raw_train : align_labels(raw_train, ml_vocab);
  const Corpus val_l = align_labels(raw_val, train_l.label_names());
  ModelConfig mcfg = resolve_model_config(cfg, train_l);
  mcfg.num_classes = ml.tensor("W").shape[0];
  mcfg.hash_dim = ml.tensor("W").shape[1];
  mcfg.seed = finetune_seed(cfg, language);

  const std::string parent = digest(ml);
  MetricFn metric = [mcfg](const Checkpoint& ckpt, const Corpus& val) {
    return weighted_f1_on(ckpt, val, mcfg);
  };
  TrainResult result = train(ml, train_l, val_l, mcfg, cfg.train, metric);
  result.ckpt.set_meta("language", language);
  result.ckpt.set_meta("parent", parent);
  return result;
}

SweepOutput alpha_sweep(const Checkpoint& ls, const Checkpoint& ml, const Corpus& val_l,
                        const std::vector<double>& grid, const PipelineConfig& cfg) {
  validate_alpha_grid(grid);
  std::string why;
  if (!ls.compatible_with(ml, &why)) {
    raise(ErrCode::Incompatible, "incompatible checkpoints: " + why);
  }
  if (val_l.empty()) raise(ErrCode::Validation, "empty validation corpus for the alpha sweep");
  const std::vector<std::string> langs = val_l.languages();
  if (langs.size() != 1) {
    raise(ErrCode::Validation, "alpha sweep validation corpus must hold a single language");
  }

  ModelConfig mcfg = cfg.model;
  mcfg.num_classes = ml.tensor("W").shape[0];
  mcfg.hash_dim = ml.tensor("W").shape[1];

  SweepOutput out;
  out.result.language = langs.front();
  out.result.grid.resize(grid.size());

  // Per-alpha evaluations are independent; merge order stays grid order.
  std::vector<double> scores(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](size_t i) {
    Checkpoint merged = interpolate(ls, ml, grid[i]);
    scores[i] = weighted_f1_on(merged, val_l, mcfg);
  });

  size_t best = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    out.result.grid[i] = SweepPoint{grid[i], scores[i]};
    if (scores[i] > scores[best]) best = i;
  }
  out.result.chosen_alpha = grid[best];
  out.merged = interpolate(ls, ml, grid[best]);
  out.result.chosen_digest = digest(out.merged);
  return out;
}

LangPaintModel run_langpaint(const Corpus& train_set, const Corpus& raw_val,
                             const PipelineConfig& cfg) {
  cfg.validate();
  const Corpus val_set = align_labels(raw_val, train_set.label_names());

  LangPaintModel model;
  model.config = cfg;
  model.config.model = resolve_model_config(cfg, train_set);
  model.label_names = train_set.label_names();

  std::vector<std::string> languages = cfg.languages;
  if (languages.empty()) {
    std::set<std::string> all;
    for (const std::string& l : train_set.languages()) all.insert(l);
    for (const std::string& l : val_set.languages()) all.insert(l);
    languages.assign(all.begin(), all.end());
  } else {
    std::sort(languages.begin(), languages.end());
  }
  model.config.languages = languages;

  TrainResult ml = train_multilingual(train_set, val_set, model.config);
  model.ml = std::move(ml.ckpt);
  model.ml_history = std::move(ml.history);

  // Fine-tunes and sweeps are independent across languages; seeds derive from
  // the language name, so results do not depend on scheduling.
  std::vector<LanguageArm> arms(languages.size());
  parallel_for(languages.size(), cfg.threads, [&](size_t i) {
    const std::string& language = languages[i];
    const Corpus train_l = train_set.filter_language(language);
    const Corpus val_l = val_set.filter_language(language);
    TrainResult ls = finetune_language(model.ml, language, train_l, val_l, model.config);
    SweepOutput sweep = alpha_sweep(ls.ckpt, model.ml, val_l, model.config.alpha_grid,
                                    model.config);
    arms[i] = LanguageArm{std::move(ls.ckpt), std::move(sweep.merged), std::move(sweep.result),
                          std::move(ls.history)};
  });
  for (size_t i = 0; i < languages.size(); ++i) {
    model.per_language.emplace(languages[i], std::move(arms[i]));
  }
  return model;
}

Prediction infer(const LangPaintModel& model, const std::string& text,
                 const std::string& language) {
  return infer_with(model, text, language, ArmKind::Merged);
}

Prediction infer_with(const LangPaintModel& model, const std::string& text,
                      const std::string& language, ArmKind kind) {
  const Checkpoint* ckpt = &model.ml;
  if (kind != ArmKind::Ml) {
    auto it = model.per_language.find(language);
    if (it != model.per_language.end()) {
      ckpt = (kind == ArmKind::Ls) ? &it->second.ls : &it->second.merged;
    } else if (model.config.fallback == FallbackPolicy::Error) {
      raise(ErrCode::Validation, "unknown language '" + language + "'");
    }
  }
  Prediction out;
  out.probs = predict_proba(*ckpt, text, model.config.model);
  out.label = argmax_label(out.probs);
  return out;
}

namespace {

std::string sweep_csv_text(const SweepResult& sweep) {
  std::string csv = "alpha,val_f1\n";
  for (const SweepPoint& p : sweep.grid) {
    csv += format_g(p.alpha) + "," + format_f6(p.val_f1) + "\n";
  }
  return csv;
}

}  // namespace

std::string run_manifest_text(const LangPaintModel& model, const std::filesystem::path& dir) {
  nlohmann::json chosen, sweeps, histories, digests;
  histories["ml"] = history_summary(model.ml_history);
  for (const auto& [language, arm] : model.per_language) {
    chosen[language] = arm.sweep.chosen_alpha;
    histories[language] = history_summary(arm.history);
    nlohmann::json curve = nlohmann::json::array();
    for (const SweepPoint& p : arm.sweep.grid) {
      curve.push_back({{"alpha", p.alpha}, {"val_f1", p.val_f1}});
    }
    sweeps[language] = std::move(curve);
  }
  std::vector<std::string> files{"ml.ckpt"};
  for (const auto& [language, arm] : model.per_language) {
    files.push_back(language + ".ls.ckpt");
    files.push_back(language + ".merged.ckpt");
    files.push_back(language + ".sweep.csv");
  }
  for (const std::string& file : files) digests[file] = file_sha256(dir / file);

  nlohmann::json j{{"kind", "run"},
                   {"artifact_version", kArtifactVersion},
                   {"checkpoint_format_version", kCheckpointFormatVersion},
                   {"config", nlohmann::json::parse(model.config.to_json_text())},
                   {"label_names", model.label_names},
                   {"languages", model.config.languages},
                   {"chosen_alpha", std::move(chosen)},
                   {"sweeps", std::move(sweeps)},
                   {"histories", std::move(histories)},
                   {"digests", std::move(digests)},
                   {"notes",
                    {{"sweep_validation", "alpha sweep reuses the early-stopping validation split"},
                     {"optimizer_state", "Adam moments reinitialized at fine-tune start"}}}};
  return j.dump(2);
}

void save_run_dir(const LangPaintModel& model, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) raise(ErrCode::Io, "cannot create '" + dir.string() + "': " + ec.message());

  save_checkpoint(model.ml, dir / "ml.ckpt");
  for (const auto& [language, arm] : model.per_language) {
    save_checkpoint(arm.ls, dir / (language + ".ls.ckpt"));
    save_checkpoint(arm.merged, dir / (language + ".merged.ckpt"));
    atomic_write_file(dir / (language + ".sweep.csv"), sweep_csv_text(arm.sweep));
  }
  atomic_write_file(dir / "manifest.json", run_manifest_text(model, dir));
}

LangPaintModel load_run_dir(const std::filesystem::path& dir) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::Parse, "'" + (dir / "manifest.json").string() + "': " + e.what());
  }

  LangPaintModel model;
  try {
    model.config = PipelineConfig::from_json_text(manifest.at("config").dump());
    model.label_names = manifest.at("label_names").get<std::vector<std::string>>();
    model.ml = load_checkpoint(dir / "ml.ckpt");
    for (const std::string& language :
         manifest.at("languages").get<std::vector<std::string>>()) {
      LanguageArm arm;
      arm.ls = load_checkpoint(dir / (language + ".ls.ckpt"));
      arm.merged = load_checkpoint(dir / (language + ".merged.ckpt"));
      arm.sweep.language = language;
      arm.sweep.chosen_alpha = manifest.at("chosen_alpha").at(language).get<double>();
      arm.sweep.chosen_digest = digest(arm.merged);
      for (const auto& p : manifest.at("sweeps").at(language)) {
        arm.sweep.grid.push_back(
            SweepPoint{p.at("alpha").get<double>(), p.at("val_f1").get<double>()});
      }
      model.per_language.emplace(language, std::move(arm));
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::Parse, "'" + dir.string() + "': malformed run manifest: " + e.what());
  }
  return model;
}

}  // namespace langpaint
