// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0

#include "experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "metrics.hpp"
#include "rng.hpp"
#include "support.hpp"

namespace langpaint {

namespace {

const char* kMethods[3] = {"L-S", "M-L", "LangPAINT"};

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

uint64_t derive_seed(uint64_t seed, std::string_view tag, uint64_t index) {
  Rng r = Rng::derive(seed, tag, index);
  return r.next_u64();
}

// Appends b onto a, reconciling label vocabularies by name.
Corpus concat_corpora(const Corpus& a, const Corpus& b) {
  std::vector<std::string> names = a.label_names();
  std::map<std::string, uint32_t> index;
  for (size_t i = 0; i < names.size(); ++i) index[names[i]] = uint32_t(i);
  std::vector<uint32_t> remap(b.label_names().size());
  for (size_t i = 0; i < b.label_names().size(); ++i) {
    auto [it, inserted] = index.emplace(b.label_names()[i], uint32_t(names.size()));
    if (inserted) names.push_back(b.label_names()[i]);
    remap[i] = it->second;
  }
  Corpus out(names, {});
  for (const Example& ex : a.examples()) out.add(ex);
  for (const Example& ex : b.examples()) {
    out.add(Example{ex.text, remap[ex.label], ex.language});
  }
  return out;
}

ArmKind arm_for_method(const std::string& method) {
  if (method == "L-S") return ArmKind::Ls;
  if (method == "M-L") return ArmKind::Ml;
  return ArmKind::Merged;
}

double method_weighted_f1(const LangPaintModel& model, const Corpus& test_slice,
                          const std::string& method) {
  const ArmKind kind = arm_for_method(method);
  ConfusionMatrix cm(test_slice.num_classes());
  for (const Example& ex : test_slice.examples()) {
    cm.record(ex.label, infer_with(model, ex.text, ex.language, kind).label);
  }
  return f1_scores(cm).weighted;
}

// Baseline variant behind ls_from_scratch: per-language models trained from a
// fresh random initialization rather than the alpha=1 endpoint.
std::map<std::string, Checkpoint> train_scratch_ls(const Corpus& train_r, const Corpus& val_r,
                                                   const PipelineConfig& cfg,
                                                   const std::vector<std::string>& languages) {
  std::map<std::string, Checkpoint> out;
  for (const std::string& language : languages) {
    ModelConfig mcfg = cfg.model;
    if (mcfg.num_classes == 0) mcfg.num_classes = train_r.num_classes();
    Rng r = Rng::derive(cfg.seed, "scratch-ls", fnv1a64(language));
    mcfg.seed = r.next_u64();
    Checkpoint init = init_model(mcfg);
    init.set_meta("label_names", nlohmann::json(train_r.label_names()).dump());
    MetricFn metric = [mcfg](const Checkpoint& ckpt, const Corpus& val) {
      return weighted_f1_on(ckpt, val, mcfg);
    };
    TrainResult result = train(init, train_r.filter_language(language),
                               val_r.filter_language(language), mcfg, cfg.train, metric);
    out.emplace(language, std::move(result.ckpt));
  }
  return out;
}

std::vector<std::string> split_plain_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::vector<std::vector<std::string>> read_plain_csv(const std::filesystem::path& path,
                                                     size_t expected_fields) {
  std::vector<std::vector<std::string>> rows;
  std::string content = read_text_file(path);
  size_t start = 0;
  bool header = true;
  while (start < content.size()) {
    size_t nl = content.find('\n', start);
    if (nl == std::string::npos) nl = content.size();
    std::string line = content.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    start = nl + 1;
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = split_plain_csv_line(line);
    if (fields.size() != expected_fields) {
      raise(ErrCode::Parse, "'" + path.string() + "': unexpected field count");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

size_t ExperimentSpec::effective_runs() const {
  if (runs > 0) return runs;
  return protocol == "exp2" ? 10 : 5;
}

void ExperimentSpec::validate() const {
  if (protocol != "exp1" && protocol != "exp2") {
    raise(ErrCode::InvalidArgument, "protocol must be 'exp1' or 'exp2'");
  }
  const bool corpus_mode = !train_path.empty();
  if (synth.has_value() == corpus_mode) {
    raise(ErrCode::InvalidArgument,
          "experiment needs exactly one of a synth spec or corpus paths");
  }
  if (corpus_mode && dev_path.empty()) {
    raise(ErrCode::InvalidArgument, "corpus mode needs train and dev paths");
  }
  if (corpus_mode && protocol == "exp1" && test_path.empty()) {
    raise(ErrCode::InvalidArgument, "exp1 needs a fixed test corpus");
  }
  pipeline.validate();
}

ExperimentSpec ExperimentSpec::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::Parse, std::string("experiment spec is not valid JSON: ") + e.what());
  }
  ExperimentSpec spec;
  try {
    spec.protocol = j.at("protocol").get<std::string>();
    spec.runs = j.value("runs", size_t(0));
    spec.seed = j.value("seed", uint64_t(1));
    if (j.contains("synth")) spec.synth = SynthSpec::from_json_text(j.at("synth").dump());
    if (j.contains("corpora")) {
      const auto& c = j.at("corpora");
      spec.train_path = c.value("train", std::string());
      spec.dev_path = c.value("dev", std::string());
      spec.test_path = c.value("test", std::string());
    }
    spec.pipeline = j.contains("pipeline")
                        ? PipelineConfig::from_json_text(j.at("pipeline").dump())
                        : PipelineConfig();
    if (!j.contains("pipeline") || !j.at("pipeline").contains("seed")) {
      spec.pipeline.seed = spec.seed;
    }
    spec.ls_from_scratch = j.value("ls_from_scratch", false);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::Parse, std::string("malformed experiment spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::string ExperimentSpec::to_json_text() const {
  nlohmann::json j{{"protocol", protocol},
                   {"runs", effective_runs()},
                   {"seed", seed},
                   {"ls_from_scratch", ls_from_scratch},
                   {"pipeline", nlohmann::json::parse(pipeline.to_json_text())}};
  if (synth) j["synth"] = nlohmann::json::parse(synth->to_json_text());
  if (!train_path.empty()) {
    j["corpora"] = {{"train", train_path}, {"dev", dev_path}, {"test", test_path}};
  }
  return j.dump(2);
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) raise(ErrCode::Io, "cannot create '" + out_dir.string() + "': " + ec.message());

  const size_t runs = spec.effective_runs();
  const bool exp2 = (spec.protocol == "exp2");

  // Fixed pools for exp1; exp2 redraws per run.
  Corpus pool, fixed_test;
  if (!exp2) {
    if (spec.synth) {
      SynthSpec synth = *spec.synth;
      synth.seed = derive_seed(spec.seed, "data", 0);
      SynthCorpora corpora = generate(synth);
      pool = std::move(corpora.train);
      fixed_test = std::move(corpora.test);
    } else {
      pool = concat_corpora(load_corpus(spec.train_path, corpus_format_for(spec.train_path)),
                            load_corpus(spec.dev_path, corpus_format_for(spec.dev_path)));
      fixed_test = align_labels(load_corpus(spec.test_path, corpus_format_for(spec.test_path)),
                                pool.label_names());
    }
  }
  Corpus corpus_pool;  // exp2 corpus mode: everything pooled
  if (exp2 && !spec.synth) {
    corpus_pool = concat_corpora(load_corpus(spec.train_path, corpus_format_for(spec.train_path)),
                                 load_corpus(spec.dev_path, corpus_format_for(spec.dev_path)));
    if (!spec.test_path.empty()) {
      corpus_pool = concat_corpora(corpus_pool,
                                   load_corpus(spec.test_path, corpus_format_for(spec.test_path)));
    }
  }

  ExperimentResult result;
  result.methods.assign(std::begin(kMethods), std::end(kMethods));

  std::string runs_csv = "run,language,method,weighted_f1\n";
  std::string curves_csv = "run,language,alpha,val_f1\n";
  std::string alphas_csv = "run,language,alpha\n";

  for (size_t r = 0; r < runs; ++r) {
    Corpus train_r, val_r, test_r;
    if (!exp2) {
      auto parts = stratified_split(pool, {0.8, 0.2}, StrataKey::LanguageLabel,
                                    derive_seed(spec.seed, "exp1-split", r));
      train_r = std::move(parts[0]);
      val_r = std::move(parts[1]);
      test_r = fixed_test;
    } else if (spec.synth) {
      SynthSpec synth = *spec.synth;
      synth.seed = derive_seed(spec.seed, "data", r);
      SynthCorpora corpora = generate(synth);
      // Train pool splits 8:1 so train:val:test lands on the 80-10-10 shape
      // when n_test is an eighth of n_train.
      auto parts = stratified_split(corpora.train, {8.0 / 9.0, 1.0 / 9.0},
                                    StrataKey::LanguageLabel,
                                    derive_seed(spec.seed, "exp2-split", r));
      train_r = std::move(parts[0]);
      val_r = std::move(parts[1]);
      test_r = std::move(corpora.test);
    } else {
      auto parts = stratified_split(corpus_pool, {0.8, 0.1, 0.1}, StrataKey::LanguageLabel,
                                    derive_seed(spec.seed, "exp2-split", r));
      train_r = std::move(parts[0]);
      val_r = std::move(parts[1]);
      test_r = std::move(parts[2]);
    }

    PipelineConfig cfg = spec.pipeline;
    cfg.seed = derive_seed(spec.seed, "run", r);
    LangPaintModel model = run_langpaint(train_r, val_r, cfg);
    save_run_dir(model, out_dir / ("run_" + std::to_string(r)));

    std::map<std::string, Checkpoint> scratch_ls;
    if (spec.ls_from_scratch) {
      scratch_ls = train_scratch_ls(train_r, val_r, model.config, model.config.languages);
    }

    if (result.languages.empty()) result.languages = model.config.languages;

    for (const std::string& language : model.config.languages) {
      const LanguageArm& arm = model.per_language.at(language);
      for (const SweepPoint& p : arm.sweep.grid) {
        curves_csv += std::to_string(r) + "," + language + "," + format_g(p.alpha) + "," +
                      format_f6(p.val_f1) + "\n";
      }
      alphas_csv +=
          std::to_string(r) + "," + language + "," + format_g(arm.sweep.chosen_alpha) + "\n";
      result.chosen_alphas[language].push_back(arm.sweep.chosen_alpha);

      const Corpus test_slice = test_r.filter_language(language);
      if (test_slice.empty()) continue;
      for (const std::string& method : result.methods) {
        const double f1 = (method == "L-S" && spec.ls_from_scratch)
                              ? weighted_f1_on(scratch_ls.at(language), test_slice,
                                               model.config.model)
                              : method_weighted_f1(model, test_slice, method);
        result.cells[language][method].push_back(f1);
        runs_csv +=
            std::to_string(r) + "," + language + "," + method + "," + format_f6(f1) + "\n";
      }
    }
  }

  std::string comparison_csv = "language,method,mean_f1,std,runs\n";
  for (const auto& [language, methods] : result.cells) {
    for (const std::string& method : result.methods) {
      auto it = methods.find(method);
      if (it == methods.end()) continue;
      comparison_csv += language + "," + method + "," + format_f6(mean_of(it->second)) + "," +
                        format_f6(sample_std_dev(it->second)) + "," +
                        std::to_string(it->second.size()) + "\n";
    }
  }
  std::string alpha_summary_csv = "language,mean_alpha,runs\n";
  for (const auto& [language, alphas] : result.chosen_alphas) {
    alpha_summary_csv += language + "," + format_f6(mean_of(alphas)) + "," +
                         std::to_string(alphas.size()) + "\n";
  }

  atomic_write_file(out_dir / "runs.csv", runs_csv);
  atomic_write_file(out_dir / "comparison.csv", comparison_csv);
  atomic_write_file(out_dir / "sweep_curves.csv", curves_csv);
  atomic_write_file(out_dir / "selected_alphas.csv", alphas_csv);
  atomic_write_file(out_dir / "alpha_summary.csv", alpha_summary_csv);

  nlohmann::json digests;
  for (const char* file : {"runs.csv", "comparison.csv", "sweep_curves.csv",
                           "selected_alphas.csv", "alpha_summary.csv"}) {
    digests[file] = file_sha256(out_dir / file);
  }
  for (size_t r = 0; r < runs; ++r) {
    const std::string name = "run_" + std::to_string(r);
    digests[name + "/manifest.json"] = file_sha256(out_dir / name / "manifest.json");
  }
  nlohmann::json manifest{{"kind", "experiment"},
                          {"artifact_version", kArtifactVersion},
                          {"spec", nlohmann::json::parse(spec.to_json_text())},
                          {"languages", result.languages},
                          {"digests", std::move(digests)}};
  atomic_write_file(out_dir / "manifest.json", manifest.dump(2));
  return result;
}

void aggregate_experiment_dir(const std::filesystem::path& exp_dir,
                              const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) raise(ErrCode::Io, "cannot create '" + out_dir.string() + "': " + ec.message());

  // run,language,method,weighted_f1
  std::map<std::string, std::map<std::string, std::vector<double>>> cells;
  for (const auto& row : read_plain_csv(exp_dir / "runs.csv", 4)) {
    cells[row[1]][row[2]].push_back(std::stod(row[3]));
  }
  std::string comparison_csv = "language,method,mean_f1,std,runs\n";
  for (const auto& [language, methods] : cells) {
    for (const char* method : kMethods) {
      auto it = methods.find(method);
      if (it == methods.end()) continue;
      comparison_csv += language + "," + std::string(method) + "," +
                        format_f6(mean_of(it->second)) + "," +
                        format_f6(sample_std_dev(it->second)) + "," +
                        std::to_string(it->second.size()) + "\n";
    }
  }
  atomic_write_file(out_dir / "comparison.csv", comparison_csv);

  // run,language,alpha
  std::map<std::string, std::vector<double>> alphas;
  for (const auto& row : read_plain_csv(exp_dir / "selected_alphas.csv", 3)) {
    alphas[row[1]].push_back(std::stod(row[2]));
  }
  std::string alpha_summary_csv = "language,mean_alpha,runs\n";
  for (const auto& [language, values] : alphas) {
    alpha_summary_csv +=
        language + "," + format_f6(mean_of(values)) + "," + std::to_string(values.size()) + "\n";
  }
  atomic_write_file(out_dir / "alpha_summary.csv", alpha_summary_csv);

  // run,language,alpha,val_f1 -> mean curve per (language, alpha)
  std::map<std::string, std::map<double, std::vector<double>>> curves;
  for (const auto& row : read_plain_csv(exp_dir / "sweep_curves.csv", 4)) {
    curves[row[1]][std::stod(row[2])].push_back(std::stod(row[3]));
  }
  std::string curve_means_csv = "language,alpha,mean_val_f1,runs\n";
  for (const auto& [language, points] : curves) {
    for (const auto& [alpha, values] : points) {
      curve_means_csv += language + "," + format_g(alpha) + "," + format_f6(mean_of(values)) +
                         "," + std::to_string(values.size()) + "\n";
    }
  }
  atomic_write_file(out_dir / "curve_means.csv", curve_means_csv);
}

void aggregate_eval_reports(const std::vector<std::filesystem::path>& report_paths,
                            const std::filesystem::path& out_dir) {
  if (report_paths.empty()) raise(ErrCode::InvalidArgument, "no eval reports given");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) raise(ErrCode::Io, "cannot create '" + out_dir.string() + "': " + ec.message());

  std::vector<EvalReport> reports;
  for (const auto& path : report_paths) {
    reports.push_back(EvalReport::from_json_text(read_text_file(path)));
  }
  std::string csv = "language,metric,mean,std,runs\n";
  for (const auto& [key, cell] : aggregate_reports(reports)) {
    const size_t bar = key.find('|');
    csv += key.substr(0, bar) + "," + key.substr(bar + 1) + "," + format_f6(cell.mean) + "," +
           format_f6(cell.std_dev) + "," + std::to_string(cell.runs) + "\n";
  }
  atomic_write_file(out_dir / "report_summary.csv", csv);
}

}  // namespace langpaint
