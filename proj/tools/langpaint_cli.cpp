// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. All domain work goes through the langpaint C API;
// this file only parses arguments, shuttles files and writes run manifests.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 internal.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "langpaint.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliError {
  int exit_code;
};

void check(lp_status status) {
  if (status == LP_OK) return;
  std::cerr << "error: " << lp_last_error() << "\n";
  throw CliError{status == LP_ERR_INTERNAL ? 3 : 2};
}

// Wraps a C-API string so it is always released.
std::string take_string(char* s) {
  std::string out = s ? s : "";
  lp_string_free(s);
  return out;
}

std::string file_digest(const std::string& path) {
  char* hex = nullptr;
  check(lp_file_sha256(path.c_str(), &hex));
  return take_string(hex);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot open '" << path << "'\n";
    throw CliError{2};
  }
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

json parse_json_file(const std::string& path, const char* what) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    std::cerr << "error: " << what << " '" << path << "' is not valid JSON: " << e.what() << "\n";
    throw CliError{2};
  }
}

struct GlobalOptions {
  std::optional<uint64_t> seed;
  std::string config_path;
  std::string out_dir;
  int threads = 1;
  bool threads_given = false;
  bool quiet = false;
  std::vector<std::string> argv;
};

void info(const GlobalOptions& opts, const std::string& line) {
  if (!opts.quiet) std::cout << line << "\n";
}

// Effective pipeline config: the --config file (if any) with --seed and
// --threads folded in.
json effective_config(const GlobalOptions& opts) {
  json cfg = opts.config_path.empty() ? json::object()
                                      : parse_json_file(opts.config_path, "config");
  if (opts.seed) cfg["seed"] = *opts.seed;
  if (opts.threads_given || !cfg.contains("threads")) cfg["threads"] = opts.threads;
  return cfg;
}

fs::path ensure_out_dir(const GlobalOptions& opts) {
  if (opts.out_dir.empty()) {
    std::cerr << "error: this command needs --out\n";
    throw CliError{1};
  }
  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create '" << opts.out_dir << "': " << ec.message() << "\n";
    throw CliError{2};
  }
  return opts.out_dir;
}

// One manifest per output directory, written atomically at completion.
// Commands whose core artifacts already carry a manifest (run, experiments)
// get the command/input/timing fields merged into it.
class ManifestWriter {
 public:
  ManifestWriter(const GlobalOptions& opts, std::string command)
      : start_(std::chrono::steady_clock::now()) {
    body_["command"] = std::move(command);
    body_["argv"] = opts.argv;
    body_["artifact_version"] = lp_version();
    if (opts.seed) body_["seed"] = *opts.seed;
  }

  void add_input(const std::string& name, const std::string& path) {
    body_["inputs"][name] = {{"path", path}, {"sha256", file_digest(path)}};
  }

  void add_output(const fs::path& dir, const std::string& name) {
    body_["outputs"][name] = file_digest((dir / name).string());
  }

  void set(const std::string& key, json value) { body_[key] = std::move(value); }

  void write(const fs::path& dir) {
    const fs::path path = dir / "manifest.json";
    json merged = body_;
    if (fs::exists(path)) {
      json existing = parse_json_file(path.string(), "manifest");
      for (auto& [key, value] : body_.items()) existing[key] = value;
      merged = std::move(existing);
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start_);
    merged["wall_time_ms"] = elapsed.count();
    check(lp_write_file_atomic(path.string().c_str(), merged.dump(2).c_str()));
  }

 private:
  std::chrono::steady_clock::time_point start_;
  json body_ = json::object();
};

using CorpusHandle = std::unique_ptr<lp_corpus, void (*)(lp_corpus*)>;
using CheckpointHandle = std::unique_ptr<lp_checkpoint, void (*)(lp_checkpoint*)>;

CorpusHandle wrap(lp_corpus* c) { return CorpusHandle(c, lp_corpus_free); }
CheckpointHandle wrap(lp_checkpoint* c) { return CheckpointHandle(c, lp_checkpoint_free); }

CorpusHandle load_corpus_arg(const std::string& path) {
  lp_corpus* c = nullptr;
  check(lp_corpus_load(path.c_str(), nullptr, &c));
  return wrap(c);
}

CheckpointHandle load_checkpoint_arg(const std::string& path) {
  lp_checkpoint* c = nullptr;
  check(lp_checkpoint_load(path.c_str(), &c));
  return wrap(c);
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  try {
    const size_t c1 = text.find(':');
    if (c1 != std::string::npos) {
      const size_t c2 = text.find(':', c1 + 1);
      if (c2 == std::string::npos) {
        std::cerr << "error: --grid expects start:end:step or a comma list\n";
        throw CliError{1};
      }
      const double start = std::stod(text.substr(0, c1));
      const double end = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
      const double step = std::stod(text.substr(c2 + 1));
      if (step <= 0.0) {
        std::cerr << "error: --grid step must be positive\n";
        throw CliError{1};
      }
      const int n = int((end - start) / step + 0.5);
      for (int i = 0; i <= n; ++i) {
        // kill float drift so 0:1:0.1 lands exactly on the tenths
        grid.push_back(std::round((start + double(i) * step) * 1e12) / 1e12);
      }
    } else {
      size_t pos = 0;
      while (pos <= text.size()) {
        size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        grid.push_back(std::stod(text.substr(pos, comma - pos)));
        pos = comma + 1;
      }
    }
  } catch (const std::invalid_argument&) {
    std::cerr << "error: cannot parse number list '" << text << "'\n";
    throw CliError{1};
  }
  return grid;
}

std::string format_probs(const std::vector<double>& probs) {
  std::string out;
  char buf[40];
  for (size_t i = 0; i < probs.size(); ++i) {
    if (i) out.push_back(',');
    std::snprintf(buf, sizeof(buf), "%.6f", probs[i]);
    out += buf;
  }
  return out;
}

// ---- subcommands ----

int cmd_gen_data(const GlobalOptions& opts, const std::string& spec_path) {
  ManifestWriter manifest(opts, "gen-data");
  manifest.add_input("spec", spec_path);
  json spec = parse_json_file(spec_path, "synth spec");
  if (opts.seed) spec["seed"] = *opts.seed;

  const fs::path out = ensure_out_dir(opts);
  lp_corpus *train = nullptr, *test = nullptr;
  check(lp_corpus_generate(spec.dump().c_str(), &train, &test));
  CorpusHandle train_h = wrap(train), test_h = wrap(test);
  check(lp_corpus_save(train, (out / "train.csv").string().c_str(), "csv"));
  check(lp_corpus_save(test, (out / "test.csv").string().c_str(), "csv"));

  size_t n_train = 0, n_test = 0;
  check(lp_corpus_size(train, &n_train));
  check(lp_corpus_size(test, &n_test));
  manifest.set("spec", spec);
  manifest.add_output(out, "train.csv");
  manifest.add_output(out, "test.csv");
  manifest.write(out);
  info(opts, "wrote " + std::to_string(n_train) + " train and " + std::to_string(n_test) +
                 " test examples to " + out.string());
  return 0;
}

int cmd_clean(const GlobalOptions& opts, const std::string& train_path,
              const std::string& dev_path) {
  ManifestWriter manifest(opts, "clean");
  manifest.add_input("train", train_path);
  manifest.add_input("dev", dev_path);
  const fs::path out = ensure_out_dir(opts);

  CorpusHandle train = load_corpus_arg(train_path);
  CorpusHandle dev = load_corpus_arg(dev_path);
  lp_corpus *train2 = nullptr, *dev2 = nullptr;
  size_t removed = 0;
  check(lp_corpus_dedup(train.get(), dev.get(), &train2, &dev2, &removed));
  CorpusHandle train2_h = wrap(train2), dev2_h = wrap(dev2);
  check(lp_corpus_save(train2, (out / "train.clean.csv").string().c_str(), "csv"));
  check(lp_corpus_save(dev2, (out / "dev.clean.csv").string().c_str(), "csv"));

  manifest.set("removed", removed);
  manifest.add_output(out, "train.clean.csv");
  manifest.add_output(out, "dev.clean.csv");
  manifest.write(out);
  info(opts, "removed " + std::to_string(removed) + " duplicate examples");
  return 0;
}

int cmd_split(const GlobalOptions& opts, const std::string& in_path,
              const std::string& fractions_text, size_t folds, const std::string& strata) {
  ManifestWriter manifest(opts, "split");
  manifest.add_input("corpus", in_path);
  const fs::path out = ensure_out_dir(opts);
  CorpusHandle corpus = load_corpus_arg(in_path);
  const uint64_t seed = opts.seed.value_or(1);

  if (folds > 0) {
    std::vector<lp_corpus*> train(folds, nullptr), val(folds, nullptr);
    check(lp_corpus_folds(corpus.get(), folds, strata.c_str(), seed, train.data(), val.data()));
    for (size_t i = 0; i < folds; ++i) {
      CorpusHandle train_h = wrap(train[i]), val_h = wrap(val[i]);
      const std::string train_name = "fold_" + std::to_string(i) + ".train.csv";
      const std::string val_name = "fold_" + std::to_string(i) + ".val.csv";
      check(lp_corpus_save(train[i], (out / train_name).string().c_str(), "csv"));
      check(lp_corpus_save(val[i], (out / val_name).string().c_str(), "csv"));
      manifest.add_output(out, train_name);
      manifest.add_output(out, val_name);
    }
    manifest.set("folds", folds);
  } else {
    const std::vector<double> fractions =
        parse_grid(fractions_text.empty() ? "0.8,0.2" : fractions_text);
    std::vector<lp_corpus*> parts(fractions.size(), nullptr);
    check(lp_corpus_split(corpus.get(), fractions.data(), fractions.size(), strata.c_str(), seed,
                          parts.data()));
    for (size_t i = 0; i < parts.size(); ++i) {
      CorpusHandle part = wrap(parts[i]);
      const std::string name = "part_" + std::to_string(i) + ".csv";
      check(lp_corpus_save(parts[i], (out / name).string().c_str(), "csv"));
      manifest.add_output(out, name);
    }
    manifest.set("fractions", fractions);
  }
  manifest.set("strata", strata);
  manifest.set("split_seed", seed);
  manifest.write(out);
  return 0;
}

int cmd_train_ml(const GlobalOptions& opts, const std::string& train_path,
                 const std::string& val_path) {
  ManifestWriter manifest(opts, "train-ml");
  manifest.add_input("train", train_path);
  manifest.add_input("val", val_path);
  const fs::path out = ensure_out_dir(opts);

  CorpusHandle train = load_corpus_arg(train_path);
  CorpusHandle val = load_corpus_arg(val_path);
  const json cfg = effective_config(opts);

  lp_checkpoint* ckpt = nullptr;
  char* history = nullptr;
  check(lp_train_multilingual(train.get(), val.get(), cfg.dump().c_str(), &ckpt, &history));
  CheckpointHandle ckpt_h = wrap(ckpt);
  const std::string history_text = take_string(history);

  check(lp_checkpoint_save(ckpt, (out / "ml.ckpt").string().c_str()));
  check(lp_write_file_atomic((out / "history.json").string().c_str(), history_text.c_str()));

  char* meta = nullptr;
  check(lp_checkpoint_meta_json(ckpt, &meta));
  manifest.set("checkpoint_meta", json::parse(take_string(meta)));
  manifest.set("config", cfg);
  manifest.add_output(out, "ml.ckpt");
  manifest.add_output(out, "history.json");
  manifest.write(out);
  info(opts, "wrote " + (out / "ml.ckpt").string());
  return 0;
}

int cmd_finetune(const GlobalOptions& opts, const std::string& ml_path,
                 const std::string& language, const std::string& train_path,
                 const std::string& val_path) {
  ManifestWriter manifest(opts, "finetune");
  manifest.add_input("ml", ml_path);
  manifest.add_input("train", train_path);
  manifest.add_input("val", val_path);
  const fs::path out = ensure_out_dir(opts);

  CheckpointHandle ml = load_checkpoint_arg(ml_path);
  CorpusHandle train_all = load_corpus_arg(train_path);
  CorpusHandle val_all = load_corpus_arg(val_path);
  lp_corpus *train_l = nullptr, *val_l = nullptr;
  check(lp_corpus_filter_language(train_all.get(), language.c_str(), &train_l));
  CorpusHandle train_h = wrap(train_l);
  check(lp_corpus_filter_language(val_all.get(), language.c_str(), &val_l));
  CorpusHandle val_h = wrap(val_l);

  const json cfg = effective_config(opts);
  lp_checkpoint* ckpt = nullptr;
  char* history = nullptr;
  check(lp_finetune(ml.get(), language.c_str(), train_l, val_l, cfg.dump().c_str(), &ckpt,
                    &history));
  CheckpointHandle ckpt_h = wrap(ckpt);
  const std::string history_text = take_string(history);

  const std::string ckpt_name = language + ".ls.ckpt";
  check(lp_checkpoint_save(ckpt, (out / ckpt_name).string().c_str()));
  check(lp_write_file_atomic((out / "history.json").string().c_str(), history_text.c_str()));

  manifest.set("language", language);
  manifest.set("config", cfg);
  manifest.add_output(out, ckpt_name);
  manifest.add_output(out, "history.json");
  manifest.write(out);
  info(opts, "wrote " + (out / ckpt_name).string());
  return 0;
}

int cmd_sweep(const GlobalOptions& opts, const std::string& ls_path, const std::string& ml_path,
              const std::string& val_path, const std::string& grid_text,
              const std::string& language) {
  ManifestWriter manifest(opts, "sweep");
  manifest.add_input("ls", ls_path);
  manifest.add_input("ml", ml_path);
  manifest.add_input("val", val_path);
  const fs::path out = ensure_out_dir(opts);

  CheckpointHandle ls = load_checkpoint_arg(ls_path);
  CheckpointHandle ml = load_checkpoint_arg(ml_path);
  CorpusHandle val = load_corpus_arg(val_path);
  CorpusHandle val_filtered = wrap(static_cast<lp_corpus*>(nullptr));
  lp_corpus* val_ptr = val.get();
  if (!language.empty()) {
    lp_corpus* filtered = nullptr;
    check(lp_corpus_filter_language(val.get(), language.c_str(), &filtered));
    val_filtered = wrap(filtered);
    val_ptr = filtered;
  }

  json cfg = effective_config(opts);
  if (!grid_text.empty()) cfg["alpha_grid"] = parse_grid(grid_text);

  char* sweep_json = nullptr;
  check(lp_alpha_sweep(ls.get(), ml.get(), val_ptr, cfg.dump().c_str(), &sweep_json, nullptr));
  const json sweep = json::parse(take_string(sweep_json));

  std::string csv = "alpha,val_f1\n";
  char buf[80];
  for (const auto& point : sweep.at("grid")) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.6f\n", point.at("alpha").get<double>(),
                  point.at("val_f1").get<double>());
    csv += buf;
  }
  check(lp_write_file_atomic((out / "sweep.csv").string().c_str(), csv.c_str()));
  check(lp_write_file_atomic((out / "sweep.json").string().c_str(), sweep.dump(2).c_str()));

  manifest.set("chosen_alpha", sweep.at("chosen_alpha"));
  manifest.add_output(out, "sweep.csv");
  manifest.add_output(out, "sweep.json");
  manifest.write(out);
  info(opts, "chosen alpha: " + sweep.at("chosen_alpha").dump());
  return 0;
}

int cmd_run(const GlobalOptions& opts, const std::string& train_path,
            const std::string& val_path) {
  ManifestWriter manifest(opts, "run");
  manifest.add_input("train", train_path);
  manifest.add_input("val", val_path);
  const fs::path out = ensure_out_dir(opts);

  CorpusHandle train = load_corpus_arg(train_path);
  CorpusHandle val = load_corpus_arg(val_path);
  const json cfg = effective_config(opts);
  check(lp_run(train.get(), val.get(), cfg.dump().c_str(), out.string().c_str()));
  manifest.write(out);  // merges into the run manifest

  if (!opts.quiet) {
    lp_model* model = nullptr;
    check(lp_model_load(out.string().c_str(), &model));
    char* info_json = nullptr;
    const lp_status s = lp_model_info_json(model, &info_json);
    lp_model_free(model);
    check(s);
    const json model_info = json::parse(take_string(info_json));
    for (const auto& [lang, alpha] : model_info.at("chosen_alpha").items()) {
      std::cout << lang << ": alpha=" << alpha.dump() << "\n";
    }
  }
  return 0;
}

int cmd_ensemble(const GlobalOptions& opts, const std::string& corpus_path, size_t k) {
  ManifestWriter manifest(opts, "ensemble");
  manifest.add_input("corpus", corpus_path);
  const fs::path out = ensure_out_dir(opts);

  CorpusHandle corpus = load_corpus_arg(corpus_path);
  const json cfg = effective_config(opts);
  check(lp_ensemble_build(corpus.get(), cfg.dump().c_str(), k, out.string().c_str()));

  manifest.set("k", k);
  manifest.set("config", cfg);
  manifest.add_output(out, "ensemble_manifest.json");
  manifest.write(out);
  info(opts, "wrote ensemble of " + std::to_string(k) + " to " + out.string());
  return 0;
}

// Either a run-directory model or an ensemble directory.
class PredictTarget {
 public:
  PredictTarget(const std::string& model_dir, const std::string& ensemble_dir) {
    if (model_dir.empty() == ensemble_dir.empty()) {
      std::cerr << "error: give exactly one of --model or --ensemble\n";
      throw CliError{1};
    }
    if (!model_dir.empty()) {
      check(lp_model_load(model_dir.c_str(), &model_));
    } else {
      check(lp_ensemble_load(ensemble_dir.c_str(), &ensemble_));
    }
  }
  ~PredictTarget() {
    if (model_) lp_model_free(model_);
    if (ensemble_) lp_ensemble_free(ensemble_);
  }
  PredictTarget(const PredictTarget&) = delete;
  PredictTarget& operator=(const PredictTarget&) = delete;

  bool is_model() const { return model_ != nullptr; }
  lp_model* model() const { return model_; }
  lp_ensemble* ensemble() const { return ensemble_; }

  std::string predict_line(const std::string& text, const std::string& language) const {
    uint32_t label = 0;
    size_t n = 0;
    if (model_) {
      check(lp_model_predict(model_, text.c_str(), language.c_str(), &label, nullptr, 0, &n));
    } else {
      check(lp_ensemble_predict(ensemble_, text.c_str(), language.c_str(), &label, nullptr, 0, &n));
    }
    std::vector<double> probs(n);
    char* name = nullptr;
    if (model_) {
      check(lp_model_predict(model_, text.c_str(), language.c_str(), &label, probs.data(), n, &n));
      check(lp_model_label_name(model_, label, &name));
    } else {
      check(lp_ensemble_predict(ensemble_, text.c_str(), language.c_str(), &label, probs.data(),
                                n, &n));
      check(lp_ensemble_label_name(ensemble_, label, &name));
    }
    return take_string(name) + "\t" + format_probs(probs);
  }

 private:
  lp_model* model_ = nullptr;
  lp_ensemble* ensemble_ = nullptr;
};

int cmd_predict(const GlobalOptions& opts, const std::string& model_dir,
                const std::string& ensemble_dir, const std::string& text,
                const std::string& language, const std::string& batch_path) {
  const PredictTarget target(model_dir, ensemble_dir);

  if (!batch_path.empty()) {
    ManifestWriter manifest(opts, "predict");
    CorpusHandle batch = load_corpus_arg(batch_path);
    size_t n = 0;
    check(lp_corpus_size(batch.get(), &n));
    std::string lines;
    for (size_t i = 0; i < n; ++i) {
      char *row_text = nullptr, *row_language = nullptr;
      check(lp_corpus_example(batch.get(), i, &row_text, nullptr, &row_language));
      const std::string t = take_string(row_text);
      const std::string l = take_string(row_language);
      lines += target.predict_line(t, l) + "\n";
    }
    if (opts.out_dir.empty()) {
      std::cout << lines;
    } else {
      const fs::path out = ensure_out_dir(opts);
      manifest.add_input("batch", batch_path);
      check(lp_write_file_atomic((out / "predictions.tsv").string().c_str(), lines.c_str()));
      manifest.add_output(out, "predictions.tsv");
      manifest.write(out);
    }
    return 0;
  }

  if (text.empty() || language.empty()) {
    std::cerr << "error: predict needs --text with --language, or --batch\n";
    throw CliError{1};
  }
  std::cout << target.predict_line(text, language) << "\n";
  return 0;
}

int cmd_eval(const GlobalOptions& opts, const std::string& model_dir,
             const std::string& ensemble_dir, const std::string& corpus_path) {
  ManifestWriter manifest(opts, "eval");
  manifest.add_input("corpus", corpus_path);
  const fs::path out = ensure_out_dir(opts);

  const PredictTarget target(model_dir, ensemble_dir);
  CorpusHandle corpus = load_corpus_arg(corpus_path);

  char* report_json = nullptr;
  if (target.is_model()) {
    check(lp_evaluate_model(target.model(), corpus.get(), &report_json));
  } else {
    check(lp_evaluate_ensemble(target.ensemble(), corpus.get(), &report_json));
  }
  const std::string report_text = take_string(report_json);
  check(lp_write_file_atomic((out / "report.json").string().c_str(), report_text.c_str()));

  if (!opts.quiet) {
    // reported scores use three decimals
    const json report = json::parse(report_text);
    char buf[128];
    for (const auto& [language, ev] : report.at("per_language").items()) {
      std::snprintf(buf, sizeof(buf), "%s: weighted_f1=%.3f macro_f1=%.3f", language.c_str(),
                    ev.at("weighted_f1").get<double>(), ev.at("macro_f1").get<double>());
      std::cout << buf << "\n";
    }
    std::snprintf(buf, sizeof(buf), "overall: weighted_f1=%.3f macro_f1=%.3f",
                  report.at("overall").at("weighted_f1").get<double>(),
                  report.at("overall").at("macro_f1").get<double>());
    std::cout << buf << "\n";
  }
  manifest.add_output(out, "report.json");
  manifest.write(out);
  return 0;
}

int cmd_experiment(const GlobalOptions& opts, const std::string& protocol,
                   const std::string& spec_path, size_t runs) {
  ManifestWriter manifest(opts, protocol);
  manifest.add_input("spec", spec_path);
  const fs::path out = ensure_out_dir(opts);

  json spec = parse_json_file(spec_path, "experiment spec");
  spec["protocol"] = protocol;
  if (runs > 0) spec["runs"] = runs;
  if (opts.seed) spec["seed"] = *opts.seed;
  if (!spec.contains("pipeline")) spec["pipeline"] = json::object();
  if (opts.threads_given || !spec["pipeline"].contains("threads")) {
    spec["pipeline"]["threads"] = opts.threads;
  }

  check(lp_run_experiment(spec.dump().c_str(), out.string().c_str()));
  manifest.write(out);
  if (!opts.quiet) std::cout << read_file((out / "comparison.csv").string());
  return 0;
}

int cmd_report(const GlobalOptions& opts, const std::string& experiment_dir,
               const std::vector<std::string>& inputs) {
  ManifestWriter manifest(opts, "report");
  const fs::path out = ensure_out_dir(opts);

  if (!experiment_dir.empty()) {
    check(lp_aggregate_experiment(experiment_dir.c_str(), out.string().c_str()));
    manifest.set("experiment_dir", experiment_dir);
    manifest.add_output(out, "comparison.csv");
    manifest.add_output(out, "alpha_summary.csv");
    manifest.add_output(out, "curve_means.csv");
    if (!opts.quiet) std::cout << read_file((out / "alpha_summary.csv").string());
  } else if (!inputs.empty()) {
    std::vector<const char*> paths;
    for (const std::string& path : inputs) {
      manifest.add_input(path, path);
      paths.push_back(path.c_str());
    }
    check(lp_aggregate_eval_reports(paths.data(), paths.size(), out.string().c_str()));
    manifest.add_output(out, "report_summary.csv");
    if (!opts.quiet) std::cout << read_file((out / "report_summary.csv").string());
  } else {
    std::cerr << "error: report needs --from-experiment or --inputs\n";
    throw CliError{1};
  }
  manifest.write(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOptions opts;
  for (int i = 0; i < argc; ++i) opts.argv.push_back(argv[i]);

  CLI::App app{"langpaint: multilingual training, per-language weight merging, evaluation"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  uint64_t seed_value = 0;
  bool seed_given = false;
  app.add_flag_callback("--version", [] {
    std::cout << "langpaint " << lp_version() << " (checkpoint format "
              << lp_checkpoint_format_version() << ")\n";
    std::exit(0);
  });
  app.add_option("--seed", seed_value, "master seed; all randomness derives from it")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--config", opts.config_path, "pipeline config JSON file");
  app.add_option("--out", opts.out_dir, "output directory");
  app.add_option("--threads", opts.threads, "worker threads (outputs are thread-count invariant)")
      ->check(CLI::PositiveNumber)
      ->each([&](const std::string&) { opts.threads_given = true; });
  app.add_flag("--quiet", opts.quiet, "suppress informational output");

  std::string spec_path;
  CLI::App* gen = app.add_subcommand("gen-data", "generate synthetic corpora from a spec");
  gen->add_option("--spec", spec_path, "synth spec JSON")->required();

  std::string clean_train, clean_dev;
  CLI::App* clean = app.add_subcommand("clean", "remove train/dev duplicate texts");
  clean->add_option("--train", clean_train)->required();
  clean->add_option("--dev", clean_dev)->required();

  std::string split_in, split_fractions, split_strata = "language-label";
  size_t split_folds = 0;
  CLI::App* split = app.add_subcommand("split", "stratified split or k-fold partition");
  split->add_option("--in", split_in)->required();
  split->add_option("--fractions", split_fractions, "comma list, e.g. 0.8,0.1,0.1");
  split->add_option("--folds", split_folds, "fold count (overrides --fractions)");
  split->add_option("--strata", split_strata, "label | language-label");

  std::string tm_train, tm_val;
  CLI::App* train_ml = app.add_subcommand("train-ml", "train the multilingual base model");
  train_ml->add_option("--train", tm_train)->required();
  train_ml->add_option("--val", tm_val)->required();

  std::string ft_ml, ft_language, ft_train, ft_val;
  CLI::App* finetune = app.add_subcommand("finetune", "fine-tune one language from the base");
  finetune->add_option("--ml", ft_ml)->required();
  finetune->add_option("--language", ft_language)->required();
  finetune->add_option("--train", ft_train)->required();
  finetune->add_option("--val", ft_val)->required();

  std::string sw_ls, sw_ml, sw_val, sw_grid, sw_language;
  CLI::App* sweep = app.add_subcommand("sweep", "alpha grid search between two checkpoints");
  sweep->add_option("--ls", sw_ls)->required();
  sweep->add_option("--ml", sw_ml)->required();
  sweep->add_option("--val", sw_val)->required();
  sweep->add_option("--grid", sw_grid, "start:end:step or comma list (default 0:1:0.1)");
  sweep->add_option("--language", sw_language, "restrict validation corpus to one language");

  std::string run_train, run_val;
  CLI::App* run = app.add_subcommand("run", "full pipeline: base, fine-tunes, sweeps, merges");
  run->add_option("--train", run_train)->required();
  run->add_option("--val", run_val)->required();

  std::string ens_corpus;
  size_t ens_k = 5;
  CLI::App* ensemble = app.add_subcommand("ensemble", "k-fold ensemble of pipeline runs");
  ensemble->add_option("--corpus", ens_corpus)->required();
  ensemble->add_option("--k", ens_k, "fold count (default 5)");

  std::string pr_model, pr_ensemble, pr_text, pr_language, pr_batch;
  CLI::App* predict = app.add_subcommand("predict", "predict labels for a text or a batch file");
  predict->add_option("--model", pr_model, "run directory");
  predict->add_option("--ensemble", pr_ensemble, "ensemble directory");
  predict->add_option("--text", pr_text);
  predict->add_option("--language", pr_language);
  predict->add_option("--batch", pr_batch, "corpus file to predict row by row");

  std::string ev_model, ev_ensemble, ev_corpus;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a model or ensemble on a corpus");
  eval_cmd->add_option("--model", ev_model, "run directory");
  eval_cmd->add_option("--ensemble", ev_ensemble, "ensemble directory");
  eval_cmd->add_option("--corpus", ev_corpus)->required();

  std::string e1_spec, e2_spec;
  size_t e1_runs = 0, e2_runs = 0;
  CLI::App* exp1 = app.add_subcommand("exp1", "resampled train-val splits vs a fixed test set");
  exp1->add_option("--spec", e1_spec)->required();
  exp1->add_option("--runs", e1_runs);
  CLI::App* exp2 = app.add_subcommand("exp2", "resampled 80-10-10 splits with optional shift");
  exp2->add_option("--spec", e2_spec)->required();
  exp2->add_option("--runs", e2_runs);

  std::string rp_experiment;
  std::vector<std::string> rp_inputs;
  CLI::App* report = app.add_subcommand("report", "aggregate experiment outputs or eval reports");
  report->add_option("--from-experiment", rp_experiment, "experiment output directory");
  report->add_option("--inputs", rp_inputs, "eval report JSON files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  }
  if (seed_given) opts.seed = seed_value;

  try {
    if (gen->parsed()) return cmd_gen_data(opts, spec_path);
    if (clean->parsed()) return cmd_clean(opts, clean_train, clean_dev);
    if (split->parsed())
      return cmd_split(opts, split_in, split_fractions, split_folds, split_strata);
    if (train_ml->parsed()) return cmd_train_ml(opts, tm_train, tm_val);
    if (finetune->parsed()) return cmd_finetune(opts, ft_ml, ft_language, ft_train, ft_val);
    if (sweep->parsed()) return cmd_sweep(opts, sw_ls, sw_ml, sw_val, sw_grid, sw_language);
    if (run->parsed()) return cmd_run(opts, run_train, run_val);
    if (ensemble->parsed()) return cmd_ensemble(opts, ens_corpus, ens_k);
    if (predict->parsed())
      return cmd_predict(opts, pr_model, pr_ensemble, pr_text, pr_language, pr_batch);
    if (eval_cmd->parsed()) return cmd_eval(opts, ev_model, ev_ensemble, ev_corpus);
    if (exp1->parsed()) return cmd_experiment(opts, "exp1", e1_spec, e1_runs);
    if (exp2->parsed()) return cmd_experiment(opts, "exp2", e2_spec, e2_runs);
    if (report->parsed()) return cmd_report(opts, rp_experiment, rp_inputs);
    std::cerr << app.help() << std::flush;
    return 1;
  } catch (const CliError& e) {
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
