// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "experiments.hpp"
#include "testutil.hpp"

using namespace langpaint;
using testutil::TempDir;

namespace {

// Small, fast experiment spec over synthetic data.
ExperimentSpec tiny_spec(const std::string& protocol, size_t runs, bool shifted) {
  SynthSpec synth;
  synth.num_classes = 2;
  synth.seed = 1;
  synth.label_noise = 0.05;
  synth.tokens_min = 4;
  synth.tokens_max = 9;
  synth.shared_signal_tokens = 12;
  synth.language_signal_tokens = 12;
  synth.language_noise_tokens = 30;
  for (const char* name : {"eng", "hin"}) {
    SynthLanguage lang;
    lang.name = name;
    lang.n_train = 90;
    lang.n_test = 30;
    lang.class_priors_train = {0.5, 0.5};
    lang.class_priors_test = shifted ? std::vector<double>{0.3, 0.7}
                                     : std::vector<double>{0.5, 0.5};
    lang.exclusive_signal_strength = 0.3;
    lang.shared_signal_strength = 0.6;
    synth.languages.push_back(std::move(lang));
  }

  ExperimentSpec spec;
  spec.protocol = protocol;
  spec.runs = runs;
  spec.seed = 5;
  spec.synth = synth;
  spec.pipeline.model.hash_dim = 64;
  spec.pipeline.train.learning_rate = 0.05;
  spec.pipeline.train.max_epochs = 8;
  spec.pipeline.train.patience = 2;
  return spec;
}

size_t line_count(const std::string& text) {
  return size_t(std::count(text.begin(), text.end(), '\n'));
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TEST_CASE("experiment specs validate and round-trip") {
  ExperimentSpec spec = tiny_spec("exp1", 2, false);
  spec.validate();
  CHECK(spec.effective_runs() == 2);

  ExperimentSpec defaults = tiny_spec("exp1", 0, false);
  CHECK(defaults.effective_runs() == 5);
  defaults.protocol = "exp2";
  CHECK(defaults.effective_runs() == 10);

  const ExperimentSpec back = ExperimentSpec::from_json_text(spec.to_json_text());
  CHECK(back.protocol == "exp1");
  CHECK(back.runs == 2);
  CHECK(back.synth.has_value());
  CHECK(back.synth->languages.size() == 2);

  ExperimentSpec bad = spec;
  bad.protocol = "exp3";
  CHECK_THROWS_AS(bad.validate(), Error);
  ExperimentSpec neither = spec;
  neither.synth.reset();
  CHECK_THROWS_AS(neither.validate(), Error);
  CHECK_THROWS_AS(ExperimentSpec::from_json_text("{}"), Error);
}

TEST_CASE("exp1 emits the documented files with the right shapes") {
  TempDir dir("exp1");
  const ExperimentSpec spec = tiny_spec("exp1", 2, false);
  const ExperimentResult result = run_experiment(spec, dir.path());

  CHECK(result.languages == std::vector<std::string>{"eng", "hin"});
  CHECK(result.methods == std::vector<std::string>{"L-S", "M-L", "LangPAINT"});

  // sweep_curves.csv: runs x languages x |grid| rows
  const std::string curves = testutil::slurp(dir.path() / "sweep_curves.csv");
  CHECK(line_count(curves) == 1 + 2 * 2 * 11);
  CHECK(curves.rfind("run,language,alpha,val_f1\n", 0) == 0);

  // selected_alphas.csv: runs x languages rows
  CHECK(line_count(testutil::slurp(dir.path() / "selected_alphas.csv")) == 1 + 2 * 2);

  // alpha_summary.csv: one row per language
  const auto alpha_rows = csv_rows(testutil::slurp(dir.path() / "alpha_summary.csv"));
  REQUIRE(alpha_rows.size() == 2);
  CHECK(alpha_rows[0][0] == "eng");
  CHECK(alpha_rows[1][0] == "hin");
  for (const auto& row : alpha_rows) CHECK(row[2] == "2");

  // comparison.csv: one row per (language, method)
  const auto comparison = csv_rows(testutil::slurp(dir.path() / "comparison.csv"));
  CHECK(comparison.size() == 2 * 3);

  // runs.csv holds the per-run cells; averaged cells must be their means
  const auto runs = csv_rows(testutil::slurp(dir.path() / "runs.csv"));
  CHECK(runs.size() == 2 * 2 * 3);
  std::map<std::string, std::vector<double>> cells;
  for (const auto& row : runs) cells[row[1] + "|" + row[2]].push_back(std::stod(row[3]));
  for (const auto& row : comparison) {
    const auto& values = cells.at(row[0] + "|" + row[1]);
    const double mean = std::stod(row[2]);
    double expected = 0.0;
    for (double v : values) expected += v;
    expected /= double(values.size());
    CHECK(mean == doctest::Approx(expected).epsilon(1e-6));
    CHECK(std::stoul(row[4]) == values.size());
  }

  // per-run artifacts exist
  CHECK(std::filesystem::exists(dir.path() / "run_0" / "manifest.json"));
  CHECK(std::filesystem::exists(dir.path() / "run_1" / "ml.ckpt"));
  CHECK(std::filesystem::exists(dir.path() / "manifest.json"));

  // chosen alphas recorded per run per language
  CHECK(result.chosen_alphas.at("eng").size() == 2);
}

TEST_CASE("exp1 reruns byte-identically and respects the alpha grid endpoints") {
  TempDir dir_a("exp1a"), dir_b("exp1b");
  const ExperimentSpec spec = tiny_spec("exp1", 2, false);
  run_experiment(spec, dir_a.path());
  run_experiment(spec, dir_b.path());
  for (const char* file :
       {"runs.csv", "comparison.csv", "sweep_curves.csv", "selected_alphas.csv",
        "alpha_summary.csv"}) {
    CHECK(testutil::slurp(dir_a.path() / file) == testutil::slurp(dir_b.path() / file));
  }

  const ExperimentResult result = run_experiment(spec, dir_a.path());
  for (const auto& [language, alphas] : result.chosen_alphas) {
    CHECK(alphas.size() == 2);
    for (double alpha : alphas) {
      CHECK(alpha >= 0.0);
      CHECK(alpha <= 1.0);
    }
  }
}

TEST_CASE("exp2 resamples per run and emits the comparison table") {
  TempDir dir("exp2");
  const ExperimentSpec spec = tiny_spec("exp2", 3, true);
  const ExperimentResult result = run_experiment(spec, dir.path());

  const auto comparison = csv_rows(testutil::slurp(dir.path() / "comparison.csv"));
  CHECK(comparison.size() == 2 * 3);  // one row per (language, method)
  for (const auto& row : comparison) {
    CHECK(std::stod(row[2]) >= 0.0);
    CHECK(std::stod(row[2]) <= 1.0);
    CHECK(row[4] == "3");
  }
  for (const auto& [language, methods] : result.cells) {
    for (const auto& [method, values] : methods) {
      CHECK(values.size() == 3);
    }
  }

  TempDir dir_b("exp2b");
  run_experiment(spec, dir_b.path());
  CHECK(testutil::slurp(dir.path() / "runs.csv") == testutil::slurp(dir_b.path() / "runs.csv"));
}

TEST_CASE("the L-S column can come from scratch-initialized models") {
  TempDir endpoint_dir("lsend"), scratch_dir("lsscratch");
  ExperimentSpec spec = tiny_spec("exp1", 1, false);
  run_experiment(spec, endpoint_dir.path());
  spec.ls_from_scratch = true;
  const ExperimentSpec parsed = ExperimentSpec::from_json_text(spec.to_json_text());
  CHECK(parsed.ls_from_scratch);
  run_experiment(parsed, scratch_dir.path());

  const auto endpoint_rows = csv_rows(testutil::slurp(endpoint_dir.path() / "runs.csv"));
  const auto scratch_rows = csv_rows(testutil::slurp(scratch_dir.path() / "runs.csv"));
  REQUIRE(endpoint_rows.size() == scratch_rows.size());
  bool ls_differs = false;
  for (size_t i = 0; i < endpoint_rows.size(); ++i) {
    if (endpoint_rows[i][2] == "L-S") {
      ls_differs |= endpoint_rows[i][3] != scratch_rows[i][3];
    } else {
      // the other columns share the same training run and must not move
      CHECK(endpoint_rows[i][3] == scratch_rows[i][3]);
    }
  }
  CHECK(ls_differs);
}

TEST_CASE("report aggregation reproduces experiment summaries from run artifacts") {
  TempDir exp_dir("exp_for_report"), report_dir("report");
  const ExperimentSpec spec = tiny_spec("exp1", 2, false);
  run_experiment(spec, exp_dir.path());
  aggregate_experiment_dir(exp_dir.path(), report_dir.path());

  CHECK(testutil::slurp(report_dir.path() / "comparison.csv") ==
        testutil::slurp(exp_dir.path() / "comparison.csv"));
  CHECK(testutil::slurp(report_dir.path() / "alpha_summary.csv") ==
        testutil::slurp(exp_dir.path() / "alpha_summary.csv"));

  // curve means: one row per (language, alpha)
  const auto curve_rows = csv_rows(testutil::slurp(report_dir.path() / "curve_means.csv"));
  CHECK(curve_rows.size() == 2 * 11);
  for (const auto& row : curve_rows) CHECK(row[3] == "2");
}

TEST_CASE("eval report aggregation emits mean and std per language") {
  TempDir dir("evalagg");
  EvalReport a, b;
  a.label_names = b.label_names = {"x", "y"};
  a.per_language["eng"].weighted_f1 = 0.9;
  a.overall.weighted_f1 = 0.9;
  b.per_language["eng"].weighted_f1 = 0.8;
  b.overall.weighted_f1 = 0.8;
  testutil::spit(dir.path() / "a.json", a.to_json_text());
  testutil::spit(dir.path() / "b.json", b.to_json_text());

  aggregate_eval_reports({dir.path() / "a.json", dir.path() / "b.json"}, dir.path());
  const auto rows = csv_rows(testutil::slurp(dir.path() / "report_summary.csv"));
  bool found = false;
  for (const auto& row : rows) {
    if (row[0] == "eng" && row[1] == "weighted_f1") {
      found = true;
      CHECK(std::stod(row[2]) == doctest::Approx(0.85));
      CHECK(std::stod(row[3]) == doctest::Approx(0.0707).epsilon(1e-2));
      CHECK(row[4] == "2");
    }
  }
  CHECK(found);
}

TEST_CASE("experiments accept corpus files instead of a synth spec") {
  TempDir dir("corpusmode");
  ExperimentSpec gen = tiny_spec("exp1", 1, false);
  const SynthCorpora corpora = generate(*gen.synth);
  save_corpus(corpora.train, dir.path() / "train.csv", CorpusFormat::Csv);
  save_corpus(corpora.test, dir.path() / "dev.csv", CorpusFormat::Csv);
  save_corpus(corpora.test, dir.path() / "test.csv", CorpusFormat::Csv);

  ExperimentSpec spec;
  spec.protocol = "exp1";
  spec.runs = 1;
  spec.seed = 3;
  spec.train_path = (dir.path() / "train.csv").string();
  spec.dev_path = (dir.path() / "dev.csv").string();
  spec.test_path = (dir.path() / "test.csv").string();
  spec.pipeline = gen.pipeline;

  const ExperimentResult r1 = run_experiment(spec, dir.path() / "exp1");
  CHECK(r1.languages == std::vector<std::string>{"eng", "hin"});
  CHECK(r1.cells.at("eng").at("LangPAINT").size() == 1);

  spec.protocol = "exp2";
  spec.runs = 2;
  const ExperimentResult r2 = run_experiment(spec, dir.path() / "exp2");
  CHECK(r2.cells.at("hin").at("M-L").size() == 2);
  const auto rows = csv_rows(testutil::slurp(dir.path() / "exp2" / "comparison.csv"));
  CHECK(rows.size() == 2 * 3);
}

TEST_CASE("zero-shift control keeps the three methods within a tight band") {
  // equal priors and a strong shared signal: no method should stand apart
  TempDir dir("noshift");
  ExperimentSpec spec = tiny_spec("exp2", 3, false);
  for (SynthLanguage& lang : spec.synth->languages) {
    lang.shared_signal_strength = 0.8;
    lang.exclusive_signal_strength = 0.1;
  }
  spec.synth->label_noise = 0.0;
  const ExperimentResult result = run_experiment(spec, dir.path());

  for (const auto& [language, methods] : result.cells) {
    std::vector<double> means;
    for (const auto& [method, values] : methods) {
      means.push_back(mean_of(values));
    }
    const double lo = *std::min_element(means.begin(), means.end());
    const double hi = *std::max_element(means.begin(), means.end());
    CHECK(hi - lo <= 0.05);
  }
}
