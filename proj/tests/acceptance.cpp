// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one criterion per function, one PASS/FAIL line each,
// exit code = number of failures. Criterion 6 drives the installed CLI;
// everything else exercises the core directly.
//
//   acceptance --cli <path-to-cli> --presets <dir> --expected <json>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "data.hpp"
#include "ensemble.hpp"
#include "experiments.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "pipeline.hpp"
#include "rng.hpp"
#include "support.hpp"
#include "tensorstore.hpp"
#include "testutil.hpp"

using namespace langpaint;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct Context {
  std::string cli;
  fs::path presets;
  fs::path expected;
  fs::path scratch;
};

int run_cli(const Context& ctx, const std::string& args) {
  const std::string log = (ctx.scratch / "cli.log").string();
  const std::string cmd = ctx.cli + " " + args + " >> " + log + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

// ---- criterion 1 -----------------------------------------------------------

bool interpolation_exactness(const Context&, std::string& detail) {
  Rng rng = Rng::derive(1001, "acceptance-interp");
  for (int pair = 0; pair < 100; ++pair) {
    const size_t rows = 1 + rng.below(4);
    const size_t cols = 1 + rng.below(40);
    auto fill = [&](uint64_t) {
      std::vector<float> v(rows * cols);
      for (float& x : v) x = float(rng.next_double() * 4.0 - 2.0);
      return v;
    };
    Checkpoint a, b;
    a.add(Tensor("W", {rows, cols}, fill(0)));
    b.add(Tensor("W", {rows, cols}, fill(1)));

    const Checkpoint at1 = interpolate(a, b, 1.0);
    const Checkpoint at0 = interpolate(a, b, 0.0);
    for (size_t i = 0; i < rows * cols; ++i) {
      if (std::memcmp(&at1.tensor("W").data[i], &a.tensor("W").data[i], 4) != 0 ||
          std::memcmp(&at0.tensor("W").data[i], &b.tensor("W").data[i], 4) != 0) {
        detail = "endpoint not bitwise on pair " + std::to_string(pair);
        return false;
      }
    }

    for (double alpha : {0.5, 0.1, 0.3, 0.7, 0.9}) {
      const Checkpoint mid = interpolate(a, b, alpha);
      const float wa = float(alpha);
      const float wb = float(1.0 - alpha);
      for (size_t i = 0; i < rows * cols; ++i) {
        const float oracle = wa * a.tensor("W").data[i] + wb * b.tensor("W").data[i];
        if (std::memcmp(&mid.tensor("W").data[i], &oracle, 4) != 0) {
          detail = "midpoint differs from the scalar oracle at alpha " + std::to_string(alpha);
          return false;
        }
      }
    }
  }
  return true;
}

// ---- criterion 2 -----------------------------------------------------------

bool gradient_check(const Context&, std::string& detail) {
  for (uint64_t model_id = 0; model_id < 20; ++model_id) {
    Rng rng = Rng::derive(2000 + model_id, "acceptance-grad");
    ModelConfig cfg;
    cfg.hash_dim = 8 + rng.below(25);   // <= 32
    cfg.num_classes = 2 + rng.below(3); // <= 4
    cfg.seed = model_id + 1;
    Checkpoint ckpt = init_model(cfg);

    std::vector<std::pair<FeatureVector, uint32_t>> batch;
    const size_t batch_size = 2 + rng.below(6);
    for (size_t i = 0; i < batch_size; ++i) {
      std::string text;
      for (int t = 0; t < 3; ++t) text += "w" + std::to_string(rng.below(50)) + " ";
      batch.emplace_back(featurize(text, cfg), uint32_t(rng.below(cfg.num_classes)));
    }

    const LossGrad lg = loss_and_grad(ckpt, batch);
    const double h = 1e-3;
    for (const Tensor& t : ckpt.tensors()) {
      for (size_t i = 0; i < t.data.size(); ++i) {
        Checkpoint plus = ckpt, minus = ckpt;
        plus.tensor(t.name).data[i] = float(double(t.data[i]) + h);
        minus.tensor(t.name).data[i] = float(double(t.data[i]) - h);
        const double fd =
            (loss_and_grad(plus, batch).loss - loss_and_grad(minus, batch).loss) / (2.0 * h);
        const double analytic = lg.grad.tensor(t.name).data[i];
        if (fd == 0.0 && analytic == 0.0) continue;
        const double rel = std::abs(fd - analytic) / std::max(std::abs(fd) + std::abs(analytic), 1e-8);
        if (rel >= 1e-4) {
          detail = "model " + std::to_string(model_id) + " tensor " + t.name + "[" +
                   std::to_string(i) + "]: rel error " + std::to_string(rel);
          return false;
        }
      }
    }
  }
  return true;
}

// ---- criterion 3 -----------------------------------------------------------

bool metric_oracle(const Context&, std::string& detail) {
  const size_t c = 3;
  for (size_t n = 0; n <= 5; ++n) {
    size_t combos = 1;
    for (size_t i = 0; i < n; ++i) combos *= c;
    std::vector<uint32_t> golds(n), preds(n);
    for (size_t g = 0; g < combos; ++g) {
      size_t gv = g;
      for (size_t i = 0; i < n; ++i) {
        golds[i] = uint32_t(gv % c);
        gv /= c;
      }
      for (size_t p = 0; p < combos; ++p) {
        size_t pv = p;
        for (size_t i = 0; i < n; ++i) {
          preds[i] = uint32_t(pv % c);
          pv /= c;
        }
        const F1Scores ours = f1_scores(confusion(golds, preds, c));
        const auto oracle = testutil::brute_force_f1(golds, preds, c);
        bool equal = ours.macro == oracle.macro && ours.weighted == oracle.weighted;
        for (size_t k = 0; k < c && equal; ++k) equal = ours.per_class[k] == oracle.per_class[k];
        if (!equal) {
          detail = "mismatch at n=" + std::to_string(n) + " case g=" + std::to_string(g) +
                   " p=" + std::to_string(p);
          return false;
        }
      }
    }
  }
  return true;
}

// ---- criterion 4 -----------------------------------------------------------

SynthSpec battery_synth(uint64_t seed) {
  SynthSpec synth;
  synth.num_classes = 2;
  synth.seed = seed;
  synth.label_noise = 0.08;
  synth.tokens_min = 4;
  synth.tokens_max = 10;
  synth.shared_signal_tokens = 15;
  synth.language_signal_tokens = 15;
  synth.language_noise_tokens = 40;
  for (const char* name : {"eng", "hin", "mal"}) {
    SynthLanguage lang;
    lang.name = name;
    lang.n_train = 150;
    lang.n_test = 40;
    lang.class_priors_train = {0.6, 0.4};
    lang.class_priors_test = {0.6, 0.4};
    lang.exclusive_signal_strength = 0.35;
    lang.shared_signal_strength = 0.45;
    synth.languages.push_back(std::move(lang));
  }
  return synth;
}

PipelineConfig battery_config(uint64_t seed) {
  PipelineConfig cfg;
  cfg.model.hash_dim = 256;
  cfg.train.learning_rate = 0.05;
  cfg.train.max_epochs = 15;
  cfg.train.patience = 3;
  cfg.seed = seed;
  return cfg;
}

bool sweep_dominance(const Context&, std::string& detail) {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const SynthCorpora corpora = generate(battery_synth(seed));
    const auto parts =
        stratified_split(corpora.train, {0.8, 0.2}, StrataKey::LanguageLabel, seed);
    const LangPaintModel model = run_langpaint(parts[0], parts[1], battery_config(seed));
    for (const auto& [language, arm] : model.per_language) {
      double chosen_f1 = -1.0;
      for (const SweepPoint& p : arm.sweep.grid) {
        if (p.alpha == arm.sweep.chosen_alpha) chosen_f1 = p.val_f1;
      }
      const double at_ml = arm.sweep.grid.front().val_f1;
      const double at_ls = arm.sweep.grid.back().val_f1;
      if (!(chosen_f1 >= at_ml && chosen_f1 >= at_ls)) {
        detail = "seed " + std::to_string(seed) + " language " + language +
                 ": chosen " + std::to_string(chosen_f1) + " vs endpoints " +
                 std::to_string(at_ml) + "/" + std::to_string(at_ls);
        return false;
      }
    }
  }
  return true;
}

// ---- criterion 5 -----------------------------------------------------------

std::multiset<std::string> corpus_multiset(const Corpus& corpus) {
  std::multiset<std::string> out;
  for (const Example& ex : corpus.examples()) {
    out.insert(ex.text + "\x1f" + std::to_string(ex.label) + "\x1f" + ex.language);
  }
  return out;
}

bool stratification_properties(const Context&, std::string& detail) {
  for (uint64_t trial = 0; trial < 50; ++trial) {
    Rng rng = Rng::derive(5000 + trial, "acceptance-strata");
    const size_t classes = 2 + rng.below(2);
    const size_t languages = 1 + rng.below(3);
    const size_t k = 2 + rng.below(4);

    std::vector<std::string> names;
    for (size_t c = 0; c < classes; ++c) names.push_back("c" + std::to_string(c));
    Corpus corpus(names, {});
    // every stratum gets at least k members, then random filler
    for (size_t l = 0; l < languages; ++l) {
      for (size_t c = 0; c < classes; ++c) {
        for (size_t i = 0; i < k; ++i) {
          corpus.add(Example{"seed" + std::to_string(l) + "_" + std::to_string(c) + "_" +
                                 std::to_string(i),
                             uint32_t(c), "lang" + std::to_string(l)});
        }
      }
    }
    const size_t filler = 30 + rng.below(100);
    for (size_t i = 0; i < filler; ++i) {
      corpus.add(Example{"t" + std::to_string(rng.below(40)), uint32_t(rng.below(classes)),
                         "lang" + std::to_string(rng.below(languages))});
    }

    std::map<std::string, size_t> stratum_sizes;
    for (const Example& ex : corpus.examples()) {
      stratum_sizes[ex.language + "\x1f" + names[ex.label]]++;
    }

    const FoldSet set =
        stratified_folds(corpus, k, 1.0 / double(k), StrataKey::LanguageLabel, trial);
    std::multiset<std::string> all_val;
    for (const Fold& fold : set.folds) {
      auto joined = corpus_multiset(fold.train);
      const auto val = corpus_multiset(fold.val);
      joined.insert(val.begin(), val.end());
      if (joined != corpus_multiset(corpus)) {
        detail = "fold does not partition the corpus on trial " + std::to_string(trial);
        return false;
      }
      all_val.insert(val.begin(), val.end());

      std::map<std::string, size_t> val_sizes;
      for (const Example& ex : fold.val.examples()) {
        val_sizes[ex.language + "\x1f" + names[ex.label]]++;
      }
      for (const auto& [stratum, size] : stratum_sizes) {
        const double expected = double(size) / double(k);
        if (std::abs(double(val_sizes[stratum]) - std::round(expected)) > 1.0) {
          detail = "stratum imbalance on trial " + std::to_string(trial);
          return false;
        }
      }
    }
    if (all_val != corpus_multiset(corpus)) {
      detail = "validation blocks do not cover the corpus on trial " + std::to_string(trial);
      return false;
    }

    // dedup idempotence with injected overlap
    Corpus dev(names, {});
    for (size_t i = 0; i < 20; ++i) {
      dev.add(Example{"t" + std::to_string(rng.below(40)), uint32_t(rng.below(classes)),
                      "lang0"});
    }
    const DedupResult once = dedup(corpus, dev);
    std::set<std::string> train_texts;
    for (const Example& ex : once.train.examples()) train_texts.insert(ex.text);
    for (const Example& ex : once.dev.examples()) {
      if (train_texts.count(ex.text)) {
        detail = "cross-split duplicate survived on trial " + std::to_string(trial);
        return false;
      }
    }
    const DedupResult twice = dedup(once.train, once.dev);
    if (twice.removed != 0 ||
        corpus_multiset(twice.train) != corpus_multiset(once.train) ||
        corpus_multiset(twice.dev) != corpus_multiset(once.dev)) {
      detail = "dedup not idempotent on trial " + std::to_string(trial);
      return false;
    }
  }
  return true;
}

// ---- criterion 6 -----------------------------------------------------------

bool cli_determinism(const Context& ctx, std::string& detail) {
  const fs::path work = ctx.scratch / "determinism";
  fs::create_directories(work);
  const std::string synth = (ctx.presets / "threelang_synth.json").string();
  const std::string config = (ctx.presets / "desk_config.json").string();

  auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };
  if (run_cli(ctx, "gen-data --spec '" + synth + "' --seed 1 --out " + q(work / "data") +
                       " --quiet") != 0) {
    detail = "gen-data failed";
    return false;
  }
  if (run_cli(ctx, "split --in " + q(work / "data" / "train.csv") +
                       " --fractions 0.8,0.2 --seed 1 --out " + q(work / "splits") +
                       " --quiet") != 0) {
    detail = "split failed";
    return false;
  }

  const std::string run_args = "run --train " + q(work / "splits" / "part_0.csv") + " --val " +
                               q(work / "splits" / "part_1.csv") + " --config '" + config +
                               "' --seed 1 --quiet";
  if (run_cli(ctx, run_args + " --threads 1 --out " + q(work / "run_a")) != 0 ||
      run_cli(ctx, run_args + " --threads 1 --out " + q(work / "run_b")) != 0 ||
      run_cli(ctx, run_args + " --threads 4 --out " + q(work / "run_c")) != 0) {
    detail = "run failed (see cli.log)";
    return false;
  }

  json manifests[3];
  const char* dirs[3] = {"run_a", "run_b", "run_c"};
  for (int i = 0; i < 3; ++i) {
    manifests[i] = json::parse(read_text_file(work / dirs[i] / "manifest.json"));
  }
  for (int i = 1; i < 3; ++i) {
    if (manifests[0].at("digests") != manifests[i].at("digests")) {
      detail = std::string("output digests differ between run_a and ") + dirs[i];
      return false;
    }
    if (manifests[0].at("chosen_alpha") != manifests[i].at("chosen_alpha")) {
      detail = std::string("chosen alphas differ between run_a and ") + dirs[i];
      return false;
    }
  }
  // checkpoint bytes themselves, not just recorded digests
  for (const char* file : {"ml.ckpt", "eng.ls.ckpt", "eng.merged.ckpt"}) {
    if (file_sha256(work / "run_a" / file) != file_sha256(work / "run_c" / file)) {
      detail = std::string(file) + " differs between thread counts";
      return false;
    }
  }
  return true;
}

// ---- criterion 7 -----------------------------------------------------------

bool shift_robustness(const Context& ctx, std::string& detail) {
  const ExperimentSpec spec =
      ExperimentSpec::from_json_text(read_text_file(ctx.presets / "shift_exp2.json"));
  const ExperimentResult result = run_experiment(spec, ctx.scratch / "shift_exp2");

  const json expected = json::parse(read_text_file(ctx.expected));
  const double tolerance = expected.at("tolerance").get<double>();

  double margin_sum = 0.0;
  size_t margin_count = 0;
  for (const auto& [language, methods] : result.cells) {
    const double ls = mean_of(methods.at("L-S"));
    const double ml = mean_of(methods.at("M-L"));
    const double lp = mean_of(methods.at("LangPAINT"));
    const double worse = std::min(ls, ml);
    if (lp + 1e-9 < worse) {
      detail = language + ": LangPAINT " + std::to_string(lp) + " below the worse baseline " +
               std::to_string(worse);
      return false;
    }
    margin_sum += lp - worse;
    ++margin_count;

    const json& pins = expected.at("languages").at(language);
    for (const auto& [method, value] :
         std::map<std::string, double>{{"L-S", ls}, {"M-L", ml}, {"LangPAINT", lp}}) {
      const double pinned = pins.at(method).get<double>();
      if (std::abs(value - pinned) > tolerance) {
        detail = language + " " + method + ": realized " + std::to_string(value) +
                 " vs pinned " + std::to_string(pinned);
        return false;
      }
    }
  }
  const double mean_margin = margin_sum / double(margin_count);
  if (mean_margin < 0.01) {
    detail = "mean margin over the worse baseline is " + std::to_string(mean_margin) +
             ", needs >= 0.01";
    return false;
  }
  const double pinned_margin = expected.at("mean_margin").get<double>();
  if (std::abs(mean_margin - pinned_margin) > tolerance) {
    detail = "mean margin " + std::to_string(mean_margin) + " vs pinned " +
             std::to_string(pinned_margin);
    return false;
  }
  return true;
}

// ---- criterion 8 -----------------------------------------------------------

bool figure_shaped_output(const Context& ctx, std::string& detail) {
  const ExperimentSpec spec =
      ExperimentSpec::from_json_text(read_text_file(ctx.presets / "exp1_figure.json"));
  const fs::path out = ctx.scratch / "exp1_figure";
  run_experiment(spec, out);

  const size_t runs = spec.effective_runs();
  const size_t languages = spec.synth->languages.size();

  const std::string curves = read_text_file(out / "sweep_curves.csv");
  const size_t lines = size_t(std::count(curves.begin(), curves.end(), '\n'));
  if (lines != 1 + runs * languages * 11) {
    detail = "sweep_curves.csv has " + std::to_string(lines) + " lines, expected " +
             std::to_string(1 + runs * languages * 11);
    return false;
  }

  const std::string summary = read_text_file(out / "alpha_summary.csv");
  std::istringstream in(summary);
  std::string line;
  std::set<std::string> seen;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      if (line != "language,mean_alpha,runs") {
        detail = "alpha_summary.csv header is '" + line + "'";
        return false;
      }
      continue;
    }
    if (!line.empty()) seen.insert(line.substr(0, line.find(',')));
  }
  for (const SynthLanguage& lang : spec.synth->languages) {
    if (!seen.count(lang.name)) {
      detail = "alpha_summary.csv is missing language " + lang.name;
      return false;
    }
  }
  if (seen.size() != languages) {
    detail = "alpha_summary.csv has " + std::to_string(seen.size()) + " languages";
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") ctx.cli = argv[i + 1];
    else if (flag == "--presets") ctx.presets = argv[i + 1];
    else if (flag == "--expected") ctx.expected = argv[i + 1];
  }
  if (ctx.cli.empty() || ctx.presets.empty() || ctx.expected.empty()) {
    std::cerr << "usage: acceptance --cli <bin> --presets <dir> --expected <json>\n";
    return 2;
  }
  ctx.scratch = fs::temp_directory_path() / ("langpaint_acceptance_" + std::to_string(getpid()));
  fs::create_directories(ctx.scratch);

  struct Criterion {
    int id;
    const char* name;
    std::function<bool(const Context&, std::string&)> fn;
  };
  const std::vector<Criterion> criteria{
      {1, "interpolation exactness", interpolation_exactness},
      {2, "gradient check vs central finite differences", gradient_check},
      {3, "metric oracle, exhaustive n<=5 C<=3", metric_oracle},
      {4, "sweep dominance over a 10-seed battery", sweep_dominance},
      {5, "stratification and dedup properties over 50 corpora", stratification_properties},
      {6, "CLI determinism incl. --threads 1 vs 4", cli_determinism},
      {7, "qualitative shift robustness on the pinned preset", shift_robustness},
      {8, "figure-shaped exp1 outputs", figure_shaped_output},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.fn(ctx, detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char line[512];
    std::snprintf(line, sizeof(line), "%s criterion %d: %s (%.1fs)%s%s", ok ? "PASS" : "FAIL",
                  criterion.id, criterion.name, seconds, detail.empty() ? "" : " — ",
                  detail.c_str());
    std::cout << line << "\n" << std::flush;
    failures += !ok;
  }

  std::error_code ec;
  fs::remove_all(ctx.scratch, ec);
  return failures;
}
