// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "data.hpp"
#include "rng.hpp"
#include "testutil.hpp"
#include "unicode.hpp"

using namespace langpaint;
using testutil::Row;
using testutil::TempDir;
using testutil::make_corpus;

namespace {

// multiset of (text, label, language) triples for partition checks
std::multiset<std::string> corpus_multiset(const Corpus& corpus) {
  std::multiset<std::string> out;
  for (const Example& ex : corpus.examples()) {
    out.insert(ex.text + "\x1f" + std::to_string(ex.label) + "\x1f" + ex.language);
  }
  return out;
}

Corpus random_corpus(uint64_t seed, size_t n, size_t classes, size_t languages) {
  Rng rng = Rng::derive(seed, "fixture");
  Corpus corpus(
      [&] {
        std::vector<std::string> names;
        for (size_t c = 0; c < classes; ++c) names.push_back("c" + std::to_string(c));
        return names;
      }(),
      {});
  for (size_t i = 0; i < n; ++i) {
    corpus.add(Example{"text " + std::to_string(rng.below(1000)) + " " + std::to_string(i),
                       uint32_t(rng.below(classes)), "lang" + std::to_string(rng.below(languages))});
  }
  return corpus;
}

}  // namespace

TEST_CASE("nfc normalization matches pinned reference vectors") {
  CHECK(nfc("cafe\xcc\x81") == "caf\xc3\xa9");
  CHECK(nfc("caf\xc3\xa9") == "caf\xc3\xa9");
  CHECK(nfc("\xe1\x84\x80\xe1\x85\xa1\xe1\x86\xa8") == "\xea\xb0\x81");  // Hangul L+V+T
  CHECK(nfc("A\xcc\x8a\xcc\x81") == "\xc7\xba");                         // A + ring + acute
  CHECK(nfc("q\xcc\xa3\xcc\x87") == "q\xcc\xa3\xcc\x87");
  CHECK(nfc("q\xcc\x87\xcc\xa3") == "q\xcc\xa3\xcc\x87");  // canonical mark order
  CHECK(nfc("A\xcc\x80\xcc\x96") == "\xc3\x80\xcc\x96");
  CHECK(nfc("plain ascii") == "plain ascii");
  CHECK(nfc("\xff\xfe broken") == "\xff\xfe broken");  // invalid UTF-8 passes through
}

TEST_CASE("trim removes unicode edge whitespace") {
  CHECK(trim("  x  ") == "x");
  CHECK(trim(" x ") == "x");
  CHECK(trim("x") == "x");
  CHECK(trim(" \t\n") == "");
}

TEST_CASE("csv loading maps labels by first appearance") {
  TempDir dir("csv");
  testutil::spit(dir.path() / "c.csv",
                 "text,label,language\nhello,A,eng\nworld,B,eng\nagain,A,hin\n");
  const Corpus corpus = load_corpus(dir.path() / "c.csv", CorpusFormat::Csv);
  CHECK(corpus.label_names() == std::vector<std::string>{"A", "B"});
  REQUIRE(corpus.size() == 3);
  CHECK(corpus.examples()[0].label == 0);
  CHECK(corpus.examples()[1].label == 1);
  CHECK(corpus.examples()[2].label == 0);
  CHECK(corpus.languages() == std::vector<std::string>{"eng", "hin"});
}

TEST_CASE("csv handles quoting, header-only files and schema errors") {
  TempDir dir("csv2");

  testutil::spit(dir.path() / "empty.csv", "text,label,language\n");
  CHECK(load_corpus(dir.path() / "empty.csv", CorpusFormat::Csv).empty());

  testutil::spit(dir.path() / "quoted.csv",
                 "text,label,language\n\"a, b\n\"\"c\"\"\",A,eng\n");
  const Corpus quoted = load_corpus(dir.path() / "quoted.csv", CorpusFormat::Csv);
  REQUIRE(quoted.size() == 1);
  CHECK(quoted.examples()[0].text == "a, b\n\"c\"");

  testutil::spit(dir.path() / "missing.csv", "text,label,language\nhello,A,\n");
  try {
    load_corpus(dir.path() / "missing.csv", CorpusFormat::Csv);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrCode::Parse);
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }

  testutil::spit(dir.path() / "unknown.csv", "text,label,language,extra\nh,A,eng,x\n");
  try {
    load_corpus(dir.path() / "unknown.csv", CorpusFormat::Csv);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrCode::Parse);
    CHECK(std::string(e.what()).find("unknown column 'extra'") != std::string::npos);
  }

  testutil::spit(dir.path() / "short.csv", "text,label\nh,A\n");
  CHECK_THROWS_AS(load_corpus(dir.path() / "short.csv", CorpusFormat::Csv), Error);
}

TEST_CASE("corpus files round-trip through csv and tsv") {
  TempDir dir("roundtrip");
  const Corpus corpus = make_corpus(
      {"Homophobic", "None"},
      {Row{"plain text", 0, "eng"}, Row{"comma, \"quote\"", 1, "hin"},
       Row{"line\nbreak", 0, "mal"}, Row{"", 1, "eng"}});

  save_corpus(corpus, dir.path() / "out.csv", CorpusFormat::Csv);
  const Corpus back = load_corpus(dir.path() / "out.csv", CorpusFormat::Csv);
  REQUIRE(back.size() == corpus.size());
  CHECK(back.label_names() == corpus.label_names());
  for (size_t i = 0; i < corpus.size(); ++i) {
    CHECK(back.examples()[i].text == corpus.examples()[i].text);
    CHECK(back.examples()[i].label == corpus.examples()[i].label);
    CHECK(back.examples()[i].language == corpus.examples()[i].language);
  }

  const Corpus simple = make_corpus({"a"}, {Row{"tab free", 0, "eng"}});
  save_corpus(simple, dir.path() / "out.tsv", CorpusFormat::Tsv);
  CHECK(load_corpus(dir.path() / "out.tsv", CorpusFormat::Tsv).examples()[0].text == "tab free");
  CHECK_THROWS_AS(save_corpus(corpus, dir.path() / "bad.tsv", CorpusFormat::Tsv), Error);

  CHECK(corpus_format_for("x.tsv") == CorpusFormat::Tsv);
  CHECK(corpus_format_for("x.csv") == CorpusFormat::Csv);
}

TEST_CASE("dedup removes cross-corpus duplicates as specified") {
  const std::vector<std::string> labels{"a", "b"};

  SUBCASE("disjoint corpora are untouched") {
    const Corpus train = make_corpus(labels, {Row{"t1", 0, "eng"}, Row{"t2", 1, "eng"}});
    const Corpus dev = make_corpus(labels, {Row{"t3", 0, "eng"}});
    const DedupResult r = dedup(train, dev);
    CHECK(r.removed == 0);
    CHECK(corpus_multiset(r.train) == corpus_multiset(train));
    CHECK(corpus_multiset(r.dev) == corpus_multiset(dev));
  }

  SUBCASE("overlap drops train occurrences and keeps first dev occurrence") {
    const Corpus train = make_corpus(labels, {Row{"t1", 0, "eng"}, Row{"t2", 1, "eng"}});
    const Corpus dev = make_corpus(labels, {Row{"t2", 0, "eng"}});
    const DedupResult r = dedup(train, dev);
    CHECK(r.removed == 1);
    REQUIRE(r.train.size() == 1);
    CHECK(r.train.examples()[0].text == "t1");
    REQUIRE(r.dev.size() == 1);
    CHECK(r.dev.examples()[0].text == "t2");
  }

  SUBCASE("repeated overlapping text keeps exactly one dev copy") {
    // enumerating occurrences: both train copies go, dev keeps the first
    const Corpus train = make_corpus(labels, {Row{"t2", 0, "eng"}, Row{"t2", 1, "eng"}});
    const Corpus dev = make_corpus(labels, {Row{"t2", 0, "eng"}, Row{"t2", 1, "eng"}});
    const DedupResult r = dedup(train, dev);
    CHECK(r.removed == 3);
    CHECK(r.train.size() == 0);
    REQUIRE(r.dev.size() == 1);
    CHECK(r.dev.examples()[0].label == 0);
  }

  SUBCASE("texts match after nfc normalization and trimming") {
    const Corpus train = make_corpus(labels, {Row{"  caf\xc3\xa9  ", 0, "eng"}});
    const Corpus dev = make_corpus(labels, {Row{"cafe\xcc\x81", 1, "esp"}});
    const DedupResult r = dedup(train, dev);
    CHECK(r.removed == 1);
    CHECK(r.train.size() == 0);
    CHECK(r.dev.size() == 1);
  }

  SUBCASE("dev-only duplicates survive") {
    const Corpus train = make_corpus(labels, {Row{"t1", 0, "eng"}});
    const Corpus dev = make_corpus(labels, {Row{"t9", 0, "eng"}, Row{"t9", 1, "eng"}});
    const DedupResult r = dedup(train, dev);
    CHECK(r.removed == 0);
    CHECK(r.dev.size() == 2);
  }
}

TEST_CASE("dedup is idempotent and leaves no cross-corpus overlap") {
  for (uint64_t seed = 0; seed < 15; ++seed) {
    Rng rng = Rng::derive(seed, "dedup");
    auto draw = [&](size_t n) {
      std::vector<Row> rows;
      for (size_t i = 0; i < n; ++i) {
        rows.push_back(Row{"t" + std::to_string(rng.below(12)), uint32_t(rng.below(2)), "eng"});
      }
      return rows;
    };
    const Corpus train = make_corpus({"a", "b"}, draw(25));
    const Corpus dev = make_corpus({"a", "b"}, draw(15));

    const DedupResult once = dedup(train, dev);
    std::set<std::string> train_texts, dev_texts;
    for (const Example& ex : once.train.examples()) train_texts.insert(ex.text);
    for (const Example& ex : once.dev.examples()) dev_texts.insert(ex.text);
    for (const std::string& text : train_texts) CHECK(dev_texts.count(text) == 0);

    const DedupResult twice = dedup(once.train, once.dev);
    CHECK(twice.removed == 0);
    CHECK(corpus_multiset(twice.train) == corpus_multiset(once.train));
    CHECK(corpus_multiset(twice.dev) == corpus_multiset(once.dev));
  }
}

TEST_CASE("stratified folds partition each stratum evenly") {
  SUBCASE("exactly divisible two-class corpus") {
    std::vector<Row> rows;
    for (int i = 0; i < 100; ++i) rows.push_back(Row{"t" + std::to_string(i), uint32_t(i % 2), "eng"});
    const Corpus corpus = make_corpus({"a", "b"}, rows);
    const FoldSet set = stratified_folds(corpus, 5, 0.2, StrataKey::Label, 1);
    REQUIRE(set.folds.size() == 5);
    for (const Fold& fold : set.folds) {
      CHECK(fold.val.size() == 20);
      CHECK(fold.train.size() == 80);
      size_t val_a = 0;
      for (const Example& ex : fold.val.examples()) val_a += ex.label == 0;
      CHECK(val_a == 10);
    }
  }

  SUBCASE("five folds of a 200-example balanced corpus train on 160, validate on 40") {
    std::vector<Row> rows;
    for (int i = 0; i < 200; ++i) {
      rows.push_back(Row{"t" + std::to_string(i), uint32_t(i % 2), i % 4 < 2 ? "eng" : "hin"});
    }
    const Corpus corpus = make_corpus({"a", "b"}, rows);
    const FoldSet set = stratified_folds(corpus, 5, 0.2, StrataKey::LanguageLabel, 7);
    for (const Fold& fold : set.folds) {
      CHECK(fold.train.size() == 160);
      CHECK(fold.val.size() == 40);
    }
  }

  SUBCASE("seven examples over five folds give val sizes of one or two") {
    std::vector<Row> rows;
    for (int i = 0; i < 7; ++i) rows.push_back(Row{"t" + std::to_string(i), 0, "eng"});
    const Corpus corpus = make_corpus({"a"}, rows);
    const FoldSet set = stratified_folds(corpus, 5, 0.2, StrataKey::Label, 3);
    size_t total_val = 0;
    for (const Fold& fold : set.folds) {
      CHECK(fold.val.size() >= 1);
      CHECK(fold.val.size() <= 2);
      total_val += fold.val.size();
    }
    CHECK(total_val == 7);
  }

  SUBCASE("a stratum smaller than k is rejected by name") {
    std::vector<Row> rows;
    for (int i = 0; i < 20; ++i) rows.push_back(Row{"t" + std::to_string(i), 0, "eng"});
    rows.push_back(Row{"x1", 1, "eng"});
    rows.push_back(Row{"x2", 1, "eng"});
    rows.push_back(Row{"x3", 1, "eng"});
    const Corpus corpus = make_corpus({"big", "small"}, rows);
    try {
      stratified_folds(corpus, 5, 0.2, StrataKey::Label, 1);
      FAIL("expected stratum error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrCode::Validation);
      CHECK(std::string(e.what()).find("small") != std::string::npos);
    }
  }

  SUBCASE("folds partition the corpus and respect the per-stratum bound") {
    for (uint64_t seed = 0; seed < 10; ++seed) {
      const size_t k = 2 + seed % 4;
      const Corpus corpus = random_corpus(seed, 60 + seed * 7, 2, 2);
      // ensure every stratum is large enough for this k
      std::map<std::string, size_t> stratum_sizes;
      for (const Example& ex : corpus.examples()) {
        stratum_sizes[ex.language + "|" + std::to_string(ex.label)]++;
      }
      bool feasible = true;
      for (const auto& [name, size] : stratum_sizes) feasible &= size >= k;
      if (!feasible) continue;

      const FoldSet set = stratified_folds(corpus, k, 1.0 / double(k), StrataKey::LanguageLabel, seed);
      std::multiset<std::string> all_val;
      for (const Fold& fold : set.folds) {
        auto train_set = corpus_multiset(fold.train);
        auto val_set = corpus_multiset(fold.val);
        std::multiset<std::string> joined = train_set;
        joined.insert(val_set.begin(), val_set.end());
        CHECK(joined == corpus_multiset(corpus));

        std::map<std::string, size_t> val_strata;
        for (const Example& ex : fold.val.examples()) {
          val_strata[ex.language + "|" + std::to_string(ex.label)]++;
        }
        for (const auto& [name, size] : stratum_sizes) {
          const double expected = double(size) / double(k);
          CHECK(std::abs(double(val_strata[name]) - std::round(expected)) <= 1.0);
        }
        all_val.insert(val_set.begin(), val_set.end());
      }
      // validation blocks are pairwise disjoint and cover the corpus
      CHECK(all_val == corpus_multiset(corpus));
    }
  }

  SUBCASE("val_fraction must match 1/k") {
    const Corpus corpus = random_corpus(1, 40, 2, 1);
    CHECK_THROWS_AS(stratified_folds(corpus, 5, 0.25, StrataKey::Label, 1), Error);
    CHECK_THROWS_AS(stratified_folds(corpus, 1, 1.0, StrataKey::Label, 1), Error);
  }
}

TEST_CASE("stratified split apportions by largest remainder") {
  SUBCASE("exact fractions") {
    std::vector<Row> rows;
    for (int i = 0; i < 10; ++i) rows.push_back(Row{"t" + std::to_string(i), 0, "eng"});
    const Corpus corpus = make_corpus({"a"}, rows);
    auto parts = stratified_split(corpus, {0.8, 0.2}, StrataKey::Label, 1);
    CHECK(parts[0].size() == 8);
    CHECK(parts[1].size() == 2);
    auto parts3 = stratified_split(corpus, {0.8, 0.1, 0.1}, StrataKey::Label, 1);
    CHECK(parts3[0].size() == 8);
    CHECK(parts3[1].size() == 1);
    CHECK(parts3[2].size() == 1);
  }

  SUBCASE("remainders go to the largest fractional quota, lowest index first") {
    std::vector<Row> rows;
    for (int i = 0; i < 7; ++i) rows.push_back(Row{"t" + std::to_string(i), 0, "eng"});
    const Corpus corpus = make_corpus({"a"}, rows);
    auto parts = stratified_split(corpus, {0.5, 0.5}, StrataKey::Label, 9);
    CHECK(parts[0].size() == 4);
    CHECK(parts[1].size() == 3);
  }

  SUBCASE("same seed twice gives identical splits") {
    const Corpus corpus = random_corpus(5, 50, 2, 2);
    auto a = stratified_split(corpus, {0.5, 0.5}, StrataKey::LanguageLabel, 17);
    auto b = stratified_split(corpus, {0.5, 0.5}, StrataKey::LanguageLabel, 17);
    for (size_t p = 0; p < a.size(); ++p) {
      CHECK(corpus_multiset(a[p]) == corpus_multiset(b[p]));
    }
    auto c = stratified_split(corpus, {0.5, 0.5}, StrataKey::LanguageLabel, 18);
    CHECK(corpus_multiset(a[0]) != corpus_multiset(c[0]));
  }

  SUBCASE("parts partition the corpus") {
    for (uint64_t seed = 0; seed < 8; ++seed) {
      const Corpus corpus = random_corpus(seed + 100, 45 + seed * 3, 3, 2);
      auto parts = stratified_split(corpus, {0.6, 0.2, 0.2}, StrataKey::LanguageLabel, seed);
      std::multiset<std::string> joined;
      for (const Corpus& part : parts) {
        auto m = corpus_multiset(part);
        joined.insert(m.begin(), m.end());
      }
      CHECK(joined == corpus_multiset(corpus));
    }
  }

  SUBCASE("bad arguments are rejected") {
    const Corpus corpus = random_corpus(2, 10, 2, 1);
    CHECK_THROWS_AS(stratified_split(corpus, {0.5, 0.4}, StrataKey::Label, 1), Error);
    CHECK_THROWS_AS(stratified_split(corpus, {1.2, -0.2}, StrataKey::Label, 1), Error);
    CHECK_THROWS_AS(stratified_split(Corpus(), {0.5, 0.5}, StrataKey::Label, 1), Error);
  }
}

TEST_CASE("label alignment remaps by name") {
  const Corpus corpus = make_corpus({"B", "A"}, {Row{"x", 0, "eng"}, Row{"y", 1, "eng"}});
  const Corpus aligned = align_labels(corpus, {"A", "B"});
  CHECK(aligned.label_names() == std::vector<std::string>{"A", "B"});
  CHECK(aligned.examples()[0].label == 1);  // "B"
  CHECK(aligned.examples()[1].label == 0);  // "A"
  CHECK_THROWS_AS(align_labels(corpus, {"A", "C"}), Error);
}

TEST_CASE("synthetic generation honors degenerate strengths") {
  SynthSpec spec;
  spec.num_classes = 2;
  spec.seed = 4;
  spec.label_noise = 0.0;
  spec.tokens_min = 3;
  spec.tokens_max = 6;
  SynthLanguage lang;
  lang.name = "eng";
  lang.n_train = 40;
  lang.n_test = 10;
  lang.class_priors_train = {0.5, 0.5};
  lang.class_priors_test = {0.5, 0.5};
  lang.exclusive_signal_strength = 1.0;
  lang.shared_signal_strength = 0.0;
  spec.languages = {lang};

  const SynthCorpora corpora = generate(spec);
  CHECK(corpora.train.size() == 40);
  CHECK(corpora.test.size() == 10);
  for (const Corpus* corpus : {&corpora.train, &corpora.test}) {
    for (const Example& ex : corpus->examples()) {
      const std::string prefix = "xeng_" + std::to_string(ex.label) + "_";
      size_t start = 0;
      while (start < ex.text.size()) {
        size_t space = ex.text.find(' ', start);
        if (space == std::string::npos) space = ex.text.size();
        CHECK(ex.text.substr(start, space - start).rfind(prefix, 0) == 0);
        start = space + 1;
      }
    }
  }
}

TEST_CASE("synthetic label frequencies track the priors") {
  SynthSpec spec;
  spec.num_classes = 2;
  spec.seed = 9;
  spec.label_noise = 0.0;
  SynthLanguage lang;
  lang.name = "eng";
  lang.n_train = 600;
  lang.n_test = 600;
  lang.class_priors_train = {0.7, 0.3};
  lang.class_priors_test = {0.7, 0.3};
  lang.exclusive_signal_strength = 0.4;
  lang.shared_signal_strength = 0.4;
  spec.languages = {lang};

  const SynthCorpora corpora = generate(spec);
  for (const Corpus* corpus : {&corpora.train, &corpora.test}) {
    size_t ones = 0;
    for (const Example& ex : corpus->examples()) ones += ex.label == 1;
    const double freq = double(ones) / double(corpus->size());
    const double sigma = std::sqrt(0.3 * 0.7 / double(corpus->size()));
    CHECK(std::abs(freq - 0.3) <= 3.0 * sigma);
  }
}

TEST_CASE("synthetic generation is seed deterministic") {
  SynthSpec spec = SynthSpec::from_json_text(R"({
    "num_classes": 2,
    "languages": [
      {"name": "eng", "n_train": 30, "n_test": 10,
       "class_priors_train": [0.6, 0.4], "class_priors_test": [0.4, 0.6],
       "exclusive_signal_strength": 0.3, "shared_signal_strength": 0.5}
    ],
    "tokens_per_text": {"min": 4, "max": 9},
    "label_noise": 0.1,
    "seed": 21
  })");
  const SynthCorpora a = generate(spec);
  const SynthCorpora b = generate(spec);
  CHECK(corpus_multiset(a.train) == corpus_multiset(b.train));
  CHECK(corpus_multiset(a.test) == corpus_multiset(b.test));
  CHECK(a.train.examples()[0].text == b.train.examples()[0].text);

  spec.seed = 22;
  const SynthCorpora c = generate(spec);
  CHECK(corpus_multiset(a.train) != corpus_multiset(c.train));

  // json round trip preserves every SynthSpec field
  const SynthSpec back = SynthSpec::from_json_text(spec.to_json_text());
  CHECK(back.seed == spec.seed);
  CHECK(back.languages.size() == 1);
  CHECK(back.languages[0].class_priors_test == std::vector<double>{0.4, 0.6});
  CHECK(back.tokens_min == 4);
  CHECK(back.tokens_max == 9);
}

TEST_CASE("invalid synth specs are rejected") {
  SynthSpec spec;
  spec.num_classes = 2;
  SynthLanguage lang;
  lang.name = "eng";
  lang.n_train = 10;
  lang.n_test = 5;
  lang.class_priors_train = {0.5, 0.5};
  lang.class_priors_test = {0.5, 0.5};
  spec.languages = {lang};

  SynthSpec bad_priors = spec;
  bad_priors.languages[0].class_priors_train = {0.9, 0.2};
  CHECK_THROWS_AS(generate(bad_priors), Error);

  SynthSpec bad_strength = spec;
  bad_strength.languages[0].shared_signal_strength = 0.8;
  bad_strength.languages[0].exclusive_signal_strength = 0.5;
  CHECK_THROWS_AS(generate(bad_strength), Error);

  SynthSpec bad_tokens = spec;
  bad_tokens.tokens_min = 9;
  bad_tokens.tokens_max = 3;
  CHECK_THROWS_AS(generate(bad_tokens), Error);

  SynthSpec no_langs = spec;
  no_langs.languages.clear();
  CHECK_THROWS_AS(generate(no_langs), Error);
}
