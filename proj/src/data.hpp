// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0
//
// Corpus ingestion and manipulation: CSV/TSV loading, train/dev duplicate
// removal, stratified folding and splitting, and a seeded synthetic
// multilingual corpus generator with controllable cross-lingual signal and
// label-distribution shift.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "common.hpp"

namespace langpaint {

struct Example {
  std::string text;
  uint32_t label = 0;  // index into Corpus::label_names
  std::string language;
};

class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<std::string> label_names, std::vector<Example> examples);

  void add(Example ex);

  const std::vector<Example>& examples() const { return examples_; }
  const std::vector<std::string>& label_names() const { return label_names_; }
  std::vector<std::string>& label_names() { return label_names_; }

  size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  size_t num_classes() const { return label_names_.size(); }

  // Sorted unique language tags.
  std::vector<std::string> languages() const;

  // Examples of one language, in corpus order, sharing this label vocabulary.
  Corpus filter_language(const std::string& language) const;

 private:
  std::vector<Example> examples_;
  std::vector<std::string> label_names_;
};

// Remaps example labels onto the target vocabulary by label name; raises a
// validation error for names the vocabulary does not contain. Corpora loaded
// from separate files index labels by first appearance, so consumers that
// pair corpora align them through this first.
Corpus align_labels(const Corpus& corpus, const std::vector<std::string>& vocabulary);

enum class CorpusFormat { Csv, Tsv };

// Infers the format from the file extension (.tsv -> Tsv, anything else Csv).
CorpusFormat corpus_format_for(const std::filesystem::path& path);

// Loads a corpus with header columns text,label,language (any order). Labels
// are mapped to indices by first appearance; row order is preserved.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format);

struct DedupResult {
  Corpus train;
  Corpus dev;
  size_t removed = 0;
};

// Removes texts appearing in both corpora (compared after NFC normalization
// and whitespace trim): all train occurrences go, the first dev occurrence
// stays, later dev occurrences of the same text go. Survivor order is
// preserved.
DedupResult dedup(const Corpus& train, const Corpus& dev);

enum class StrataKey { Label, LanguageLabel };

StrataKey strata_key_from_string(const std::string& s);
std::string to_string(StrataKey key);

struct Fold {
  Corpus train;
  Corpus val;
};

struct FoldSet {
  std::vector<Fold> folds;
  StrataKey strata_key = StrataKey::LanguageLabel;
  uint64_t seed = 0;
};

// k-fold partition: within each stratum, examples are shuffled by seed and
// dealt round-robin to k validation blocks; fold i validates on block i and
// trains on the rest. val_fraction must equal 1/k.
FoldSet stratified_folds(const Corpus& corpus, size_t k, double val_fraction, StrataKey strata_key,
                         uint64_t seed);

// Per-stratum largest-remainder apportionment of counts to parts, then a
// seeded shuffle and contiguous assignment. Parts partition the corpus.
std::vector<Corpus> stratified_split(const Corpus& corpus, const std::vector<double>& fractions,
                                     StrataKey strata_key, uint64_t seed);

struct SynthLanguage {
  std::string name;
  size_t n_train = 0;
  size_t n_test = 0;
  std::vector<double> class_priors_train;
  std::vector<double> class_priors_test;
  double exclusive_signal_strength = 0.0;
  double shared_signal_strength = 0.0;
};

struct SynthSpec {
  size_t num_classes = 2;
  std::vector<SynthLanguage> languages;
  size_t shared_signal_tokens = 20;
  size_t language_signal_tokens = 20;
  size_t language_noise_tokens = 50;
  size_t tokens_min = 5;
  size_t tokens_max = 12;
  double label_noise = 0.0;
  uint64_t seed = 1;

  static SynthSpec from_json_text(const std::string& text);
  std::string to_json_text() const;
};

struct SynthCorpora {
  Corpus train;
  Corpus test;
};

// Seed-deterministic draw: token category (shared signal / language signal /
// noise) per token, label priors per part, optional label flips.
SynthCorpora generate(const SynthSpec& spec);

}  // namespace langpaint
