// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0

#include "data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "rng.hpp"
#include "unicode.hpp"

namespace langpaint {

namespace {

// Stratum identity; '\x1f' keeps language/label concatenation unambiguous.
std::string stratum_of(const Corpus& corpus, const Example& ex, StrataKey key) {
  const std::string& label = corpus.label_names()[ex.label];
  if (key == StrataKey::Label) return label;
  return ex.language + '\x1f' + label;
}

std::string dedup_key(const std::string& text) { return trim(nfc(text)); }

Corpus subset(const Corpus& corpus, const std::vector<size_t>& indices) {
  std::vector<Example> out;
  out.reserve(indices.size());
  for (size_t i : indices) out.push_back(corpus.examples()[i]);
  return Corpus(corpus.label_names(), std::move(out));
}

struct ParsedTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180: quoted fields, doubled quotes, embedded separators/newlines.
ParsedTable parse_csv(const std::string& content, const std::string& where) {
  ParsedTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t i = 0;
  const size_t n = content.size();
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (table.header.empty())
      table.header = std::move(record);
    else
      table.rows.push_back(std::move(record));
    record.clear();
  };
  while (i < n) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && content[i + 1] == '"') {
          field.push_back('"');
          i += 2;
        } else {
          in_quotes = false;
          ++i;
        }
      } else {
        field.push_back(c);
        ++i;
      }
    } else if (c == '"' && !field_started && field.empty()) {
      in_quotes = true;
      field_started = true;
      ++i;
    } else if (c == ',') {
      end_field();
      ++i;
    } else if (c == '\r' && i + 1 < n && content[i + 1] == '\n') {
      end_record();
      i += 2;
    } else if (c == '\n') {
      end_record();
      ++i;
    } else {
      field.push_back(c);
      field_started = true;
      ++i;
    }
  }
  if (in_quotes) raise(ErrCode::Parse, where + ": unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return table;
}

ParsedTable parse_tsv(const std::string& content, const std::string& where) {
  ParsedTable table;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> record;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        record.push_back(line.substr(start));
        break;
      }
      record.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (table.header.empty())
      table.header = std::move(record);
    else
      table.rows.push_back(std::move(record));
  }
  if (table.header.empty()) raise(ErrCode::Parse, where + ": missing header");
  return table;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

size_t categorical(Rng& rng, const std::vector<double>& priors) {
  double u = rng.next_double();
  double cum = 0.0;
  for (size_t c = 0; c < priors.size(); ++c) {
    cum += priors[c];
    if (u < cum) return c;
  }
  return priors.size() - 1;
}

void validate_priors(const std::vector<double>& priors, size_t num_classes,
                     const std::string& what) {
  if (priors.size() != num_classes) {
    raise(ErrCode::InvalidArgument, "invalid synth spec: " + what + " must list " +
                                        std::to_string(num_classes) + " priors");
  }
  double sum = 0.0;
  for (double p : priors) {
    if (p < 0.0) raise(ErrCode::InvalidArgument, "invalid synth spec: negative prior in " + what);
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    raise(ErrCode::InvalidArgument, "invalid synth spec: " + what + " must sum to 1");
  }
}

}  // namespace

Corpus::Corpus(std::vector<std::string> label_names, std::vector<Example> examples)
    : label_names_(std::move(label_names)) {
  examples_.reserve(examples.size());
  for (auto& ex : examples) add(std::move(ex));
}

void Corpus::add(Example ex) {
  if (ex.language.empty()) raise(ErrCode::Validation, "example has an empty language tag");
  if (ex.label >= label_names_.size()) {
    raise(ErrCode::Validation, "example label " + std::to_string(ex.label) +
                                   " out of range for " + std::to_string(label_names_.size()) +
                                   " classes");
  }
  examples_.push_back(std::move(ex));
}

std::vector<std::string> Corpus::languages() const {
  std::set<std::string> seen;
  for (const Example& ex : examples_) seen.insert(ex.language);
  return std::vector<std::string>(seen.begin(), seen.end());
}

Corpus Corpus::filter_language(const std::string& language) const {
  Corpus out;
  out.label_names_ = label_names_;
  for (const Example& ex : examples_) {
    if (ex.language == language) out.examples_.push_back(ex);
  }
  return out;
}

Corpus align_labels(const Corpus& corpus, const std::vector<std::string>& vocabulary) {
  if (corpus.label_names() == vocabulary) return corpus;
  std::unordered_map<std::string, uint32_t> index;
  for (size_t i = 0; i < vocabulary.size(); ++i) index[vocabulary[i]] = uint32_t(i);
  std::vector<uint32_t> remap(corpus.label_names().size());
  for (size_t i = 0; i < corpus.label_names().size(); ++i) {
    auto it = index.find(corpus.label_names()[i]);
    if (it == index.end()) {
      raise(ErrCode::Validation, "label vocabulary mismatch: label '" +
                                     corpus.label_names()[i] + "' is not in the target vocabulary");
    }
    remap[i] = it->second;
  }
  Corpus out(vocabulary, {});
  for (const Example& ex : corpus.examples()) {
    out.add(Example{ex.text, remap[ex.label], ex.language});
  }
  return out;
}

CorpusFormat corpus_format_for(const std::filesystem::path& path) {
  return path.extension() == ".tsv" ? CorpusFormat::Tsv : CorpusFormat::Csv;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(ErrCode::Io, "cannot open '" + path.string() + "'");
  std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) raise(ErrCode::Io, "read failed for '" + path.string() + "'");

  const std::string where = "'" + path.string() + "'";
  ParsedTable table =
      (format == CorpusFormat::Csv) ? parse_csv(content, where) : parse_tsv(content, where);

  int text_col = -1, label_col = -1, language_col = -1;
  for (size_t c = 0; c < table.header.size(); ++c) {
    const std::string& name = table.header[c];
    if (name == "text") text_col = int(c);
    else if (name == "label") label_col = int(c);
    else if (name == "language") language_col = int(c);
    else raise(ErrCode::Parse, where + ": unknown column '" + name + "'");
  }
  if (text_col < 0 || label_col < 0 || language_col < 0) {
    raise(ErrCode::Parse, where + ": header must contain text, label and language columns");
  }

  std::vector<std::string> label_names;
  std::unordered_map<std::string, uint32_t> label_index;
  std::vector<Example> examples;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string row_name = "row " + std::to_string(r + 1);
    if (row.size() != table.header.size()) {
      raise(ErrCode::Parse, where + ": " + row_name + " has " + std::to_string(row.size()) +
                                " fields, expected " + std::to_string(table.header.size()));
    }
    const std::string& label = row[size_t(label_col)];
    const std::string& language = row[size_t(language_col)];
    if (label.empty()) raise(ErrCode::Parse, where + ": " + row_name + " has an empty label");
    if (language.empty())
      raise(ErrCode::Parse, where + ": " + row_name + " is missing its language field");
    auto [it, inserted] = label_index.emplace(label, uint32_t(label_names.size()));
    if (inserted) label_names.push_back(label);
    examples.push_back(Example{row[size_t(text_col)], it->second, language});
  }
  return Corpus(std::move(label_names), std::move(examples));
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format) {
  std::string out;
  if (format == CorpusFormat::Csv) {
    out += "text,label,language\n";
    for (const Example& ex : corpus.examples()) {
      out += csv_quote(ex.text) + ',' + csv_quote(corpus.label_names()[ex.label]) + ',' +
             csv_quote(ex.language) + '\n';
    }
  } else {
    out += "text\tlabel\tlanguage\n";
    for (const Example& ex : corpus.examples()) {
      const std::string& label = corpus.label_names()[ex.label];
      if (ex.text.find_first_of("\t\r\n") != std::string::npos ||
          label.find_first_of("\t\r\n") != std::string::npos ||
          ex.language.find_first_of("\t\r\n") != std::string::npos) {
        raise(ErrCode::Validation, "TSV cannot represent embedded tabs or newlines");
      }
      out += ex.text + '\t' + label + '\t' + ex.language + '\n';
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) raise(ErrCode::Io, "cannot open '" + path.string() + "' for writing");
  f.write(out.data(), std::streamsize(out.size()));
  if (!f) raise(ErrCode::Io, "write failed for '" + path.string() + "'");
}

DedupResult dedup(const Corpus& train, const Corpus& dev) {
  std::unordered_set<std::string> train_keys;
  for (const Example& ex : train.examples()) train_keys.insert(dedup_key(ex.text));
  std::unordered_set<std::string> overlap;
  for (const Example& ex : dev.examples()) {
    std::string key = dedup_key(ex.text);
    if (train_keys.count(key)) overlap.insert(std::move(key));
  }

  DedupResult result;
  std::vector<Example> train_kept;
  size_t removed = 0;
  for (const Example& ex : train.examples()) {
    if (overlap.count(dedup_key(ex.text))) {
      ++removed;
    } else {
      train_kept.push_back(ex);
    }
  }
  std::vector<Example> dev_kept;
  std::unordered_set<std::string> seen_in_dev;
  for (const Example& ex : dev.examples()) {
    std::string key = dedup_key(ex.text);
    if (overlap.count(key)) {
      if (seen_in_dev.count(key)) {
        ++removed;
        continue;
      }
      seen_in_dev.insert(std::move(key));
    }
    dev_kept.push_back(ex);
  }
  result.train = Corpus(train.label_names(), std::move(train_kept));
  result.dev = Corpus(dev.label_names(), std::move(dev_kept));
  result.removed = removed;
  return result;
}

StrataKey strata_key_from_string(const std::string& s) {
  if (s == "label") return StrataKey::Label;
  if (s == "language-label" || s == "language×label" || s == "languagexlabel") {
    return StrataKey::LanguageLabel;
  }
  raise(ErrCode::InvalidArgument, "unknown strata key '" + s + "' (use label or language-label)");
}

std::string to_string(StrataKey key) {
  return key == StrataKey::Label ? "label" : "language-label";
}

FoldSet stratified_folds(const Corpus& corpus, size_t k, double val_fraction, StrataKey strata_key,
                         uint64_t seed) {
  if (k < 2) raise(ErrCode::InvalidArgument, "k must be at least 2");
  if (std::abs(val_fraction - 1.0 / double(k)) > 1e-9) {
    raise(ErrCode::InvalidArgument, "val_fraction must equal 1/k for k-fold partitioning");
  }
  if (corpus.empty()) raise(ErrCode::Validation, "empty corpus");

  std::map<std::string, std::vector<size_t>> strata;
  for (size_t i = 0; i < corpus.size(); ++i) {
    strata[stratum_of(corpus, corpus.examples()[i], strata_key)].push_back(i);
  }

  // assignment[i] = fold whose validation part owns example i
  std::vector<size_t> assignment(corpus.size());
  size_t rank = 0;
  for (auto& [name, indices] : strata) {
    if (indices.size() < k) {
      raise(ErrCode::Validation, "stratum '" + name + "' has " + std::to_string(indices.size()) +
                                     " examples, fewer than k=" + std::to_string(k));
    }
    Rng rng = Rng::derive(seed, "folds", rank++);
    rng.shuffle(indices);
    for (size_t j = 0; j < indices.size(); ++j) assignment[indices[j]] = j % k;
  }

  FoldSet set;
  set.strata_key = strata_key;
  set.seed = seed;
  set.folds.reserve(k);
  for (size_t fold = 0; fold < k; ++fold) {
    std::vector<size_t> train_idx, val_idx;
    for (size_t i = 0; i < corpus.size(); ++i) {
      (assignment[i] == fold ? val_idx : train_idx).push_back(i);
    }
    set.folds.push_back(Fold{subset(corpus, train_idx), subset(corpus, val_idx)});
  }
  return set;
}

std::vector<Corpus> stratified_split(const Corpus& corpus, const std::vector<double>& fractions,
                                     StrataKey strata_key, uint64_t seed) {
  if (corpus.empty()) raise(ErrCode::Validation, "empty corpus");
  if (fractions.empty()) raise(ErrCode::InvalidArgument, "no split fractions given");
  double sum = 0.0;
  for (double f : fractions) {
    if (f <= 0.0) raise(ErrCode::InvalidArgument, "split fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) raise(ErrCode::InvalidArgument, "split fractions must sum to 1");

  std::map<std::string, std::vector<size_t>> strata;
  for (size_t i = 0; i < corpus.size(); ++i) {
    strata[stratum_of(corpus, corpus.examples()[i], strata_key)].push_back(i);
  }

  const size_t parts = fractions.size();
  std::vector<std::vector<size_t>> part_indices(parts);
  size_t rank = 0;
  for (auto& [name, indices] : strata) {
    (void)name;
    const size_t n = indices.size();
    // Largest-remainder apportionment of n across parts.
    std::vector<size_t> counts(parts);
    std::vector<std::pair<double, size_t>> remainders(parts);
    size_t assigned = 0;
    for (size_t j = 0; j < parts; ++j) {
      double quota = double(n) * fractions[j];
      counts[j] = size_t(std::floor(quota));
      assigned += counts[j];
      remainders[j] = {quota - std::floor(quota), j};
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (size_t extra = 0; extra < n - assigned; ++extra) {
      counts[remainders[extra % parts].second] += 1;
    }

    Rng rng = Rng::derive(seed, "split", rank++);
    rng.shuffle(indices);
    size_t cursor = 0;
    for (size_t j = 0; j < parts; ++j) {
      for (size_t c = 0; c < counts[j]; ++c) part_indices[j].push_back(indices[cursor++]);
    }
  }

  std::vector<Corpus> out;
  out.reserve(parts);
  for (auto& indices : part_indices) {
    std::sort(indices.begin(), indices.end());
    out.push_back(subset(corpus, indices));
  }
  return out;
}

SynthSpec SynthSpec::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::Parse, std::string("synth spec is not valid JSON: ") + e.what());
  }
  SynthSpec spec;
  try {
    spec.num_classes = j.at("num_classes").get<size_t>();
    for (const auto& lj : j.at("languages")) {
      SynthLanguage lang;
      lang.name = lj.at("name").get<std::string>();
      lang.n_train = lj.at("n_train").get<size_t>();
      lang.n_test = lj.at("n_test").get<size_t>();
      lang.class_priors_train = lj.at("class_priors_train").get<std::vector<double>>();
      lang.class_priors_test = lj.at("class_priors_test").get<std::vector<double>>();
      lang.exclusive_signal_strength = lj.at("exclusive_signal_strength").get<double>();
      lang.shared_signal_strength = lj.at("shared_signal_strength").get<double>();
      spec.languages.push_back(std::move(lang));
    }
    if (j.contains("vocab")) {
      const auto& v = j.at("vocab");
      spec.shared_signal_tokens = v.value("shared_signal_tokens", spec.shared_signal_tokens);
      spec.language_signal_tokens = v.value("language_signal_tokens", spec.language_signal_tokens);
      spec.language_noise_tokens = v.value("language_noise_tokens", spec.language_noise_tokens);
    }
    if (j.contains("tokens_per_text")) {
      spec.tokens_min = j.at("tokens_per_text").at("min").get<size_t>();
      spec.tokens_max = j.at("tokens_per_text").at("max").get<size_t>();
    }
    spec.label_noise = j.value("label_noise", 0.0);
    spec.seed = j.value("seed", uint64_t(1));
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::Parse, std::string("malformed synth spec: ") + e.what());
  }
  return spec;
}

std::string SynthSpec::to_json_text() const {
  nlohmann::json langs = nlohmann::json::array();
  for (const auto& lang : languages) {
    langs.push_back({{"name", lang.name},
                     {"n_train", lang.n_train},
                     {"n_test", lang.n_test},
                     {"class_priors_train", lang.class_priors_train},
                     {"class_priors_test", lang.class_priors_test},
                     {"exclusive_signal_strength", lang.exclusive_signal_strength},
                     {"shared_signal_strength", lang.shared_signal_strength}});
  }
  nlohmann::json j{{"num_classes", num_classes},
                   {"languages", std::move(langs)},
                   {"vocab",
                    {{"shared_signal_tokens", shared_signal_tokens},
                     {"language_signal_tokens", language_signal_tokens},
                     {"language_noise_tokens", language_noise_tokens}}},
                   {"tokens_per_text", {{"min", tokens_min}, {"max", tokens_max}}},
                   {"label_noise", label_noise},
                   {"seed", seed}};
  return j.dump(2);
}

SynthCorpora generate(const SynthSpec& spec) {
  if (spec.num_classes < 2) raise(ErrCode::InvalidArgument, "invalid synth spec: need >= 2 classes");
  if (spec.languages.empty())
    raise(ErrCode::InvalidArgument, "invalid synth spec: no languages listed");
  if (spec.tokens_min == 0 || spec.tokens_min > spec.tokens_max) {
    raise(ErrCode::InvalidArgument, "invalid synth spec: bad tokens_per_text range");
  }
  if (spec.label_noise < 0.0 || spec.label_noise > 1.0) {
    raise(ErrCode::InvalidArgument, "invalid synth spec: label_noise must be in [0, 1]");
  }
  if (spec.shared_signal_tokens == 0 || spec.language_signal_tokens == 0 ||
      spec.language_noise_tokens == 0) {
    raise(ErrCode::InvalidArgument, "invalid synth spec: vocab sizes must be positive");
  }
  for (const SynthLanguage& lang : spec.languages) {
    if (lang.name.empty()) raise(ErrCode::InvalidArgument, "invalid synth spec: unnamed language");
    validate_priors(lang.class_priors_train, spec.num_classes,
                    lang.name + ".class_priors_train");
    validate_priors(lang.class_priors_test, spec.num_classes, lang.name + ".class_priors_test");
    if (lang.exclusive_signal_strength < 0.0 || lang.exclusive_signal_strength > 1.0 ||
        lang.shared_signal_strength < 0.0 || lang.shared_signal_strength > 1.0) {
      raise(ErrCode::InvalidArgument, "invalid synth spec: signal strengths must be in [0, 1]");
    }
    if (lang.exclusive_signal_strength + lang.shared_signal_strength > 1.0 + 1e-12) {
      raise(ErrCode::InvalidArgument,
            "invalid synth spec: signal strengths of '" + lang.name + "' sum above 1");
    }
  }

  std::vector<std::string> label_names;
  for (size_t c = 0; c < spec.num_classes; ++c) label_names.push_back("c" + std::to_string(c));

  SynthCorpora out;
  out.train = Corpus(label_names, {});
  out.test = Corpus(label_names, {});

  for (size_t li = 0; li < spec.languages.size(); ++li) {
    const SynthLanguage& lang = spec.languages[li];
    for (int part = 0; part < 2; ++part) {
      const bool is_train = (part == 0);
      const size_t n = is_train ? lang.n_train : lang.n_test;
      const auto& priors = is_train ? lang.class_priors_train : lang.class_priors_test;
      Rng rng = Rng::derive(spec.seed, "gen", li, uint64_t(part));
      for (size_t e = 0; e < n; ++e) {
        const uint32_t label = uint32_t(categorical(rng, priors));
        const size_t len = spec.tokens_min + size_t(rng.below(spec.tokens_max - spec.tokens_min + 1));
        std::string text;
        for (size_t t = 0; t < len; ++t) {
          if (t) text.push_back(' ');
          const double u = rng.next_double();
          if (u < lang.shared_signal_strength) {
            text += "s" + std::to_string(label) + "_" +
                    std::to_string(rng.below(spec.shared_signal_tokens));
          } else if (u < lang.shared_signal_strength + lang.exclusive_signal_strength) {
            text += "x" + lang.name + "_" + std::to_string(label) + "_" +
                    std::to_string(rng.below(spec.language_signal_tokens));
          } else {
            text += "n" + lang.name + "_" + std::to_string(rng.below(spec.language_noise_tokens));
          }
        }
        uint32_t observed = label;
        if (spec.label_noise > 0.0 && rng.next_double() < spec.label_noise) {
          observed = uint32_t((label + 1 + rng.below(spec.num_classes - 1)) % spec.num_classes);
        }
        (is_train ? out.train : out.test).add(Example{std::move(text), observed, lang.name});
      }
    }
  }
  return out;
}

}  // namespace langpaint
