// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0

#include "ensemble.hpp"

#include <json.hpp>

#include "rng.hpp"
#include "support.hpp"

namespace langpaint {

EnsembleModel build_ensemble(const Corpus& corpus, const PipelineConfig& cfg, size_t k) {
  if (k == 0) raise(ErrCode::InvalidArgument, "ensemble needs at least one fold");
  cfg.validate();

  EnsembleModel ens;
  ens.config = cfg;
  ens.label_names = corpus.label_names();

  std::vector<Fold> folds;
  if (k == 1) {
    auto parts = stratified_split(corpus, {0.8, 0.2}, StrataKey::LanguageLabel, cfg.seed);
    folds.push_back(Fold{std::move(parts[0]), std::move(parts[1])});
  } else {
    FoldSet set = stratified_folds(corpus, k, 1.0 / double(k), StrataKey::LanguageLabel, cfg.seed);
    folds = std::move(set.folds);
  }

  for (size_t i = 0; i < folds.size(); ++i) {
    PipelineConfig fold_cfg = cfg;
    Rng r = Rng::derive(cfg.seed, "fold", i);
    fold_cfg.seed = r.next_u64();
    ens.fold_seeds.push_back(fold_cfg.seed);
    ens.members.push_back(run_langpaint(folds[i].train, folds[i].val, fold_cfg));
  }
  return ens;
}

Prediction ensemble_predict(const EnsembleModel& ens, const std::string& text,
                            const std::string& language) {
  if (ens.members.empty()) raise(ErrCode::Validation, "ensemble has no members");
  const ArmKind kind = (ens.config.ensemble_members == "ls") ? ArmKind::Ls : ArmKind::Merged;

  Prediction out;
  for (const LangPaintModel& member : ens.members) {
    Prediction p = infer_with(member, text, language, kind);
    if (out.probs.empty()) {
      out.probs = std::move(p.probs);
    } else {
      for (size_t c = 0; c < out.probs.size(); ++c) out.probs[c] += p.probs[c];
    }
  }
  out.label = argmax_label(out.probs);
  return out;
}

void save_ensemble_dir(const EnsembleModel& ens, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) raise(ErrCode::Io, "cannot create '" + dir.string() + "': " + ec.message());

  nlohmann::json member_digests = nlohmann::json::array();
  for (size_t i = 0; i < ens.members.size(); ++i) {
    const std::filesystem::path fold_dir = dir / ("fold_" + std::to_string(i));
    save_run_dir(ens.members[i], fold_dir);
    member_digests.push_back(file_sha256(fold_dir / "manifest.json"));
  }
  nlohmann::json j{{"kind", "ensemble"},
                   {"artifact_version", kArtifactVersion},
                   {"k", ens.members.size()},
                   {"fold_seeds", ens.fold_seeds},
                   {"config", nlohmann::json::parse(ens.config.to_json_text())},
                   {"label_names", ens.label_names},
                   {"member_manifest_digests", std::move(member_digests)}};
  atomic_write_file(dir / "ensemble_manifest.json", j.dump(2));
}

EnsembleModel load_ensemble_dir(const std::filesystem::path& dir) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_text_file(dir / "ensemble_manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::Parse, "'" + (dir / "ensemble_manifest.json").string() + "': " + e.what());
  }
  EnsembleModel ens;
  try {
    ens.config = PipelineConfig::from_json_text(manifest.at("config").dump());
    ens.label_names = manifest.at("label_names").get<std::vector<std::string>>();
    ens.fold_seeds = manifest.at("fold_seeds").get<std::vector<uint64_t>>();
    const size_t k = manifest.at("k").get<size_t>();
    for (size_t i = 0; i < k; ++i) {
      ens.members.push_back(load_run_dir(dir / ("fold_" + std::to_string(i))));
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::Parse, "'" + dir.string() + "': malformed ensemble manifest: " + e.what());
  }
  return ens;
}

}  // namespace langpaint
