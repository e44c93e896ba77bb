// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0

#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "rng.hpp"
#include "sha256.hpp"
#include "unicode.hpp"

namespace langpaint {

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<uint32_t> cps;
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };
  if (utf8_decode(text, cps)) {
    for (uint32_t cp : cps) {
      if (is_unicode_space(cp)) {
        flush();
      } else {
        if (cp < 0x80 && cp >= 'A' && cp <= 'Z') cp += 'a' - 'A';
        current += utf8_encode({cp});
      }
    }
  } else {
    // Invalid UTF-8: fall back to byte-level ASCII handling.
    for (unsigned char c : text) {
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
        flush();
      } else {
        current.push_back(char(c >= 'A' && c <= 'Z' ? c + ('a' - 'A') : c));
      }
    }
  }
  flush();
  return tokens;
}

void require_model_shape(const Checkpoint& ckpt, size_t* num_classes, size_t* hash_dim) {
  if (!ckpt.has("W") || !ckpt.has("b")) {
    raise(ErrCode::Incompatible, "checkpoint is missing model tensors W and b");
  }
  const Tensor& w = ckpt.tensor("W");
  const Tensor& b = ckpt.tensor("b");
  if (w.shape.size() != 2 || b.shape.size() != 1 || b.shape[0] != w.shape[0]) {
    raise(ErrCode::Incompatible, "checkpoint tensor shapes do not form a linear classifier");
  }
  *num_classes = w.shape[0];
  *hash_dim = w.shape[1];
}

std::vector<double> softmax_logits(std::vector<double> logits) {
  double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - max_logit);
    sum += v;
  }
  for (double& v : logits) v /= sum;
  return logits;
}

}  // namespace

void ModelConfig::validate() const {
  if (num_classes < 2) raise(ErrCode::InvalidArgument, "num_classes must be at least 2");
  if (hash_dim < num_classes) raise(ErrCode::InvalidArgument, "hash_dim must be >= num_classes");
  if (ngram_orders.empty()) raise(ErrCode::InvalidArgument, "ngram_orders must be non-empty");
  for (int n : ngram_orders) {
    if (n < 1) raise(ErrCode::InvalidArgument, "ngram orders must be positive");
  }
}

std::string ModelConfig::digest_text() const {
  nlohmann::json j{{"hash_dim", hash_dim},
                   {"num_classes", num_classes},
                   {"ngram_orders", ngram_orders},
                   {"seed", seed}};
  return Sha256::of(j.dump());
}

void TrainConfig::validate() const {
  if (batch_size == 0) raise(ErrCode::InvalidArgument, "batch_size must be positive");
  if (!(learning_rate > 0.0)) raise(ErrCode::InvalidArgument, "learning_rate must be positive");
  if (min_delta < 0.0) raise(ErrCode::InvalidArgument, "min_delta must be non-negative");
  if (max_epochs > 0 && patience >= max_epochs) {
    raise(ErrCode::InvalidArgument, "patience must be smaller than max_epochs");
  }
  if (max_epochs > 0 && patience == 0) {
    raise(ErrCode::InvalidArgument, "patience must be positive");
  }
}

FeatureVector featurize(const std::string& text, const ModelConfig& config) {
  const std::vector<std::string> tokens = tokenize(text);
  std::map<uint32_t, double> counts;
  for (int order : config.ngram_orders) {
    const size_t n = size_t(order);
    if (tokens.size() < n) continue;
    for (size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (size_t k = 1; k < n; ++k) {
        gram += ' ';
        gram += tokens[i + k];
      }
      counts[uint32_t(fnv1a64(gram) % config.hash_dim)] += 1.0;
    }
  }
  double norm_sq = 0.0;
  for (const auto& [bucket, count] : counts) norm_sq += count * count;
  const double inv_norm = norm_sq > 0.0 ? 1.0 / std::sqrt(norm_sq) : 0.0;

  FeatureVector fv;
  fv.entries.reserve(counts.size());
  for (const auto& [bucket, count] : counts) {
    fv.entries.emplace_back(bucket, float(count * inv_norm));
  }
  return fv;
}

Checkpoint init_model(const ModelConfig& config) {
  config.validate();
  Rng rng = Rng::derive(config.seed, "init");
  std::vector<float> w(config.num_classes * config.hash_dim);
  for (float& v : w) {
    do {
      v = float(-0.01 + 0.02 * rng.next_double());
    } while (!(v > -0.01f && v < 0.01f));
  }
  Checkpoint ckpt;
  ckpt.add(Tensor("W", {config.num_classes, config.hash_dim}, std::move(w)));
  ckpt.add(Tensor("b", {config.num_classes}, std::vector<float>(config.num_classes, 0.0f)));
  ckpt.set_meta("config_digest", config.digest_text());
  ckpt.set_meta("seed", std::to_string(config.seed));
  return ckpt;
}

std::vector<double> forward(const Checkpoint& ckpt, const FeatureVector& fv) {
  size_t num_classes = 0, hash_dim = 0;
  require_model_shape(ckpt, &num_classes, &hash_dim);
  const Tensor& w = ckpt.tensor("W");
  const Tensor& b = ckpt.tensor("b");

  std::vector<double> logits(num_classes);
  for (size_t c = 0; c < num_classes; ++c) {
    double acc = double(b.data[c]);
    const float* row = w.data.data() + c * hash_dim;
    for (const auto& [bucket, value] : fv.entries) {
      if (bucket >= hash_dim) {
        raise(ErrCode::Incompatible, "feature bucket " + std::to_string(bucket) +
                                         " out of range for hash_dim " + std::to_string(hash_dim));
      }
      acc += double(row[bucket]) * double(value);
    }
    logits[c] = acc;
  }
  return softmax_logits(std::move(logits));
}

LossGrad loss_and_grad(const Checkpoint& ckpt,
                       const std::vector<std::pair<FeatureVector, uint32_t>>& batch) {
  if (batch.empty()) raise(ErrCode::Validation, "empty batch");
  size_t num_classes = 0, hash_dim = 0;
  require_model_shape(ckpt, &num_classes, &hash_dim);

  std::vector<double> grad_w(num_classes * hash_dim, 0.0);
  std::vector<double> grad_b(num_classes, 0.0);
  double loss = 0.0;
  const double inv_batch = 1.0 / double(batch.size());

  for (const auto& [fv, label] : batch) {
    if (label >= num_classes) {
      raise(ErrCode::Validation,
            "label " + std::to_string(label) + " out of range for " +
                std::to_string(num_classes) + " classes");
    }
    const std::vector<double> probs = forward(ckpt, fv);
    loss -= std::log(std::max(probs[label], 1e-300)) * inv_batch;
    for (size_t c = 0; c < num_classes; ++c) {
      const double delta = (probs[c] - (c == label ? 1.0 : 0.0)) * inv_batch;
      grad_b[c] += delta;
      double* row = grad_w.data() + c * hash_dim;
      for (const auto& [bucket, value] : fv.entries) {
        row[bucket] += delta * double(value);
      }
    }
  }

  LossGrad out;
  out.loss = loss;
  std::vector<float> gw(grad_w.begin(), grad_w.end());
  std::vector<float> gb(grad_b.begin(), grad_b.end());
  out.grad.add(Tensor("W", {num_classes, hash_dim}, std::move(gw)));
  out.grad.add(Tensor("b", {num_classes}, std::move(gb)));
  return out;
}

TrainResult train(const Checkpoint& init, const Corpus& train_set, const Corpus& val_set,
                  const ModelConfig& mcfg, const TrainConfig& tcfg, const MetricFn& metric) {
  mcfg.validate();
  tcfg.validate();
  if (train_set.empty()) raise(ErrCode::Validation, "empty training corpus");
  if (val_set.empty()) raise(ErrCode::Validation, "empty validation corpus");
  size_t num_classes = 0, hash_dim = 0;
  require_model_shape(init, &num_classes, &hash_dim);
  if (num_classes != mcfg.num_classes || hash_dim != mcfg.hash_dim) {
    raise(ErrCode::Incompatible, "initial checkpoint does not match the model config");
  }

  TrainResult result;
  result.ckpt = init;
  if (tcfg.max_epochs == 0) return result;

  std::vector<std::pair<FeatureVector, uint32_t>> featurized;
  featurized.reserve(train_set.size());
  for (const Example& ex : train_set.examples()) {
    if (ex.label >= num_classes) {
      raise(ErrCode::Validation, "training label out of range for the model");
    }
    featurized.emplace_back(featurize(ex.text, mcfg), ex.label);
  }

  Checkpoint current = init;
  // Adam state, kept in double; weights are stored back as float32 so a
  // checkpoint round-trip never perturbs training.
  std::vector<std::string> tensor_names;
  std::map<std::string, std::vector<double>> m1, m2;
  for (const Tensor& t : current.tensors()) {
    tensor_names.push_back(t.name);
    m1[t.name].assign(t.data.size(), 0.0);
    m2[t.name].assign(t.data.size(), 0.0);
  }
  uint64_t step = 0;

  Checkpoint best = current;
  double best_metric = 0.0;
  bool have_best = false;
  size_t bad_epochs = 0;
  TrainHistory& history = result.history;

  for (size_t epoch = 1; epoch <= tcfg.max_epochs; ++epoch) {
    std::vector<size_t> order(featurized.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng = Rng::derive(mcfg.seed, "shuffle", epoch);
    rng.shuffle(order);

    double epoch_loss = 0.0;
    std::vector<std::pair<FeatureVector, uint32_t>> batch;
    for (size_t start = 0; start < order.size(); start += tcfg.batch_size) {
      const size_t end = std::min(order.size(), start + tcfg.batch_size);
      batch.clear();
      for (size_t i = start; i < end; ++i) batch.push_back(featurized[order[i]]);

      LossGrad lg = loss_and_grad(current, batch);
      epoch_loss += lg.loss * double(end - start);

      ++step;
      const double bc1 = 1.0 - std::pow(TrainConfig::kBeta1, double(step));
      const double bc2 = 1.0 - std::pow(TrainConfig::kBeta2, double(step));
      for (const std::string& name : tensor_names) {
        Tensor& t = current.tensor(name);
        const Tensor& g = lg.grad.tensor(name);
        std::vector<double>& m = m1[name];
        std::vector<double>& v = m2[name];
        for (size_t i = 0; i < t.data.size(); ++i) {
          const double gi = double(g.data[i]);
          m[i] = TrainConfig::kBeta1 * m[i] + (1.0 - TrainConfig::kBeta1) * gi;
          v[i] = TrainConfig::kBeta2 * v[i] + (1.0 - TrainConfig::kBeta2) * gi * gi;
          const double update =
              tcfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + TrainConfig::kEpsilon);
          t.data[i] = float(double(t.data[i]) - update);
        }
      }
    }
    epoch_loss /= double(order.size());

    const double val = metric(current, val_set);
    history.epochs.push_back(EpochStats{epoch_loss, val});
    history.stopped_epoch = epoch;

    if (!have_best || val >= best_metric + tcfg.min_delta) {
      have_best = true;
      best_metric = val;
      history.best_epoch = epoch;
      best = current;
      bad_epochs = 0;
    } else {
      ++bad_epochs;
      if (bad_epochs >= tcfg.patience) break;
    }
  }

  best.set_meta("config_digest", mcfg.digest_text());
  best.set_meta("seed", std::to_string(mcfg.seed));
  best.set_meta("best_epoch", std::to_string(history.best_epoch));
  best.set_meta("stopped_epoch", std::to_string(history.stopped_epoch));
  result.ckpt = std::move(best);
  return result;
}

std::vector<double> predict_proba(const Checkpoint& ckpt, const std::string& text,
                                  const ModelConfig& mcfg) {
  return forward(ckpt, featurize(text, mcfg));
}

uint32_t predict(const Checkpoint& ckpt, const std::string& text, const ModelConfig& mcfg) {
  return argmax_label(predict_proba(ckpt, text, mcfg));
}

uint32_t argmax_label(const std::vector<double>& probs) {
  size_t best = 0;
  for (size_t c = 1; c < probs.size(); ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return uint32_t(best);
}

}  // namespace langpaint
