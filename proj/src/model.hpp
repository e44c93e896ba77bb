// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic text classifier: hashed token n-gram features feeding a
// linear softmax layer, trained with Adam on cross-entropy. Small enough for
// exact gradient checks and fast interpolation sweeps; the weight-merging
// machinery does not care about the architecture behind the checkpoint.

#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "data.hpp"
#include "tensorstore.hpp"

namespace langpaint {

struct ModelConfig {
  size_t hash_dim = 4096;
  size_t num_classes = 2;
  std::set<int> ngram_orders = {1, 2};
  uint64_t seed = 1;

  void validate() const;
  std::string digest_text() const;  // canonical JSON echo, hashed into meta
};

struct TrainConfig {
  size_t batch_size = 16;
  double learning_rate = 1e-5;
  size_t max_epochs = 200;
  size_t patience = 3;
  double min_delta = 1e-4;

  // Adam moments and the loss are fixed; echoed in manifests.
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  void validate() const;
};

// Sparse L2-normalized term weights, entries sorted by bucket index.
struct FeatureVector {
  std::vector<std::pair<uint32_t, float>> entries;
};

struct EpochStats {
  double train_loss = 0.0;
  double val_metric = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  size_t stopped_epoch = 0;  // 1-based; 0 when no epoch ran
  size_t best_epoch = 0;
};

// Lowercases (ASCII), splits on Unicode whitespace, forms token n-grams per
// ngram_orders and hashes each with 64-bit FNV-1a modulo hash_dim. Empty text
// gives the zero vector.
FeatureVector featurize(const std::string& text, const ModelConfig& config);

// Tensors W [num_classes, hash_dim] from seeded uniform(-0.01, 0.01) and
// b [num_classes] zeros. Same seed, same bits.
Checkpoint init_model(const ModelConfig& config);

// softmax(W.fv + b), accumulated in double.
std::vector<double> forward(const Checkpoint& ckpt, const FeatureVector& fv);

struct LossGrad {
  double loss = 0.0;
  Checkpoint grad;
};

// Mean cross-entropy over the batch and its analytic gradient, shaped like
// the model checkpoint.
LossGrad loss_and_grad(const Checkpoint& ckpt,
                       const std::vector<std::pair<FeatureVector, uint32_t>>& batch);

// Validation metric, higher is better. Receives the candidate weights and the
// validation corpus.
using MetricFn = std::function<double(const Checkpoint&, const Corpus&)>;

struct TrainResult {
  Checkpoint ckpt;
  TrainHistory history;
};

// Adam over seeded shuffled minibatches with early stopping: training ends
// once the metric has not improved by min_delta for `patience` consecutive
// epochs (or at max_epochs), and the best epoch's weights are returned.
// max_epochs == 0 returns the initial weights untouched.
TrainResult train(const Checkpoint& init, const Corpus& train_set, const Corpus& val_set,
                  const ModelConfig& mcfg, const TrainConfig& tcfg, const MetricFn& metric);

std::vector<double> predict_proba(const Checkpoint& ckpt, const std::string& text,
                                  const ModelConfig& mcfg);
// Argmax of predict_proba; ties break toward the lowest class index.
uint32_t predict(const Checkpoint& ckpt, const std::string& text, const ModelConfig& mcfg);

uint32_t argmax_label(const std::vector<double>& probs);

}  // namespace langpaint
