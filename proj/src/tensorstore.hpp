// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0
//
// Named-tensor checkpoints: the unit of model storage, linear weight
// interpolation and provenance tracking.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "common.hpp"

namespace langpaint {

// Flat row-major float32 tensor. All elements are finite; the constructor
// enforces shape/data consistency.
struct Tensor {
  Tensor() = default;
  Tensor(std::string name, std::vector<size_t> shape, std::vector<float> data);

  size_t numel() const;

  std::string name;
  std::vector<size_t> shape;
  std::vector<float> data;
};

// Ordered collection of uniquely named tensors plus string metadata.
// Iteration order is insertion order and survives save/load. Checkpoints are
// treated as immutable once built; training constructs new ones.
class Checkpoint {
 public:
  void add(Tensor t);

  bool has(const std::string& name) const { return index_.count(name) > 0; }
  const Tensor& tensor(const std::string& name) const;
  Tensor& tensor(const std::string& name);
  const std::vector<Tensor>& tensors() const { return tensors_; }
  size_t size() const { return tensors_.size(); }

  const std::map<std::string, std::string>& meta() const { return meta_; }
  void set_meta(const std::string& key, const std::string& value) { meta_[key] = value; }
  std::string meta_or(const std::string& key, const std::string& fallback) const;

  // Compatible iff identical name sets with identical shapes. On mismatch the
  // first offending tensor name is reported through `why`.
  bool compatible_with(const Checkpoint& other, std::string* why = nullptr) const;

 private:
  std::vector<Tensor> tensors_;
  std::unordered_map<std::string, size_t> index_;
  std::map<std::string, std::string> meta_;
};

// Elementwise alpha*a + (1-alpha)*b in float32 arithmetic. alpha must lie in
// [0, 1]; the endpoints return exact copies of the respective parent tensors.
// The result's meta records alpha and both parent digests.
Checkpoint interpolate(const Checkpoint& a, const Checkpoint& b, double alpha);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Content hash over meta plus tensors (names, shapes, raw float bytes) in
// iteration order.
std::string digest(const Checkpoint& ckpt);
// Variant covering tensors only, for comparisons that ignore provenance meta.
std::string tensor_digest(const Checkpoint& ckpt);

inline constexpr uint32_t kCheckpointFormatVersion = 1;

}  // namespace langpaint
