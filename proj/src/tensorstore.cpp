// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0

#include "tensorstore.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "sha256.hpp"

namespace langpaint {

namespace {

constexpr char kMagic[4] = {'L', 'P', 'N', 'T'};

void check_finite(const Tensor& t) {
  for (float v : t.data) {
    if (!std::isfinite(v)) {
      raise(ErrCode::Validation, "tensor '" + t.name + "' contains a non-finite element");
    }
  }
}

void append_le32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char(uint8_t(v >> (8 * i))));
}

void append_le64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char(uint8_t(v >> (8 * i))));
}

uint32_t float_bits(float f) {
  uint32_t u;
  std::memcpy(&u, &f, sizeof(u));
  return u;
}

float bits_float(uint32_t u) {
  float f;
  std::memcpy(&f, &u, sizeof(f));
  return f;
}

void hash_tensors(Sha256& h, const Checkpoint& ckpt) {
  std::string buf;
  for (const Tensor& t : ckpt.tensors()) {
    buf.clear();
    buf += t.name;
    buf.push_back('\0');
    append_le64(buf, t.shape.size());
    for (size_t d : t.shape) append_le64(buf, d);
    for (float v : t.data) append_le32(buf, float_bits(v));
    h.update(buf);
  }
}

}  // namespace

Tensor::Tensor(std::string name_, std::vector<size_t> shape_, std::vector<float> data_)
    : name(std::move(name_)), shape(std::move(shape_)), data(std::move(data_)) {
  if (name.empty()) raise(ErrCode::Validation, "tensor name must be non-empty");
  size_t n = 1;
  for (size_t d : shape) {
    if (d == 0) raise(ErrCode::Validation, "tensor '" + name + "' has a zero dimension");
    n *= d;
  }
  if (n != data.size()) {
    raise(ErrCode::Validation, "tensor '" + name + "': shape product " + std::to_string(n) +
                                   " != data length " + std::to_string(data.size()));
  }
  check_finite(*this);
}

size_t Tensor::numel() const {
  size_t n = 1;
  for (size_t d : shape) n *= d;
  return n;
}

void Checkpoint::add(Tensor t) {
  if (index_.count(t.name)) {
    raise(ErrCode::Validation, "duplicate tensor name '" + t.name + "'");
  }
  index_.emplace(t.name, tensors_.size());
  tensors_.push_back(std::move(t));
}

const Tensor& Checkpoint::tensor(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) raise(ErrCode::Validation, "checkpoint has no tensor '" + name + "'");
  return tensors_[it->second];
}

Tensor& Checkpoint::tensor(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) raise(ErrCode::Validation, "checkpoint has no tensor '" + name + "'");
  return tensors_[it->second];
}

std::string Checkpoint::meta_or(const std::string& key, const std::string& fallback) const {
  auto it = meta_.find(key);
  return it == meta_.end() ? fallback : it->second;
}

bool Checkpoint::compatible_with(const Checkpoint& other, std::string* why) const {
  for (const Tensor& t : tensors_) {
    if (!other.has(t.name)) {
      if (why) *why = "tensor '" + t.name + "' missing from second checkpoint";
      return false;
    }
    if (other.tensor(t.name).shape != t.shape) {
      if (why) *why = "tensor '" + t.name + "' shape mismatch";
      return false;
    }
  }
  for (const Tensor& t : other.tensors()) {
    if (!has(t.name)) {
      if (why) *why = "tensor '" + t.name + "' missing from first checkpoint";
      return false;
    }
  }
  return true;
}

Checkpoint interpolate(const Checkpoint& a, const Checkpoint& b, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    raise(ErrCode::InvalidArgument,
          "alpha out of range: " + std::to_string(alpha) + " not in [0, 1]");
  }
  std::string why;
  if (!a.compatible_with(b, &why)) {
    raise(ErrCode::Incompatible, "incompatible checkpoints: " + why);
  }

  // Coefficients are complemented in double, then rounded once to float, so
  // interpolate(b, a, 1 - alpha) reuses the exact same pair of float weights.
  const float wa = static_cast<float>(alpha);
  const float wb = static_cast<float>(1.0 - alpha);
  const bool copy_a = (alpha == 1.0);
  const bool copy_b = (alpha == 0.0);

  Checkpoint out;
  for (const Tensor& ta : a.tensors()) {
    const Tensor& tb = b.tensor(ta.name);
    if (copy_a) {
      out.add(ta);
      continue;
    }
    if (copy_b) {
      out.add(tb);
      continue;
    }
    std::vector<float> mixed(ta.data.size());
    for (size_t i = 0; i < mixed.size(); ++i) {
      mixed[i] = wa * ta.data[i] + wb * tb.data[i];
    }
    out.add(Tensor(ta.name, ta.shape, std::move(mixed)));
  }
  out.set_meta("alpha", std::to_string(alpha));
  out.set_meta("parent_a", digest(a));
  out.set_meta("parent_b", digest(b));
  return out;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  nlohmann::json header;
  header["meta"] = ckpt.meta();
  nlohmann::json entries = nlohmann::json::array();
  uint64_t offset = 0;
  for (const Tensor& t : ckpt.tensors()) {
    check_finite(t);
    const uint64_t length = uint64_t(t.data.size()) * 4;
    entries.push_back({{"name", t.name},
                       {"shape", t.shape},
                       {"offset", offset},
                       {"length", length}});
    offset += length;
  }
  header["tensors"] = std::move(entries);
  const std::string header_text = header.dump();

  std::string blob;
  blob.reserve(16 + header_text.size() + offset);
  blob.append(kMagic, 4);
  append_le32(blob, kCheckpointFormatVersion);
  append_le64(blob, header_text.size());
  blob += header_text;
  for (const Tensor& t : ckpt.tensors()) {
    for (float v : t.data) append_le32(blob, float_bits(v));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) raise(ErrCode::Io, "cannot open '" + path.string() + "' for writing");
  f.write(blob.data(), std::streamsize(blob.size()));
  if (!f) raise(ErrCode::Io, "write failed for '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(ErrCode::Io, "cannot open '" + path.string() + "'");
  std::string blob((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) raise(ErrCode::Io, "read failed for '" + path.string() + "'");

  if (blob.size() < 16 || std::memcmp(blob.data(), kMagic, 4) != 0) {
    raise(ErrCode::Format, "'" + path.string() + "': bad magic bytes");
  }
  uint32_t version = 0;
  for (int i = 0; i < 4; ++i) version |= uint32_t(uint8_t(blob[4 + i])) << (8 * i);
  if (version != kCheckpointFormatVersion) {
    raise(ErrCode::Format,
          "'" + path.string() + "': unsupported format version " + std::to_string(version));
  }
  uint64_t header_len = 0;
  for (int i = 0; i < 8; ++i) header_len |= uint64_t(uint8_t(blob[8 + i])) << (8 * i);
  if (16 + header_len > blob.size()) {
    raise(ErrCode::Format, "'" + path.string() + "': truncated header");
  }

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(blob.substr(16, header_len));
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::Format, "'" + path.string() + "': header is not valid JSON: " + e.what());
  }

  const char* payload = blob.data() + 16 + header_len;
  const uint64_t payload_size = blob.size() - 16 - header_len;

  Checkpoint ckpt;
  try {
    for (auto& [key, value] : header.at("meta").items()) {
      ckpt.set_meta(key, value.get<std::string>());
    }
    for (const auto& entry : header.at("tensors")) {
      const std::string name = entry.at("name").get<std::string>();
      const auto shape = entry.at("shape").get<std::vector<size_t>>();
      const uint64_t offset = entry.at("offset").get<uint64_t>();
      const uint64_t length = entry.at("length").get<uint64_t>();
      uint64_t n = 1;
      for (size_t d : shape) n *= d;
      if (length != n * 4) {
        raise(ErrCode::Format, "'" + path.string() + "': tensor '" + name +
                                   "' declared shape does not match payload length");
      }
      if (offset + length > payload_size) {
        raise(ErrCode::Format,
              "'" + path.string() + "': tensor '" + name + "' payload out of bounds");
      }
      std::vector<float> data(n);
      for (uint64_t i = 0; i < n; ++i) {
        const uint8_t* p = reinterpret_cast<const uint8_t*>(payload + offset + 4 * i);
        uint32_t u = uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) |
                     (uint32_t(p[3]) << 24);
        data[i] = bits_float(u);
      }
      ckpt.add(Tensor(name, shape, std::move(data)));
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::Format, "'" + path.string() + "': malformed header: " + e.what());
  }
  return ckpt;
}

std::string digest(const Checkpoint& ckpt) {
  Sha256 h;
  std::string buf;
  append_le64(buf, ckpt.meta().size());
  for (const auto& [key, value] : ckpt.meta()) {
    buf += key;
    buf.push_back('\0');
    buf += value;
    buf.push_back('\0');
  }
  h.update(buf);
  hash_tensors(h, ckpt);
  return h.hex_digest();
}

std::string tensor_digest(const Checkpoint& ckpt) {
  Sha256 h;
  hash_tensors(h, ckpt);
  return h.hex_digest();
}

}  // namespace langpaint
