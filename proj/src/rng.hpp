// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random number generation. The standard library generators are
// reproducible but the distributions are not specified bit-exactly, so both
// the generator (xoshiro256**) and the draws are implemented here.
//
// All randomness in the library flows from a single user seed through
// Rng::derive(seed, tag, a, b): the tag names the purpose ("shuffle", "init",
// "fold", ...) and the indices split the stream. Identical derivations yield
// identical streams on every platform.

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace langpaint {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a over bytes; also used by the feature hasher.
inline uint64_t fnv1a64(std::string_view bytes, uint64_t h = 14695981039346656037ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class Rng {
 public:
  // Derive an independent stream from (seed, purpose-tag, indices).
  static Rng derive(uint64_t seed, std::string_view tag, uint64_t a = 0, uint64_t b = 0) {
    uint64_t mix = seed;
    mix ^= fnv1a64(tag) + 0x9E3779B97F4A7C15ULL + (mix << 6) + (mix >> 2);
    mix ^= a + 0x9E3779B97F4A7C15ULL + (mix << 6) + (mix >> 2);
    mix ^= b + 0x9E3779B97F4A7C15ULL + (mix << 6) + (mix >> 2);
    Rng r;
    uint64_t sm = mix;
    for (auto& s : r.state_) s = splitmix64(sm);
    return r;
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, n).
  uint64_t below(uint64_t n) {
    const uint64_t bound = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= bound);
    return v % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t state_[4] = {};
};

}  // namespace langpaint
