// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0
//
// Small canonical normalizer: full canonical decomposition (table-driven +
// algorithmic Hangul), canonical ordering, then canonical composition.
// Covers exactly what text dedup needs; compatibility (NFKC) forms are out
// of scope.

#include "unicode.hpp"

#include <algorithm>

namespace langpaint {

namespace {

#include "unicode_nfc_data.inc"

constexpr uint32_t kHangulSBase = 0xAC00;
constexpr uint32_t kHangulLBase = 0x1100;
constexpr uint32_t kHangulVBase = 0x1161;
constexpr uint32_t kHangulTBase = 0x11A7;
constexpr uint32_t kHangulLCount = 19;
constexpr uint32_t kHangulVCount = 21;
constexpr uint32_t kHangulTCount = 28;
constexpr uint32_t kHangulNCount = kHangulVCount * kHangulTCount;
constexpr uint32_t kHangulSCount = kHangulLCount * kHangulNCount;

uint8_t combining_class(uint32_t cp) {
  size_t lo = 0, hi = std::size(kCcc);
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (kCcc[mid].cp < cp)
      lo = mid + 1;
    else
      hi = mid;
  }
  return (lo < std::size(kCcc) && kCcc[lo].cp == cp) ? kCcc[lo].ccc : 0;
}

const DecompEntry* find_decomp(uint32_t cp) {
  size_t lo = 0, hi = std::size(kDecomp);
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (kDecomp[mid].cp < cp)
      lo = mid + 1;
    else
      hi = mid;
  }
  return (lo < std::size(kDecomp) && kDecomp[lo].cp == cp) ? &kDecomp[lo] : nullptr;
}

uint32_t compose_pair(uint32_t a, uint32_t b) {
  const uint64_t key = (uint64_t(a) << 32) | b;
  size_t lo = 0, hi = std::size(kPairs);
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (kPairs[mid].key < key)
      lo = mid + 1;
    else
      hi = mid;
  }
  return (lo < std::size(kPairs) && kPairs[lo].key == key) ? kPairs[lo].composite : 0;
}

void decompose(const std::vector<uint32_t>& in, std::vector<uint32_t>& out) {
  out.clear();
  out.reserve(in.size());
  for (uint32_t cp : in) {
    if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
      uint32_t index = cp - kHangulSBase;
      out.push_back(kHangulLBase + index / kHangulNCount);
      out.push_back(kHangulVBase + (index % kHangulNCount) / kHangulTCount);
      uint32_t t = index % kHangulTCount;
      if (t != 0) out.push_back(kHangulTBase + t);
    } else if (const DecompEntry* e = find_decomp(cp)) {
      for (uint32_t i = 0; i < e->len; ++i) out.push_back(kDecompPool[e->offset + i]);
    } else {
      out.push_back(cp);
    }
  }
}

// Stable reorder of combining marks by canonical class.
void canonical_order(std::vector<uint32_t>& cps) {
  for (size_t i = 1; i < cps.size(); ++i) {
    uint8_t ccc = combining_class(cps[i]);
    if (ccc == 0) continue;
    size_t j = i;
    while (j > 0 && combining_class(cps[j - 1]) > ccc) {
      std::swap(cps[j - 1], cps[j]);
      --j;
    }
  }
}

void compose(std::vector<uint32_t>& cps) {
  if (cps.empty()) return;
  std::vector<uint32_t> out;
  out.reserve(cps.size());
  out.push_back(cps[0]);
  size_t last_starter = (combining_class(cps[0]) == 0) ? 0 : SIZE_MAX;
  for (size_t i = 1; i < cps.size(); ++i) {
    uint32_t cp = cps[i];
    uint8_t ccc = combining_class(cp);
    bool blocked = true;
    if (last_starter != SIZE_MAX) {
      uint8_t prev_ccc = combining_class(out.back());
      blocked = (last_starter != out.size() - 1) && prev_ccc >= ccc;
    }
    if (!blocked) {
      uint32_t starter = out[last_starter];
      // Algorithmic Hangul composition first, then the pair table.
      uint32_t composite = 0;
      if (starter >= kHangulLBase && starter < kHangulLBase + kHangulLCount &&
          cp >= kHangulVBase && cp < kHangulVBase + kHangulVCount) {
        composite = kHangulSBase + ((starter - kHangulLBase) * kHangulVCount +
                                    (cp - kHangulVBase)) * kHangulTCount;
      } else if (starter >= kHangulSBase && starter < kHangulSBase + kHangulSCount &&
                 (starter - kHangulSBase) % kHangulTCount == 0 &&
                 cp > kHangulTBase && cp < kHangulTBase + kHangulTCount) {
        composite = starter + (cp - kHangulTBase);
      } else {
        composite = compose_pair(starter, cp);
      }
      if (composite != 0) {
        out[last_starter] = composite;
        continue;
      }
    }
    if (ccc == 0) last_starter = out.size();
    out.push_back(cp);
  }
  cps.swap(out);
}

}  // namespace

bool utf8_decode(std::string_view text, std::vector<uint32_t>& out) {
  out.clear();
  out.reserve(text.size());
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    uint8_t b0 = uint8_t(text[i]);
    uint32_t cp;
    size_t len;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (size_t k = 1; k < len; ++k) {
      uint8_t b = uint8_t(text[i + k]);
      if ((b & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong encodings, surrogates and out-of-range values.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
      return false;
    }
    out.push_back(cp);
    i += len;
  }
  return true;
}

std::string utf8_encode(const std::vector<uint32_t>& codepoints) {
  std::string out;
  out.reserve(codepoints.size());
  for (uint32_t cp : codepoints) {
    if (cp < 0x80) {
      out.push_back(char(cp));
    } else if (cp < 0x800) {
      out.push_back(char(0xC0 | (cp >> 6)));
      out.push_back(char(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(char(0xE0 | (cp >> 12)));
      out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(char(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(char(0xF0 | (cp >> 18)));
      out.push_back(char(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(char(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

bool is_unicode_space(uint32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

std::string nfc(std::string_view text) {
  std::vector<uint32_t> cps;
  if (!utf8_decode(text, cps)) return std::string(text);
  std::vector<uint32_t> decomposed;
  decompose(cps, decomposed);
  canonical_order(decomposed);
  compose(decomposed);
  return utf8_encode(decomposed);
}

std::string trim(std::string_view text) {
  std::vector<uint32_t> cps;
  if (!utf8_decode(text, cps)) {
    size_t b = text.find_first_not_of(" \t\r\n\v\f");
    if (b == std::string_view::npos) return std::string();
    size_t e = text.find_last_not_of(" \t\r\n\v\f");
    return std::string(text.substr(b, e - b + 1));
  }
  size_t b = 0, e = cps.size();
  while (b < e && is_unicode_space(cps[b])) ++b;
  while (e > b && is_unicode_space(cps[e - 1])) --e;
  return utf8_encode(std::vector<uint32_t>(cps.begin() + b, cps.begin() + e));
}

}  // namespace langpaint
