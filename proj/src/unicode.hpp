// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace langpaint {

// Decodes UTF-8 into codepoints. Returns false (leaving `out` in an
// unspecified state) if the input is not valid UTF-8.
bool utf8_decode(std::string_view text, std::vector<uint32_t>& out);

std::string utf8_encode(const std::vector<uint32_t>& codepoints);

// Whitespace per the Unicode White_Space property (the separators the
// tokenizer splits on).
bool is_unicode_space(uint32_t cp);

// Canonical composition (NFC) per UAX #15. Invalid UTF-8 is returned
// unchanged.
std::string nfc(std::string_view text);

// Leading/trailing Unicode whitespace removed; ASCII fallback for invalid
// UTF-8.
std::string trim(std::string_view text);

}  // namespace langpaint
