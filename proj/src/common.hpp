// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0
//
// Error types shared across the library. Every failure surfaced to callers
// carries one of these codes; the C API and the CLI map them to status codes
// and exit codes respectively.

#pragma once

#include <stdexcept>
#include <string>

namespace langpaint {

enum class ErrCode {
  InvalidArgument,  // out-of-range alpha, bad fractions, malformed config
  Io,               // filesystem failures
  Format,           // checkpoint file: bad magic/version/truncation
  Parse,            // CSV/TSV/JSON parse failures
  Incompatible,     // checkpoint name-set or shape mismatch
  Validation,       // domain violations: empty corpus, stratum too small, ...
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrCode code() const { return code_; }

 private:
  ErrCode code_;
};

[[noreturn]] inline void raise(ErrCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace langpaint
