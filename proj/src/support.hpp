// Copyright (c) 2026 langpaint contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>

namespace langpaint {

inline constexpr const char* kArtifactVersion = "1.0.0";

std::string file_sha256(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over the target.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

// Runs fn(0..n-1) on up to `threads` workers. Tasks must be independent;
// ordering of side effects is up to the caller, so results should land in
// pre-sized slots. The first failing task's exception is rethrown.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn);

}  // namespace langpaint
